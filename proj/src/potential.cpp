#include "nems/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace nems {

namespace {
constexpr double pi = std::numbers::pi;

double truncate_to_principal(double phi) {
  double t = phi - 2.0 * pi * std::floor((phi + pi) / (2.0 * pi));
  if (t <= -pi) t += 2.0 * pi;
  return t;
}

// The inductor branch behaves as a branch of n_L junctions with r = n_L,
// normalized so the value and slope at phi = 0 match phi^2/2.
JosephsonBranch inductor_as_branch(const CircuitSpec& c) {
  return JosephsonBranch{static_cast<double>(c.inductor_n), c.inductor_n, 0.0,
                         0.0, false};
}

double inductor_term(const CircuitSpec& c, double phi) {
  if (c.ideal_inductor()) return 0.5 * phi * phi;
  const double nL = c.inductor_n;
  return nL * nL * (1.0 - std::cos(phi / nL));
}

double inductor_term_deriv(const CircuitSpec& c, double phi, int k) {
  if (c.ideal_inductor()) {
    if (k == 0) return 0.5 * phi * phi;
    if (k == 1) return phi;
    if (k == 2) return 1.0;
    return 0.0;
  }
  if (k == 0) return inductor_term(c, phi);
  const auto b = inductor_as_branch(c);
  return branch_potential_deriv(b, phi, k);
}
} // namespace

double u_branch_periodic(double r, int n, double phi_J) {
  if (n < 1) throw validation_error("junction count must be >= 1");
  return -n * r * std::cos(truncate_to_principal(phi_J) / n);
}

double u_total(const CircuitSpec& c, double phi,
               const std::vector<double>& flux_offsets) {
  if (flux_offsets.size() != c.branches.size())
    throw validation_error("flux_offsets length must equal branch count");
  double u = inductor_term(c, phi);
  for (std::size_t i = 0; i < c.branches.size(); ++i) {
    const auto& b = c.branches[i];
    const double phi_J = phi + flux_offsets[i];
    u += b.periodic ? u_branch_periodic(b.r, b.n, phi_J)
                    : -b.n * b.r * std::cos(phi_J / b.n);
  }
  return u;
}

double u_static(const CircuitSpec& c, double phi, bool force_periodic) {
  double u = inductor_term(c, phi);
  for (const auto& b : c.branches) {
    const double phi_J = phi + b.dc_bias;
    u += (force_periodic || b.periodic)
             ? u_branch_periodic(b.r, b.n, phi_J)
             : -b.n * b.r * std::cos(phi_J / b.n);
  }
  return u;
}

double u_static_deriv(const CircuitSpec& c, double phi) {
  double d = inductor_term_deriv(c, phi, 1);
  for (const auto& b : c.branches) d += branch_potential_deriv(b, phi, 1);
  return d;
}

double u_static_deriv_k(const CircuitSpec& c, double phi, int k) {
  double d = inductor_term_deriv(c, phi, k);
  for (const auto& b : c.branches) d += branch_potential_deriv(b, phi, k);
  return d;
}

double branch_potential_deriv(const JosephsonBranch& b, double phi, int k) {
  const double arg = (phi + b.dc_bias) / b.n;
  if (k == 0) return -b.n * b.r * std::cos(arg);
  // d^k[-n r cos((phi+bias)/n)] = -(r/n^(k-1)) cos(arg + k*pi/2)
  return -b.r * std::pow(static_cast<double>(b.n), 1 - k) *
         std::cos(arg + 0.5 * pi * k);
}

double branch_drive_deriv(const JosephsonBranch& b, double phi, int k) {
  const double arg = (phi + b.dc_bias) / b.n;
  return b.r * std::pow(static_cast<double>(b.n), -k) *
         std::sin(arg + 0.5 * pi * k);
}

bool static_potential_is_even(const CircuitSpec& c) {
  constexpr double tol = 1e-12;
  const std::size_t nb = c.branches.size();
  std::vector<bool> used(nb, false);
  for (std::size_t i = 0; i < nb; ++i) {
    if (used[i]) continue;
    const auto& b = c.branches[i];
    const double t = b.truncated_bias();
    if (std::abs(std::sin(t / b.n)) < tol) {
      used[i] = true;
      continue;
    }
    bool paired = false;
    for (std::size_t j = i + 1; j < nb && !paired; ++j) {
      if (used[j]) continue;
      const auto& o = c.branches[j];
      if (o.n == b.n && std::abs(o.r - b.r) < tol &&
          std::abs(o.truncated_bias() + t) < tol) {
        used[i] = used[j] = true;
        paired = true;
      }
    }
    if (!paired) return false;
  }
  return true;
}

MinimumResult find_minimum_detailed(const CircuitSpec& c, double window) {
  MinimumResult res;
  if (static_potential_is_even(c)) {
    res.phi_star = 0.0;
    res.parity_symmetric = true;
    return res;
  }

  const int grid = 4001;
  const double h = 2.0 * window / (grid - 1);
  std::vector<double> brackets;
  double prev = u_static_deriv(c, -window);
  for (int i = 1; i < grid; ++i) {
    const double x = -window + i * h;
    const double cur = u_static_deriv(c, x);
    if (prev < 0.0 && cur >= 0.0) brackets.push_back(x - h);
    prev = cur;
  }
  if (brackets.empty())
    throw no_minimum_error("static potential derivative never brackets zero");
  res.minima_in_window = static_cast<int>(brackets.size());

  auto polish = [&](double lo) {
    double hi = lo + h;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (u_static_deriv(c, mid) < 0.0)
        lo = mid;
      else
        hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 60; ++it) {
      const double g = u_static_deriv(c, x);
      if (std::abs(g) < 1e-13) break;
      double gg = 0.0;
      gg += inductor_term_deriv(c, x, 2);
      for (const auto& b : c.branches) gg += branch_potential_deriv(b, x, 2);
      if (!(gg > 0.0)) break;
      x -= g / gg;
    }
    return x;
  };

  double best_x = 0.0, best_u = 0.0;
  bool first = true;
  for (double lo : brackets) {
    const double x = polish(lo);
    const double u = u_static(c, x);
    if (first || u < best_u) {
      best_x = x;
      best_u = u;
      first = false;
    }
  }
  res.phi_star = best_x;
  return res;
}

double find_minimum(const CircuitSpec& c) {
  return find_minimum_detailed(c).phi_star;
}

namespace {

double well_depth_scan(const CircuitSpec& c, double phi_star) {
  // Lowest barrier above the minimum within 1.5*pi on either side, using
  // the phase-slip-aware form so slip boundaries count as escape paths.
  const double u0 = u_static(c, phi_star, true);
  const int grid = 3001;
  double best = std::numeric_limits<double>::infinity();
  for (int side = 0; side < 2; ++side) {
    const double dir = side == 0 ? 1.0 : -1.0;
    double running_max = u0;
    bool found = false;
    for (int i = 1; i < grid; ++i) {
      const double x = phi_star + dir * 1.5 * pi * i / (grid - 1);
      const double u = u_static(c, x, true);
      if (u > running_max) {
        running_max = u;
      } else if (u < running_max - 1e-12 && running_max > u0 + 1e-12) {
        best = std::min(best, running_max - u0);
        found = true;
        break;
      }
    }
    if (!found) best = std::min(best, running_max - u0);
  }
  return best;
}

} // namespace

PotentialSeries taylor_static(const CircuitSpec& c, int order) {
  if (order < 2) throw validation_error("Taylor order must be >= 2");
  const auto min = find_minimum_detailed(c);
  PotentialSeries s;
  s.phi_star = min.phi_star;
  s.order = order;
  s.c_static.assign(order + 1, 0.0);
  s.c_driven.assign(order + 1, 0.0);
  for (int k = 0; k <= order; ++k) {
    double v = inductor_term_deriv(c, s.phi_star, k);
    for (const auto& b : c.branches)
      v += branch_potential_deriv(b, s.phi_star, k);
    s.c_static[k] = v;
  }
  if (min.parity_symmetric) {
    // Odd orders vanish identically; scrub trigonometric roundoff.
    for (int k = 1; k <= order; k += 2) s.c_static[k] = 0.0;
  }
  if (std::abs(s.c_static[1]) > 1e-10)
    throw no_minimum_error("expansion point is not stationary");
  if (!(s.c_static[2] > 0.0))
    throw no_minimum_error("expansion point is not a minimum");
  s.well_depth = well_depth_scan(c, s.phi_star);
  return s;
}

PotentialSeries taylor_driven(const CircuitSpec& c, int order) {
  PotentialSeries s = taylor_static(c, order);
  for (int k = 0; k <= order; ++k) {
    double v = 0.0;
    for (const auto& b : c.branches)
      v += b.ac_ratio * branch_drive_deriv(b, s.phi_star, k);
    s.c_driven[k] = v;
  }
  return s;
}

std::string potential_curve_csv(const CircuitSpec& c, double lo, double hi,
                                int samples, bool periodic) {
  std::ostringstream out;
  out.precision(12);
  out << "phi,U_over_EL\n";
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / (samples - 1);
    out << x << "," << u_static(c, x, periodic) << "\n";
  }
  return out.str();
}

std::string series_csv(const PotentialSeries& s) {
  std::ostringstream out;
  out.precision(12);
  out << "n,c_static,c_driven\n";
  for (int n = 0; n <= s.order; ++n)
    out << n << "," << s.c_static[n] << "," << s.c_driven[n] << "\n";
  return out.str();
}

} // namespace nems
