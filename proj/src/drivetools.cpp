#include "nems/drivetools.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nems/wao.hpp"

namespace nems {

namespace {
constexpr double pi = std::numbers::pi;

double bessel_j(int k, double x) {
  // std::cyl_bessel_j takes x >= 0; extend by parity J_k(-x) = (-1)^k J_k(x)
  const double v = std::cyl_bessel_j(static_cast<double>(k), std::abs(x));
  return (x < 0.0 && k % 2 == 1) ? -v : v;
}

double per_loop_amplitude(const JosephsonBranch& b, double eps_d) {
  return b.ac_ratio * eps_d / b.n;
}
} // namespace

HarmonicDecomposition bessel_decompose(const CircuitSpec& c, double eps_d,
                                       int order) {
  if (eps_d < 0.0) throw validation_error("drive amplitude must be >= 0");
  const double window = drive_window(c);
  if (eps_d > window)
    throw validation_error("drive amplitude " + std::to_string(eps_d) +
                           " exceeds the flux window " +
                           std::to_string(window));

  const PotentialSeries base = taylor_static(c, order);
  const double phi0 = base.phi_star;

  HarmonicDecomposition h;
  h.amplitude = eps_d;
  auto blank = [&]() {
    PotentialSeries s;
    s.phi_star = phi0;
    s.order = order;
    s.c_static.assign(order + 1, 0.0);
    s.c_driven.assign(order + 1, 0.0);
    return s;
  };
  h.dc_shift = blank();
  if (eps_d == 0.0) return h;
  for (int k = 1; k <= 3; ++k) h.harmonics[k] = blank();

  for (const auto& b : c.branches) {
    const double eps_i = per_loop_amplitude(b, eps_d);
    const double j0 = bessel_j(0, eps_i), j1 = bessel_j(1, eps_i);
    const double j2 = bessel_j(2, eps_i), j3 = bessel_j(3, eps_i);
    for (int k = 0; k <= order; ++k) {
      const double dcos = branch_potential_deriv(b, phi0, k); // d^k[-n r cos]
      const double dsin = b.n * branch_drive_deriv(b, phi0, k); // d^k[n r sin]
      // U = -sum n r [cos_i (cos(d/n) - 1) - sin_i sin(d/n)], with
      // cos(x cos wt) = J0 - 2 J2 cos 2wt + ..., sin(x cos wt) = 2 J1 cos wt
      // - 2 J3 cos 3wt + ...
      h.dc_shift.c_static[k] += -(j0 - 1.0) * dcos * -1.0; // +n r cos_i (1-J0)
      h.harmonics[1].c_static[k] += 2.0 * j1 * dsin;
      h.harmonics[2].c_static[k] += 2.0 * j2 * -dcos; // +2 J2 n r cos_i
      h.harmonics[3].c_static[k] += -2.0 * j3 * dsin;
    }
  }
  return h;
}

DriveShifts strong_drive_shifts(const CircuitSpec& c, double eps_d) {
  DriveShifts out;
  if (eps_d == 0.0) return out;
  const ModeQuantization base = quantize(c, 8);

  // k-th derivative of the DC drive correction sum_i n r cos_i (1 - J0).
  auto dc_deriv = [&](double phi, int k) {
    double v = 0.0;
    for (const auto& b : c.branches) {
      const double eps_i = per_loop_amplitude(b, eps_d);
      v -= (1.0 - bessel_j(0, eps_i)) * branch_potential_deriv(b, phi, k);
    }
    return v;
  };

  // Re-minimize the dc-shifted potential, then re-expand there.
  double phi = base.series.phi_star;
  for (int it = 0; it < 80; ++it) {
    const double g = u_static_deriv_k(c, phi, 1) + dc_deriv(phi, 1);
    if (std::abs(g) < 1e-13) break;
    const double gg = u_static_deriv_k(c, phi, 2) + dc_deriv(phi, 2);
    if (!(gg > 0.0)) break;
    phi -= g / gg;
  }

  PotentialSeries shifted;
  shifted.phi_star = phi;
  shifted.order = 8;
  shifted.c_static.assign(9, 0.0);
  shifted.c_driven.assign(9, 0.0);
  for (int k = 0; k <= 8; ++k)
    shifted.c_static[k] = u_static_deriv_k(c, phi, k) + dc_deriv(phi, k);
  shifted.c_static[1] = 0.0; // stationary by construction

  const ModeQuantization dressed = quantize(c, shifted);
  out.delta_omega = dressed.omega_static - base.omega_static;
  out.delta_kerr = dressed.kerr_static - base.kerr_static;
  return out;
}

DriveShifts strong_drive_shifts_formula(const CircuitSpec& c, double eps_d) {
  if (c.branches.empty())
    throw validation_error("the closed-form shift needs Josephson branches");
  const auto& first = c.branches.front();
  const auto& last = c.branches.back();
  if (first.n != 1 || last.n < 2)
    throw validation_error("the closed-form shift assumes a single-JJ first "
                           "branch and a multi-JJ last branch");
  const ModeQuantization q = quantize(c, 8);
  const double r1 = first.r, r3 = last.r;
  const double n3 = last.n;
  const double amp2 = 0.1 * eps_d * 0.1 * eps_d;

  DriveShifts out;
  out.delta_omega =
      -(r1 + r3 / n3) / (1.0 + r3 / n3) * 0.5 * q.omega_static * amp2;
  const double k_ratio = (r1 + r3 / (n3 * n3 * n3)) / (r3 / (n3 * n3 * n3));
  out.delta_kerr = -k_ratio * q.kerr_static * amp2;
  return out;
}

double deformed_two_photon(const CircuitSpec& c, double delta_phi_e1,
                           bool* small_regime) {
  if (c.branches.empty())
    throw validation_error("deformed drive needs at least one branch");
  if (small_regime) *small_regime = std::abs(delta_phi_e1) <= 0.1 * pi;
  CircuitSpec deformed = c;
  deformed.branches.front().dc_bias += delta_phi_e1;
  const ModeQuantization q = quantize(deformed, 4);
  return q.g_driven[2];
}

double relative_dissipation(const CircuitSpec& c1, const CircuitSpec& c2,
                            int order) {
  if (order < 1) throw validation_error("dissipation order must be >= 1");
  const ModeQuantization q1 = quantize(c1, std::max(order, 2));
  const ModeQuantization q2 = quantize(c2, std::max(order, 2));
  const double den = q2.g_driven[order];
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = q1.g_driven[order] / den;
  return ratio * ratio;
}

std::string harmonics_csv(const HarmonicDecomposition& h) {
  std::ostringstream out;
  out.precision(12);
  out << "n,dc_shift,harmonic1,harmonic2,harmonic3\n";
  const int order = h.dc_shift.order;
  for (int n = 0; n <= order; ++n) {
    out << n << "," << h.dc_shift.c_static[n];
    for (int k = 1; k <= 3; ++k) {
      if (h.harmonics.count(k))
        out << "," << h.harmonics.at(k).c_static[n];
      else
        out << "," << 0.0;
    }
    out << "\n";
  }
  return out.str();
}

} // namespace nems
