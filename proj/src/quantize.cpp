#include "nems/quantize.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>
#include <lapacke.h>

#include "nems/wao.hpp"

namespace nems {

namespace {
constexpr double pi = std::numbers::pi;

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

int env_thread_cap() {
  if (const char* s = std::getenv("NEMS_NUM_THREADS")) {
    const int v = std::atoi(s);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}
} // namespace

ModeQuantization quantize(const CircuitSpec& c, const PotentialSeries& series) {
  if (!(series.c_static.size() > 2) || !(series.c_static[2] > 0.0))
    throw validation_error("quantization needs positive curvature c2");
  const double EL = c.EL();
  const double EC = c.charging_energy;
  const double c2 = series.c_static[2];

  ModeQuantization q;
  q.series = series;
  q.omega_static = std::sqrt(8.0 * c2 * EL * EC);
  q.phi_zpf = std::pow(2.0 * EC / (c2 * EL), 0.25);
  q.n_zpf = 0.5 * std::pow(c2 * EL / (2.0 * EC), 0.25);

  const int N = series.order;
  q.g_static.assign(N + 1, 0.0);
  q.g_driven.assign(N + 1, 0.0);
  for (int n = 3; n <= N; ++n)
    q.g_static[n] =
        EL * series.c_static[n] * std::pow(q.phi_zpf, n) / factorial(n);
  for (int n = 1; n <= N; ++n)
    q.g_driven[n] =
        EL * series.c_driven[n] * std::pow(q.phi_zpf, n) / factorial(n);

  const double g3 = N >= 3 ? q.g_static[3] : 0.0;
  const double g4 = N >= 4 ? q.g_static[4] : 0.0;
  q.kerr_static = 6.0 * g4 - 30.0 * g3 * g3 / q.omega_static;
  return q;
}

ModeQuantization quantize(const CircuitSpec& c, int order) {
  return quantize(c, taylor_driven(c, order));
}

std::string quantization_json(const ModeQuantization& q) {
  nlohmann::json j;
  j["omega_static_GHz"] = q.omega_static;
  j["phi_zpf"] = q.phi_zpf;
  j["n_zpf"] = q.n_zpf;
  j["kerr_static_GHz"] = q.kerr_static;
  j["phi_star_rad"] = q.series.phi_star;
  j["g_static_GHz"] = q.g_static;
  j["g_driven_GHz_per_eps"] = q.g_driven;
  j["c_static"] = q.series.c_static;
  j["c_driven"] = q.series.c_driven;
  return j.dump(2);
}

std::vector<double> GridHamiltonian::lowest_eigenvalues(int k) const {
  const int n = static_cast<int>(diag.size());
  if (k < 1 || k > n) throw validation_error("bad eigenvalue count");
  std::vector<double> d = diag;
  std::vector<double> e(n - 1, offdiag);
  std::vector<double> w(n);
  std::vector<double> z(1);
  std::vector<lapack_int> isuppz(2 * k);
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dstevr(
      LAPACK_COL_MAJOR, 'N', 'I', n, d.data(), e.data(), 0.0, 0.0, 1, k, 0.0,
      &m, w.data(), z.data(), 1, isuppz.data());
  if (info != 0)
    throw std::runtime_error("tridiagonal eigensolve failed, info=" +
                             std::to_string(info));
  w.resize(k);
  return w;
}

GridHamiltonian grid_hamiltonian(const CircuitSpec& c, int points, double span,
                                 bool periodic) {
  if (points < 16) throw validation_error("grid needs at least 16 points");
  const auto series = taylor_static(c, 2);
  const double phi_star = series.phi_star;
  if (span <= 0.0) {
    const double phi_zpf =
        std::pow(2.0 * c.charging_energy / (series.c_static[2] * c.EL()), 0.25);
    span = 8.0 * phi_zpf * std::sqrt(20.0);
  }

  if (!periodic) {
    for (const auto& b : c.branches) {
      if (b.n < 2) continue;
      const double t = truncate_flux(b.dc_bias);
      // slip boundaries of the m=0 sheet sit at phi + t = +-pi
      const double lo = -pi - t, hi = pi - t;
      if (phi_star - span < lo || phi_star + span > hi)
        throw validation_error(
            "span crosses a phase-slip boundary; enable periodic mode");
    }
  }

  GridHamiltonian g;
  g.phi_lo = phi_star - span;
  g.step = 2.0 * span / (points - 1);
  const double kin = 4.0 * c.charging_energy / (g.step * g.step);
  g.offdiag = -kin;
  g.diag.resize(points);
  const double EL = c.EL();
  for (int i = 0; i < points; ++i) {
    const double phi = g.phi_lo + i * g.step;
    g.diag[i] = 2.0 * kin + EL * u_static(c, phi, periodic);
  }
  return g;
}

std::vector<double> grid_transitions(const CircuitSpec& c, int n_levels,
                                     int points, double span, bool periodic) {
  const auto g = grid_hamiltonian(c, points, span, periodic);
  const auto ev = g.lowest_eigenvalues(n_levels + 1);
  std::vector<double> tr(n_levels);
  for (int k = 0; k < n_levels; ++k) tr[k] = ev[k + 1] - ev[0];
  return tr;
}

SpectrumSweep sweep_spectrum(const CircuitSpec& c, const FluxAxis& axis,
                             int samples, int n_levels, int grid_points) {
  if (axis.branch_index < 0 ||
      axis.branch_index >= static_cast<int>(c.branches.size()))
    throw validation_error("flux axis branch index out of range");
  if (samples < 2) throw validation_error("sweep needs at least 2 samples");

  SpectrumSweep sweep;
  sweep.axis = axis;
  sweep.n_levels = n_levels;
  sweep.flux.resize(samples);
  sweep.transitions.resize(samples);
  sweep.wao_ok.assign(samples, false);
  for (int i = 0; i < samples; ++i)
    sweep.flux[i] = axis.lo + (axis.hi - axis.lo) * i / (samples - 1);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= samples) return;
      CircuitSpec point = c;
      point.branches[axis.branch_index].dc_bias = sweep.flux[i];
      try {
        if (brute_force_minima(point) != 1) continue; // blank region
        sweep.transitions[i] =
            grid_transitions(point, n_levels, grid_points, 0.0, true);
        sweep.wao_ok[i] = true;
      } catch (const std::exception&) {
        // leave the point blank
      }
    }
  };

  const int nthreads = std::min(env_thread_cap(), samples);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return sweep;
}

std::string sweep_csv(const SpectrumSweep& s) {
  std::ostringstream out;
  out.precision(12);
  out << "flux_rad";
  for (int k = 0; k < s.n_levels; ++k) out << ",E" << k + 1 << "-E" << k;
  out << "\n";
  for (std::size_t i = 0; i < s.flux.size(); ++i) {
    out << s.flux[i];
    if (s.wao_ok[i]) {
      double prev = 0.0;
      for (int k = 0; k < s.n_levels; ++k) {
        out << "," << s.transitions[i][k] - prev;
        prev = s.transitions[i][k];
      }
    } else {
      for (int k = 0; k < s.n_levels; ++k) out << ",";
    }
    out << "\n";
  }
  return out.str();
}

} // namespace nems
