#pragma once

#include <string>
#include <vector>

#include "nems/circuit.hpp"
#include "nems/potential.hpp"

namespace nems {

/// Bosonic Hamiltonian data of the quantized mode. Energies in GHz.
/// g_static[n] multiplies (a^dag + a)^n for n >= 3, g_driven[n] multiplies
/// eps(t) (a^dag + a)^n for n >= 1; both vectors are indexed by n (entries
/// below those orders are zero).
struct ModeQuantization {
  double omega_static = 0.0; // bare (plasma) frequency, GHz
  double phi_zpf = 0.0;
  double n_zpf = 0.0;
  std::vector<double> g_static; // GHz
  std::vector<double> g_driven; // GHz per unit eps
  double kerr_static = 0.0;     // coefficient of a^dag a^dag a a, GHz
  PotentialSeries series;
};

ModeQuantization quantize(const CircuitSpec& c, const PotentialSeries& series);
ModeQuantization quantize(const CircuitSpec& c, int order = 8);

std::string quantization_json(const ModeQuantization& q);

/// Dense-grid Schroedinger problem 4 E_C (second difference) + U_static on
/// [phi_star - span, phi_star + span]. The matrix is symmetric tridiagonal.
struct GridHamiltonian {
  std::vector<double> diag; // GHz
  double offdiag = 0.0;     // GHz
  double phi_lo = 0.0;
  double step = 0.0;

  /// Lowest k eigenvalues in ascending order (GHz).
  std::vector<double> lowest_eigenvalues(int k) const;
};

/// Builds the grid Hamiltonian. Non-periodic evaluation refuses a span that
/// crosses a phase-slip boundary of any multi-junction branch; enable
/// `periodic` to use the truncated branch form instead.
GridHamiltonian grid_hamiltonian(const CircuitSpec& c, int points = 2048,
                                 double span = 0.0, bool periodic = false);

/// Lowest n_levels transition frequencies E_k - E_0 from the grid problem.
std::vector<double> grid_transitions(const CircuitSpec& c, int n_levels,
                                     int points = 2048, double span = 0.0,
                                     bool periodic = false);

/// One flux-control axis: sweep branch `branch_index`'s DC bias.
struct FluxAxis {
  int branch_index = 0;
  double lo = 0.0;
  double hi = 0.0;
};

struct SpectrumSweep {
  FluxAxis axis;
  int n_levels = 1;
  std::vector<double> flux;                    // sampled bias values
  std::vector<std::vector<double>> transitions; // per point; empty when blank
  std::vector<bool> wao_ok;                    // false marks a blank region
};

/// Per-point lowest transition frequencies along a flux axis; points failing
/// the single-well scan are left blank. Worker count is capped by the
/// NEMS_NUM_THREADS environment variable.
SpectrumSweep sweep_spectrum(const CircuitSpec& c, const FluxAxis& axis,
                             int samples, int n_levels, int grid_points = 1024);

std::string sweep_csv(const SpectrumSweep& s);

} // namespace nems
