#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nems/fock.hpp"

namespace nems {

/// Diagonalization data of two linearly coupled modes.
struct CoupledModeFrame {
  double lambda = 0.0;     // mixing angle, 0.5*atan(2|g12/Delta|)
  double g12 = 0.0;        // GHz
  double delta = 0.0;      // omega1 - omega2, GHz
  double dressed_freq1 = 0.0;
  double dressed_freq2 = 0.0;
  double dressed_kerr1 = 0.0;
  double dressed_kerr2 = 0.0;
  double cross_kerr = 0.0;
};

CoupledModeFrame bogoliubov(double omega1, double omega2, double g12,
                            double K1, double K2);

/// Time-dependent coefficient amplitude * exp(i*(ramp_harmonic*phi(t)
/// - frequency*t)), with phi(t) the scenario's adiabatic ramp.
struct TimeCoeff {
  cplx amplitude{0.0, 0.0};
  double frequency = 0.0; // GHz (interpreted as rad/ns)
  int ramp_harmonic = 0;
};

struct HamTerm {
  TimeCoeff coeff;
  SparseOp op;
  std::string label;
};

struct Dissipator {
  double rate = 0.0; // GHz
  SparseOp op;
  std::string label;
};

struct Schedule {
  double t_total = 0.0;      // ns
  double dt = 0.0;           // ns; 0 selects the automatic step
  double ramp_duration = 0.0; // phi(t): 0 -> pi over this window
  int samples = 201;
};

/// A full simulation setup. H(t) = sum_k coeff_k(t) * op_k must be Hermitian
/// at every t; builders add conjugate partners explicitly.
struct SimScenario {
  std::string kind;
  FockSpace space;
  std::vector<HamTerm> terms;
  std::vector<Dissipator> dissipators;
  Schedule schedule;
  StateVec initial_state;
  std::vector<std::pair<std::string, SparseOp>> observables;
  std::vector<std::pair<std::string, StateVec>> fidelity_refs;

  double max_coefficient() const; // GHz scale for the step rule
  void validate() const;
};

struct SimResult {
  std::vector<double> times;
  std::map<std::string, std::vector<cplx>> expectations;
  std::map<std::string, std::vector<double>> fidelities;
  std::vector<double> trace; // norm^2 for pure runs
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0; // most negative sampled density eigenvalue
  bool pure = false;
  StateVec final_state;   // pure runs
  DenseOp final_density;  // density runs (also filled for pure runs)
};

struct step_instability_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fixed-step RK4 integration; Schroedinger when no dissipators are present,
/// otherwise the Lindblad master equation on the density matrix.
/// Aborts with step_instability_error when the trace drifts beyond 1e-6.
SimResult evolve(const SimScenario& s);

/// Uhlmann state fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double state_fidelity(const DenseOp& rho, const DenseOp& sigma);
double state_fidelity(const DenseOp& rho, const StateVec& psi);

// ---- scenario builders ----------------------------------------------------

/// Kerr + two-photon drive in the rotating frame:
/// H = -|K| (a^dag2 - conj(alpha)^2)(a^2 - alpha^2). Cat states are the
/// degenerate ground states. Refuses dim < 4|alpha|^2 + 10.
SimScenario build_kerr_cat(double K, cplx alpha, int dim = 30);

struct BpcnotResiduals {
  double omega1 = 0.0; // GHz, single-photon residual amplitude
  double detuning1 = 0.0;
  double omega2 = 0.0; // GHz, two-photon residual amplitude
  double detuning2 = 0.0;
};

/// Two-cat conditional-rotation gate (control = mode 0, target = mode 1)
/// with an adiabatic phase ramp 0 -> pi and optional residual drives at
/// their rotating-frame detunings.
SimScenario build_bpcnot(double K, cplx alpha1, cplx alpha2,
                         const CoupledModeFrame& frame,
                         const BpcnotResiduals& residuals, int dim_per_mode,
                         double t_gate);

/// The ideal adiabatic gate unitary on the code space, built by parallel
/// transport of the rotating cat basis (independent of evolve()).
DenseOp bpcnot_ideal_unitary(const FockSpace& space, cplx alpha1, cplx alpha2,
                             int transport_steps = 400);

/// Average fidelity of the four cat-basis inputs against the ideal gate.
struct GateFidelity {
  double average = 0.0;
  std::array<double, 4> per_input{};
  double control_leakage = 0.0; // worst 1 - <P_code> on the control mode
};
GateFidelity bpcnot_gate_fidelity(const SimScenario& scenario, cplx alpha1,
                                  cplx alpha2);

enum class FourCatVariant { full, eliminated };

/// Four-photon driven-dissipative stabilizer. The full variant couples the
/// storage (mode 0) to a lossy buffer (mode 1) through g_c a^dag4 b + h.c.;
/// the eliminated variant folds the buffer into eps_4ph = -2i g_c eps_b /
/// kappa_b and kappa_4ph = 2 g_c^2 / kappa_b on the storage alone.
SimScenario build_four_cat(double g_c, double kappa_b, cplx eps_b,
                           FourCatVariant variant, int dim_storage = 14,
                           int dim_buffer = 5);

/// |alpha|^4 target of the four-cat stabilizer (2 eps / kappa).
cplx four_cat_alpha4(double g_c, double kappa_b, cplx eps_b);

/// Magnetic-drive amplitude needed for a conditional-rotation rate
/// K*|alpha2|^2/|alpha1| given g3_driven (GHz per unit eps) and the frame.
double bpcnot_required_drive(double K, cplx alpha1, cplx alpha2,
                             double g3_driven, const CoupledModeFrame& frame);

std::string sim_result_csv(const SimResult& r);
std::string sim_result_summary_json(const SimResult& r);

SimScenario parse_scenario(const std::string& json_text);
SimScenario load_scenario(const std::string& path);

} // namespace nems
