#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nems {

/// Thrown when a config file cannot be parsed into a circuit.
struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a circuit violates a structural invariant.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One Josephson branch: n equal junctions of energy r*E_L in series,
/// with a DC flux bias and a share of the AC drive.
struct JosephsonBranch {
  double r = 1.0;        // junction energy ratio E_Ji / E_L
  int n = 1;             // junction count, >= 1
  double dc_bias = 0.0;  // phi_bar_ei [rad], stored unreduced
  double ac_ratio = 0.0; // r_phi_ei, signed drive share
  bool periodic = false; // evaluate with the phase-slip-aware truncated flux

  /// Bias truncated into (-pi, pi].
  double truncated_bias() const;

  /// Sign variable used by the odd/even-order expansions:
  /// -1 only for a single junction biased at pi, +1 otherwise.
  int sign() const;
};

enum class DrivePolicy { strict, warn };

/// AC flux drive epsilon(t) = amplitude * cos(2*pi*frequency*t + phase).
struct DriveSpec {
  double amplitude = 0.0; // dimensionless eps_d, >= 0
  double frequency = 1.0; // GHz, > 0
  double phase = 0.0;     // rad
};

/// Full multi-loop SQUID description. Immutable after load; cheap to copy.
///
/// The inductor branch is either a physical array of inductor_n junctions of
/// energy inductor_EJL each (E_L = E_JL / n_L), or an ideal linear inductor
/// when inductor_n == 0, in which case inductor_EJL is E_L itself.
struct CircuitSpec {
  double inductor_EJL = 1.0;  // GHz (per junction when inductor_n >= 1)
  int inductor_n = 0;         // n_L; 0 selects the ideal quadratic inductor
  double charging_energy = 0; // E_C [GHz]
  std::vector<JosephsonBranch> branches;
  DrivePolicy drive_normalization_policy = DrivePolicy::warn;
  std::optional<DriveSpec> drive;

  double EL() const {
    return inductor_n > 0 ? inductor_EJL / inductor_n : inductor_EJL;
  }
  bool ideal_inductor() const { return inductor_n == 0; }

  /// Sum of |ac_ratio| over branches (the paper's own examples do not
  /// always normalize this to 1).
  double drive_ratio_sum() const;

  /// Checks all invariants. Throws validation_error under strict policy
  /// violations; returns human-readable diagnostics under warn policy.
  std::vector<std::string> validate() const;
};

/// Residual electromotive-force coefficient from the junction capacitors,
/// sum_i r_i * r_phi_ei / n_i. Zero means flux drive induces no charge drive.
double emf_residual(const CircuitSpec& c);

/// Load a circuit from a JSON config file (schema in docs/formats.md).
CircuitSpec load_circuit(const std::string& path);

/// Parse a circuit from a JSON string.
CircuitSpec parse_circuit(const std::string& json_text);

/// Serialize back to the JSON config schema.
std::string serialize_circuit(const CircuitSpec& c);

/// Compiled-in presets: "nems3", "nems4", "nems5", "ats", "sts" plus the
/// Kerr-cat comparison circuits "nems3-cat", "ats-cat", "snail".
/// Throws validation_error for unknown names.
CircuitSpec preset_circuit(const std::string& name);

/// Names accepted by preset_circuit, in stable order.
std::vector<std::string> preset_names();

/// Resolve either a preset name or a config path.
CircuitSpec resolve_circuit(const std::string& name_or_path);

bool approx_equal(const CircuitSpec& a, const CircuitSpec& b, double tol = 1e-12);

} // namespace nems
