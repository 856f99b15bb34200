#pragma once

#include <map>

#include "nems/circuit.hpp"
#include "nems/potential.hpp"
#include "nems/quantize.hpp"

namespace nems {

/// Harmonic content of the exact driven potential at drive amplitude eps_d,
/// each component Taylor-expanded about the static minimum:
///   U(phi,t) = U_static + dc_shift(phi)
///              + sum_k harmonics[k](phi) * cos(k * omega_d * t)
/// Series store the coefficients in their c_static slots (units E_L).
struct HarmonicDecomposition {
  double amplitude = 0.0;
  PotentialSeries dc_shift;
  std::map<int, PotentialSeries> harmonics; // k = 1, 2, 3
};

/// Exact Bessel-function decomposition of the flux drive (full J_n values;
/// the cubic truncation is their small-amplitude limit).
/// Throws when eps_d exceeds the circuit's drive window.
HarmonicDecomposition bessel_decompose(const CircuitSpec& c, double eps_d,
                                       int order = 8);

struct DriveShifts {
  double delta_omega = 0.0; // GHz
  double delta_kerr = 0.0;  // GHz
};

/// Drive-induced frequency and Kerr shifts from the DC component of the
/// decomposition (re-minimized and re-quantized); works for any circuit.
DriveShifts strong_drive_shifts(const CircuitSpec& c, double eps_d);

/// The specialized closed-form estimates for the three-branch cubic scheme
/// (first branch single-JJ, last branch multi-JJ, per-loop amplitude 0.1*eps).
DriveShifts strong_drive_shifts_formula(const CircuitSpec& c, double eps_d);

/// Two-photon drive coefficient induced by shifting the first branch's DC
/// bias by delta_phi_e1: returns g2_driven per unit eps [GHz]. The linear
/// regime holds for |delta| <= 0.1*pi; *small_regime reports it when given.
double deformed_two_photon(const CircuitSpec& c, double delta_phi_e1,
                           bool* small_regime = nullptr);

/// |g_n(c1) / g_n(c2)|^2 — relative multi-photon dissipation strength under
/// the same drive-line zero-point amplitude. Infinity on zero denominator.
double relative_dissipation(const CircuitSpec& c1, const CircuitSpec& c2,
                            int order);

/// Drive-harmonics table (CSV) for the CLI.
std::string harmonics_csv(const HarmonicDecomposition& h);

} // namespace nems
