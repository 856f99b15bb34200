#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nems/circuit.hpp"

namespace nems {

enum class WaoVerdict { single_well, marginal, multi_well };

/// Outcome of the weakly-anharmonic-oscillator check.
struct WaoReport {
  bool single_well = true;
  WaoVerdict verdict = WaoVerdict::single_well;
  std::vector<double> per_branch_limits; // flux limit per branch [rad]
  double drive_headroom = std::numeric_limits<double>::infinity(); // max eps_d
  double effective_sj_energy = 0.0; // combined single-JJ ratio E_J^eff / E_L
  double effective_sj_bias = 0.0;   // combined single-JJ bias [rad]
  int minima_count = 1;             // from the brute-force scan
  std::vector<std::string> notes;
};

/// phi_e - floor((phi_e + pi)/2pi)*2pi, mapped into (-pi, pi]
/// (the -pi boundary returns +pi).
double truncate_flux(double phi_e);

/// Single-well flux limit of one single-JJ branch against the inductor:
/// pi when E_J/E_L < 1, else pi - (E_J/E_L - 1).
double single_jj_limit(double EJ_over_EL);

/// Single-well flux limit of an n-junction branch (n >= 2):
/// pi - (E_J/E_L) sin(pi/n).
double multi_jj_limit(double EJ_over_EL, int n);

/// Largest drive amplitude eps_d keeping every driven branch inside its
/// flux window; +infinity when nothing constrains it.
double drive_window(const CircuitSpec& c);

/// Counts strict local minima of the static potential on a uniform grid
/// over [-window, window], with every branch evaluated in the
/// phase-slip-aware periodic form. points >= 1001.
int brute_force_minima(const CircuitSpec& c, double window = 4.712388980384690,
                       int points = 20001);

/// Phase-slip transition energy of one junction,
/// sqrt(2/pi) (8^3 EJ^3 EC)^(1/4) exp(-sqrt(8 EJ/EC)), in GHz.
double phase_slip_energy(double EJ, double EC_junction);

/// Combined verdict: per-branch analytic limits AND the effective
/// single-JJ condition AND the brute-force scan, with a +-0.05 rad
/// marginal band around each analytic limit.
WaoReport wao_check(const CircuitSpec& c);

std::string wao_report_json(const WaoReport& r);

} // namespace nems
