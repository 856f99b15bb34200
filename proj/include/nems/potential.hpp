#pragma once

#include <stdexcept>
#include <vector>

#include "nems/circuit.hpp"

namespace nems {

struct no_minimum_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Taylor data of the inductive potential about its static minimum.
/// Coefficients are dimensionless (units of E_L) with the convention
///   U_static/E_L = c0 + sum_{n>=2} c_static[n]/n! (phi - phi_star)^n
///   U_driven/E_L = eps(t) * sum_n c_driven[n]/n! (phi - phi_star)^n
struct PotentialSeries {
  double phi_star = 0.0;
  std::vector<double> c_static; // index n = 0..order
  std::vector<double> c_driven; // index n = 0..order
  int order = 0;
  double well_depth = 0.0; // barrier height above the minimum, units E_L
};

/// -n*r*cos(phi_trunc/n) with phi_trunc the 2pi-truncated branch flux.
/// 2pi-periodic in phi_J; the slope is discontinuous at the slip boundary.
double u_branch_periodic(double r, int n, double phi_J);

/// Total inductive potential in units of E_L at instantaneous loop fluxes.
/// flux_offsets must have one entry per branch. Branches flagged `periodic`
/// use the phase-slip-aware form.
double u_total(const CircuitSpec& c, double phi,
               const std::vector<double>& flux_offsets);

/// Static potential (flux offsets = DC biases), units of E_L.
/// force_periodic evaluates every branch in the truncated form regardless
/// of its flag; the smooth form is what Taylor expansions refer to.
double u_static(const CircuitSpec& c, double phi, bool force_periodic = false);

/// First derivative of the smooth static potential, units of E_L per rad.
double u_static_deriv(const CircuitSpec& c, double phi);

/// k-th derivative (k >= 0) of the smooth static potential, inductor
/// included.
double u_static_deriv_k(const CircuitSpec& c, double phi, int k);

/// k-th derivative (k >= 0) of one branch's smooth potential term
/// -n*r*cos((phi + dc_bias)/n).
double branch_potential_deriv(const JosephsonBranch& b, double phi, int k);

/// k-th derivative of one branch's first-order drive term
/// r*sin((phi + dc_bias)/n) (per unit eps and unit ac_ratio share applied
/// separately by callers).
double branch_drive_deriv(const JosephsonBranch& b, double phi, int k);

struct MinimumResult {
  double phi_star = 0.0;
  int minima_in_window = 1;
  bool parity_symmetric = false;
};

/// Locate the static minimum: exact 0 for parity-symmetric potentials,
/// otherwise bracketing plus Newton polish to |U'| < 1e-12.
/// Throws no_minimum_error when no interior minimum brackets.
MinimumResult find_minimum_detailed(const CircuitSpec& c,
                                    double window = 4.712388980384690);
double find_minimum(const CircuitSpec& c);

/// True when the static potential is even about phi = 0 (per-branch even
/// biases or exact opposite-bias pairs).
bool static_potential_is_even(const CircuitSpec& c);

/// Analytic Taylor coefficients of the static potential about phi_star.
PotentialSeries taylor_static(const CircuitSpec& c, int order = 8);

/// Adds the driven coefficients (per unit eps) to the static series.
PotentialSeries taylor_driven(const CircuitSpec& c, int order = 8);

/// CSV emitters: (phi, U) curve and (n, c_static, c_driven) table.
std::string potential_curve_csv(const CircuitSpec& c, double lo, double hi,
                                int samples, bool periodic = false);
std::string series_csv(const PotentialSeries& s);

} // namespace nems
