#pragma once

#include <map>
#include <string>
#include <vector>

#include "nems/circuit.hpp"
#include "nems/potential.hpp"

namespace nems {

enum class DesignParity { odd, even };
enum class DriveRule {
  vandermonde,   // drive shares from the linear solve, one per distinct n
  proportional_n // |r_phi_ei| proportional to n_i, magnitudes from the solve
};

/// Target nonlinearity pattern plus the branch structure to realize it with.
struct DesignProblem {
  DesignParity parity = DesignParity::odd;
  std::vector<int> zero_orders;        // driven orders to cancel
  int keep_order = 3;                  // driven order to retain
  std::vector<int> static_zero_orders; // static orders to cancel, e.g. {4}
  std::vector<int> branch_ns;          // junction counts (duplicates = balance)
  double flux_scale = 0.0;             // phi_e0 [rad], even parity only
  double r_cap = 1.0;                  // largest junction ratio
  DriveRule drive_rule = DriveRule::vandermonde;
  double drive_scale = 0.0;            // |r_phi| of the first driven branch;
                                       // 0 selects 0.2 (odd) / 0.5 (even)
};

struct DesignSolution {
  std::vector<JosephsonBranch> branches; // doubled pairs for even parity
  std::map<int, double> residual_c;      // driven order -> coefficient
  double keep_coefficient = 0.0;         // achieved driven c at keep_order
  bool feasible = true;
  std::vector<std::string> diagnostics;

  /// Materialize as a circuit (ideal inductor unless n_L given).
  CircuitSpec realize(double EL_GHz = 1.0, double EC_GHz = 0.2,
                      int n_L = 0) const;
};

struct VandermondeResult {
  std::vector<double> x;
  double det = 0.0;
  double det_formula = 0.0; // product form for cross-checking
  double condition = 0.0;
  bool ill_conditioned = false;
};

/// Solves A x = targets with A_kj = 1/n_j^(2(k-1)).
/// Throws on repeated n (singular system).
VandermondeResult solve_vandermonde(const std::vector<int>& ns,
                                    const std::vector<double>& targets);

/// Odd-order engineering: biases restricted to 0 (any n) or pi (n = 1).
DesignSolution design_odd(const DesignProblem& p);

/// Even-order engineering via symmetric double branches: single-JJ pairs at
/// +-(phi_e0 + pi), n-junction pairs at +-n*phi_e0.
DesignSolution design_even(const DesignProblem& p);

DesignSolution design(const DesignProblem& p);

struct DesignReport {
  std::map<int, double> driven_c;
  std::map<int, double> static_c;
  double keep_coefficient = 0.0;
  double max_cancelled_driven = 0.0;
  double max_cancelled_static = 0.0;
  bool cancellations_hold = false; // everything requested below 1e-12
  bool single_well = false;
};

/// Re-derives the realized circuit's Taylor data and checks the requested
/// cancellations; report-only.
DesignReport verify_design(const DesignSolution& sol, const DesignProblem& p,
                           int order = 8);

DesignProblem parse_design_problem(const std::string& json_text);
DesignProblem load_design_problem(const std::string& path);
std::string design_solution_json(const DesignSolution& sol);

} // namespace nems
