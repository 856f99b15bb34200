#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nems/designer.hpp"
#include "nems/potential.hpp"
#include "nems/quantize.hpp"

using namespace nems;
namespace {
constexpr double pi = std::numbers::pi;

DesignProblem cubic_problem() {
  DesignProblem p;
  p.parity = DesignParity::odd;
  p.zero_orders = {1};
  p.keep_order = 3;
  p.static_zero_orders = {4};
  p.branch_ns = {1, 1, 3};
  return p;
}

DesignProblem quintic_problem() {
  DesignProblem p;
  p.parity = DesignParity::odd;
  p.zero_orders = {1, 3};
  p.keep_order = 5;
  p.static_zero_orders = {4};
  p.branch_ns = {1, 2, 3};
  p.drive_rule = DriveRule::proportional_n;
  return p;
}

DesignProblem quartic_problem() {
  DesignProblem p;
  p.parity = DesignParity::even;
  p.zero_orders = {2};
  p.keep_order = 4;
  p.static_zero_orders = {4};
  p.branch_ns = {1, 2};
  p.flux_scale = pi / 4.0;
  return p;
}
} // namespace

TEST_CASE("vandermonde solve and determinant identity") {
  // ns = {1,3}, cancel the first row, unit target on the second: substitute
  // back and demand tiny residuals
  auto check_residual = [](const std::vector<int>& ns,
                           const std::vector<double>& targets) {
    const VandermondeResult r = solve_vandermonde(ns, targets);
    for (std::size_t k = 0; k < ns.size(); ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < ns.size(); ++j)
        acc += std::pow(1.0 / (static_cast<double>(ns[j]) * ns[j]),
                        static_cast<double>(k)) * r.x[j];
      CHECK(std::abs(acc - targets[k]) < 1e-12);
    }
    CHECK(r.det == doctest::Approx(r.det_formula).epsilon(1e-10));
  };
  check_residual({1, 3}, {0.0, 1.0});
  check_residual({1, 2, 3}, {0.0, 0.0, 1.0});
  check_residual({1, 2, 3, 4}, {0.0, 1.0, 0.0, 0.5});
  check_residual({1}, {0.7});

  CHECK_THROWS_AS(solve_vandermonde({1, 1}, {0.0, 1.0}), validation_error);
  CHECK_THROWS_AS(solve_vandermonde({1, 2}, {0.0}), validation_error);

  // determinant formula holds through n = 6
  const VandermondeResult big =
      solve_vandermonde({1, 2, 3, 4, 5, 6},
                        {0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  CHECK(big.det == doctest::Approx(big.det_formula).epsilon(1e-10));
  CHECK_FALSE(big.ill_conditioned);
  // clustered large-n nodes push the condition number past the warning
  const VandermondeResult clustered =
      solve_vandermonde({4, 5, 6, 7, 8, 9},
                        {0.0, 0.0, 0.0, 0.0, 0.0, 1.0});
  CHECK(clustered.ill_conditioned);
}

TEST_CASE("cubic design reproduces the canonical solution") {
  const DesignSolution sol = design_odd(cubic_problem());
  REQUIRE(sol.feasible);
  REQUIRE(sol.branches.size() == 3);
  CHECK(sol.branches[0].r == doctest::Approx(1.0));
  CHECK(sol.branches[0].dc_bias == doctest::Approx(0.0));
  CHECK(sol.branches[0].ac_ratio == doctest::Approx(0.2));
  CHECK(sol.branches[1].r == doctest::Approx(28.0 / 27.0).epsilon(1e-14));
  CHECK(sol.branches[1].dc_bias == doctest::Approx(pi));
  CHECK(sol.branches[1].ac_ratio == doctest::Approx(0.0));
  CHECK(sol.branches[2].ac_ratio == doctest::Approx(-0.6));
  CHECK(sol.keep_coefficient ==
        doctest::Approx(-8.0 / 45.0).epsilon(1e-13));
}

TEST_CASE("quintic design reproduces the canonical solution") {
  const DesignSolution sol = design_odd(quintic_problem());
  REQUIRE(sol.feasible);
  CHECK(sol.branches[0].r == doctest::Approx(5.0 / 32.0).epsilon(1e-12));
  CHECK(sol.branches[0].dc_bias == doctest::Approx(pi));
  CHECK(sol.branches[0].ac_ratio == doctest::Approx(0.2));
  CHECK(sol.branches[1].r == doctest::Approx(1.0));
  CHECK(sol.branches[1].ac_ratio == doctest::Approx(0.4));
  CHECK(sol.branches[2].r == doctest::Approx(27.0 / 32.0).epsilon(1e-12));
  CHECK(sol.branches[2].ac_ratio == doctest::Approx(-0.6));
  CHECK(sol.keep_coefficient == doctest::Approx(-1.0 / 48.0).epsilon(1e-12));
}

TEST_CASE("quartic design reproduces the canonical double-branch solution") {
  const DesignSolution sol = design_even(quartic_problem());
  REQUIRE(sol.feasible);
  REQUIRE(sol.branches.size() == 4);
  CHECK(sol.branches[0].r == doctest::Approx(0.125).epsilon(1e-13));
  CHECK(sol.branches[0].dc_bias == doctest::Approx(1.25 * pi));
  CHECK(sol.branches[0].ac_ratio == doctest::Approx(0.5));
  CHECK(sol.branches[1].dc_bias == doctest::Approx(-1.25 * pi));
  CHECK(sol.branches[1].ac_ratio == doctest::Approx(-0.5));
  CHECK(sol.branches[2].r == doctest::Approx(1.0));
  CHECK(sol.branches[2].dc_bias == doctest::Approx(0.5 * pi));
  CHECK(sol.branches[2].ac_ratio == doctest::Approx(0.25));
  CHECK(sol.keep_coefficient ==
        doctest::Approx(-3.0 * std::sqrt(2.0) / 64.0).epsilon(1e-13));
}

TEST_CASE("verify_design confirms the cancellations") {
  for (const DesignProblem& p :
       {cubic_problem(), quintic_problem(), quartic_problem()}) {
    const DesignSolution sol = design(p);
    const DesignReport rep = verify_design(sol, p);
    CHECK(rep.cancellations_hold);
    CHECK(rep.max_cancelled_driven < 1e-12);
    CHECK(rep.max_cancelled_static < 1e-12);
    CHECK(rep.single_well);
    CHECK(std::abs(rep.keep_coefficient) > 1e-3);
  }
}

TEST_CASE("design round trip through quantization") {
  const DesignSolution sol = design_odd(quintic_problem());
  const CircuitSpec c = sol.realize(18.0, 0.246);
  const ModeQuantization q = quantize(c, 8);
  for (int n : {1, 2, 3, 4}) CHECK(std::abs(q.series.c_driven[n]) < 1e-12);
  CHECK(std::abs(q.g_driven[5]) > 1e-9);
}

TEST_CASE("sensitivity: a 1% branch perturbation shows up as residual") {
  DesignSolution sol = design_odd(cubic_problem());
  sol.branches[1].r *= 1.01;
  const DesignReport rep = verify_design(sol, cubic_problem());
  CHECK_FALSE(rep.cancellations_hold);
  CHECK(rep.max_cancelled_static > 1e-4);
}

TEST_CASE("two-branch degenerate cubic variant hits the extreme ratio") {
  DesignProblem p = cubic_problem();
  p.branch_ns = {1, 3};
  const DesignSolution sol = design_odd(p);
  REQUIRE(sol.feasible);
  // r1 = r3 / n3^3 with the single-junction branch flipped to a pi bias
  CHECK(sol.branches[0].r ==
        doctest::Approx(sol.branches[1].r / 27.0).epsilon(1e-12));
  CHECK(sol.branches[0].dc_bias == doctest::Approx(pi));
  const DesignReport rep = verify_design(sol, p);
  CHECK(rep.cancellations_hold);
}

TEST_CASE("single-branch sine drive needs no cancellation") {
  DesignProblem p;
  p.parity = DesignParity::odd;
  p.zero_orders = {};
  p.keep_order = 3;
  p.branch_ns = {1};
  const DesignSolution sol = design_odd(p);
  REQUIRE(sol.feasible);
  CHECK(sol.branches[0].dc_bias == doctest::Approx(0.0));
  // pure sine drive: every even driven order vanishes
  const PotentialSeries s = taylor_driven(sol.realize(), 8);
  for (int n = 2; n <= 8; n += 2) CHECK(std::abs(s.c_driven[n]) < 1e-15);
  CHECK(std::abs(s.c_driven[1]) > 0.0);
  CHECK(std::abs(s.c_driven[3]) > 0.0);
}

TEST_CASE("symmetric pair at quarter-flux gives a pure cosine drive") {
  DesignProblem p;
  p.parity = DesignParity::even;
  p.zero_orders = {};
  p.keep_order = 2;
  p.branch_ns = {1};
  p.flux_scale = pi / 2.0;
  const DesignSolution sol = design_even(p);
  REQUIRE(sol.feasible);
  const CircuitSpec c = sol.realize();
  const PotentialSeries s = taylor_driven(c, 8);
  // zero static junction contribution at this flux scale (up to the
  // floating representation of cos(3*pi/2))
  for (int n = 3; n <= 8; ++n) CHECK(std::abs(s.c_static[n]) < 1e-13);
  for (int n = 1; n <= 7; n += 2) CHECK(std::abs(s.c_driven[n]) < 1e-15);
  CHECK(std::abs(s.c_driven[2]) > 0.0);
}

TEST_CASE("zero flux scale kills every driven coefficient") {
  DesignProblem p = quartic_problem();
  p.flux_scale = 0.0;
  const DesignSolution sol = design_even(p);
  const PotentialSeries s = taylor_driven(sol.realize(), 8);
  for (int n = 1; n <= 8; ++n) CHECK(std::abs(s.c_driven[n]) < 1e-15);
}

TEST_CASE("infeasible structures are rejected") {
  DesignProblem p = cubic_problem();
  p.branch_ns = {1, 1}; // no distinct second junction count
  CHECK_THROWS_AS(design_odd(p), validation_error);

  DesignProblem q = quartic_problem();
  q.flux_scale = 0.9 * pi; // outside the n = 2 slip window
  CHECK_THROWS_AS(design_even(q), validation_error);
}

TEST_CASE("design problem JSON round trip") {
  const std::string text = R"({
    "parity": "odd", "zero_orders": [1], "keep_order": 3,
    "static_zero_orders": [4], "branch_ns": [1, 1, 3]})";
  const DesignProblem p = parse_design_problem(text);
  CHECK(p.keep_order == 3);
  CHECK(p.branch_ns.size() == 3);
  const DesignSolution sol = design(p);
  const std::string out = design_solution_json(sol);
  CHECK(out.find("\"feasible\": true") != std::string::npos);
  CHECK_THROWS_AS(parse_design_problem("{"), parse_error);
  CHECK_THROWS_AS(parse_design_problem(
                      R"({"parity":"odd","keep_order":1,
                          "zero_orders":[1],"branch_ns":[1]})"),
                  parse_error);
}
