#include "nems/designer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "nems/wao.hpp"

namespace nems {

namespace {
constexpr double pi = std::numbers::pi;

struct infeasible_error : validation_error {
  using validation_error::validation_error;
};

// Solves sum_j w_j / n_j^o = rhs_o over the given orders (unit keep target).
std::vector<double> solve_weights(const std::vector<int>& ns,
                                  const std::vector<int>& orders,
                                  int keep_order) {
  const int m = static_cast<int>(ns.size());
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < m; ++j)
      A(k, j) = std::pow(static_cast<double>(ns[j]), -orders[k]);
    if (orders[k] == keep_order) rhs(k) = 1.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible())
    throw infeasible_error("driven-order system is singular");
  Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + m};
}

} // namespace

VandermondeResult solve_vandermonde(const std::vector<int>& ns,
                                    const std::vector<double>& targets) {
  const int m = static_cast<int>(ns.size());
  if (m == 0 || targets.size() != ns.size())
    throw validation_error("vandermonde solve needs |ns| == |targets| > 0");
  {
    std::set<int> uniq(ns.begin(), ns.end());
    if (static_cast<int>(uniq.size()) != m)
      throw validation_error("repeated junction count makes the Vandermonde "
                             "matrix singular");
  }

  Eigen::MatrixXd A(m, m);
  for (int k = 0; k < m; ++k)
    for (int j = 0; j < m; ++j)
      A(k, j) = std::pow(1.0 / (static_cast<double>(ns[j]) * ns[j]), k);

  VandermondeResult r;
  r.det_formula = 1.0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      const double zi = 1.0 / (static_cast<double>(ns[i]) * ns[i]);
      const double zj = 1.0 / (static_cast<double>(ns[j]) * ns[j]);
      r.det_formula *= zj - zi;
    }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  r.det = lu.determinant();
  Eigen::Map<const Eigen::VectorXd> b(targets.data(), m);
  Eigen::VectorXd x = lu.solve(b);
  r.x.assign(x.data(), x.data() + m);

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  r.condition = sv(0) / sv(m - 1);
  r.ill_conditioned = r.condition > 1e8;
  return r;
}

namespace {

DesignSolution design_odd_impl(const DesignProblem& p) {
  for (int o : p.zero_orders)
    if (o % 2 == 0)
      throw validation_error("odd design can only cancel odd driven orders");
  if (p.keep_order % 2 == 0)
    throw validation_error("odd design keeps an odd order");
  for (int o : p.zero_orders)
    if (o == p.keep_order)
      throw validation_error("keep_order cannot be in zero_orders");

  const double drive_scale = p.drive_scale > 0 ? p.drive_scale : 0.2;

  std::vector<int> orders = p.zero_orders;
  orders.push_back(p.keep_order);
  std::sort(orders.begin(), orders.end());
  const int k = static_cast<int>(orders.size());

  // First occurrence of each distinct n is a driven branch (up to k of
  // them); the rest only balance the static nonlinearity.
  std::vector<int> drive_idx, balance_idx;
  std::set<int> seen;
  for (std::size_t i = 0; i < p.branch_ns.size(); ++i) {
    const int n = p.branch_ns[i];
    if (n < 1) throw validation_error("junction counts must be >= 1");
    if (!seen.count(n) && static_cast<int>(drive_idx.size()) < k) {
      seen.insert(n);
      drive_idx.push_back(static_cast<int>(i));
    } else {
      balance_idx.push_back(static_cast<int>(i));
    }
  }
  if (static_cast<int>(drive_idx.size()) < k)
    throw infeasible_error("need at least " + std::to_string(k) +
                           " branches with distinct junction counts");

  std::vector<int> drive_ns;
  for (int i : drive_idx) drive_ns.push_back(p.branch_ns[i]);
  // w_j = s_j r_j r_phi_j, from sum_j w_j / n_j^o = 0 (cancel) / 1 (keep)
  std::vector<double> w = solve_weights(drive_ns, orders, p.keep_order);

  DesignSolution sol;
  sol.branches.assign(p.branch_ns.size(), JosephsonBranch{});
  for (std::size_t i = 0; i < p.branch_ns.size(); ++i)
    sol.branches[i].n = p.branch_ns[i];

  const int nd = static_cast<int>(drive_idx.size());
  std::vector<double> r(p.branch_ns.size(), 0.0), s(p.branch_ns.size(), 1.0);
  std::vector<double> rphi(p.branch_ns.size(), 0.0);

  if (p.drive_rule == DriveRule::proportional_n) {
    if (!balance_idx.empty())
      throw validation_error(
          "proportional drive rule expects only distinct junction counts");
    // |r_phi_j| = n_j * kappa; the solve fixes u_j = s_j d_j r_j.
    std::vector<double> u(nd);
    for (int j = 0; j < nd; ++j) u[j] = w[j] / drive_ns[j];
    double umax = 0.0;
    for (double v : u) umax = std::max(umax, std::abs(v));
    if (umax <= 0.0) throw infeasible_error("degenerate drive solution");
    for (int j = 0; j < nd; ++j) {
      const int i = drive_idx[j];
      r[i] = std::abs(u[j]) / umax * p.r_cap;
      if (r[i] <= 0.0)
        throw infeasible_error("a driven branch came out with zero size");
    }
    // Static conditions decide the n = 1 bias signs; multi-JJ stays at 0.
    // Try both sign choices for each single-JJ driven branch.
    std::vector<int> free_sj;
    for (int j = 0; j < nd; ++j)
      if (drive_ns[j] == 1) free_sj.push_back(j);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_s(nd, 1.0);
    const int combos = 1 << free_sj.size();
    for (int mask = 0; mask < combos; ++mask) {
      std::vector<double> strial(nd, 1.0);
      for (std::size_t b = 0; b < free_sj.size(); ++b)
        if (mask & (1 << b)) strial[free_sj[b]] = -1.0;
      double worst = 0.0;
      for (int mo : p.static_zero_orders) {
        double acc = 0.0;
        for (int j = 0; j < nd; ++j)
          acc += strial[j] * r[drive_idx[j]] /
                 std::pow(static_cast<double>(drive_ns[j]), mo - 1);
        worst = std::max(worst, std::abs(acc));
      }
      if (worst < best) {
        best = worst;
        best_s = strial;
      }
    }
    if (!p.static_zero_orders.empty() && best > 1e-9)
      throw infeasible_error("static cancellation unreachable with this "
                             "structure (residual " +
                             std::to_string(best) + ")");
    for (int j = 0; j < nd; ++j) {
      const int i = drive_idx[j];
      s[i] = best_s[j];
      const double d = (u[j] == 0.0 ? 1.0 : (u[j] < 0 ? -1.0 : 1.0)) * s[i];
      rphi[i] = d * drive_ns[j] * drive_scale;
    }
    // Drive orientation convention: first driven branch share positive.
    if (rphi[drive_idx[0]] < 0.0)
      for (int j = 0; j < nd; ++j) rphi[drive_idx[j]] = -rphi[drive_idx[j]];
  } else {
    // Fixed-size driven branches; shares scaled to the first branch.
    if (std::abs(w[0]) <= 0.0)
      throw infeasible_error("first driven branch carries no drive");
    const bool have_balance = !balance_idx.empty();
    for (int j = 0; j < nd; ++j) r[drive_idx[j]] = p.r_cap;

    if (!have_balance && !p.static_zero_orders.empty()) {
      // No balance branches: absorb the static conditions into the driven
      // branch sizes (single static condition supported).
      if (p.static_zero_orders.size() != 1 || nd != 2)
        throw infeasible_error(
            "static cancellation without balance branches needs exactly two "
            "driven branches and one condition");
      const int mo = p.static_zero_orders[0];
      // s0 r0 = -(s1 r1 / n1^(mo-1)) * n0^(mo-1), pin the larger-n branch.
      const int big = drive_ns[0] > drive_ns[1] ? 0 : 1;
      const int small = 1 - big;
      r[drive_idx[big]] = p.r_cap;
      const double need =
          -r[drive_idx[big]] /
          std::pow(static_cast<double>(drive_ns[big]), mo - 1) *
          std::pow(static_cast<double>(drive_ns[small]), mo - 1);
      s[drive_idx[small]] = need < 0 ? -1.0 : 1.0;
      r[drive_idx[small]] = std::abs(need);
      if (drive_ns[small] != 1 && s[drive_idx[small]] < 0)
        throw infeasible_error("a multi-JJ branch would need a pi bias");
    }
    for (int j = 0; j < nd; ++j) {
      const int i = drive_idx[j];
      rphi[i] = w[j] / (s[i] * r[i]);
    }
    const double scale = drive_scale / rphi[drive_idx[0]];
    for (int j = 0; j < nd; ++j) rphi[drive_idx[j]] *= scale;

    if (have_balance && !p.static_zero_orders.empty()) {
      const int nb = static_cast<int>(balance_idx.size());
      const int mc = static_cast<int>(p.static_zero_orders.size());
      if (nb < mc)
        throw infeasible_error("not enough balance branches for the "
                               "requested static cancellations");
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(mc, nb);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mc);
      for (int q = 0; q < mc; ++q) {
        const int mo = p.static_zero_orders[q];
        for (int jb = 0; jb < nb; ++jb)
          B(q, jb) =
              std::pow(static_cast<double>(p.branch_ns[balance_idx[jb]]),
                       -(mo - 1));
        for (int j = 0; j < nd; ++j)
          rhs(q) -= s[drive_idx[j]] * r[drive_idx[j]] /
                    std::pow(static_cast<double>(drive_ns[j]), mo - 1);
      }
      Eigen::VectorXd v =
          B.colPivHouseholderQr().solve(rhs); // signed s_j * r_j
      for (int jb = 0; jb < nb; ++jb) {
        const int i = balance_idx[jb];
        if (std::abs(v(jb)) < 1e-15)
          throw infeasible_error("balance branch came out with zero size");
        s[i] = v(jb) < 0 ? -1.0 : 1.0;
        r[i] = std::abs(v(jb));
        if (p.branch_ns[i] != 1 && s[i] < 0)
          throw infeasible_error("a multi-JJ balance branch would need a pi "
                                 "bias");
      }
    }
  }

  for (std::size_t i = 0; i < p.branch_ns.size(); ++i) {
    sol.branches[i].r = r[i];
    sol.branches[i].dc_bias = s[i] < 0 ? pi : 0.0;
    sol.branches[i].ac_ratio = rphi[i];
    if (!(r[i] > 0.0)) {
      sol.feasible = false;
      sol.diagnostics.push_back("branch " + std::to_string(i) +
                                " has non-positive size");
    }
  }
  return sol;
}

DesignSolution design_even_impl(const DesignProblem& p) {
  for (int o : p.zero_orders)
    if (o % 2 == 1)
      throw validation_error("even design can only cancel even driven orders");
  if (p.keep_order % 2 == 1)
    throw validation_error("even design keeps an even order");
  {
    std::set<int> uniq(p.branch_ns.begin(), p.branch_ns.end());
    if (uniq.size() != p.branch_ns.size())
      throw validation_error("even design expects one pair per junction count");
  }
  const double drive_scale = p.drive_scale > 0 ? p.drive_scale : 0.5;
  const double phi_e0 = p.flux_scale;
  int n_max = 1;
  for (int n : p.branch_ns) n_max = std::max(n_max, n);
  if (std::abs(phi_e0) >= pi / n_max)
    throw infeasible_error("flux scale phi_e0 exceeds the phase-slip window "
                           "pi/n of the largest branch");

  std::vector<int> orders = p.zero_orders;
  orders.push_back(p.keep_order);
  std::sort(orders.begin(), orders.end());
  if (orders.size() != p.branch_ns.size())
    throw infeasible_error("even design needs one pair per constrained order");

  // w_j = s_j r_j r_phi_j per pair; s = -1 for the pi-shifted single-JJ
  // pairs, +1 for multi-JJ pairs.
  std::vector<double> w =
      solve_weights(p.branch_ns, orders, p.keep_order);

  const int np = static_cast<int>(p.branch_ns.size());
  std::vector<double> s(np), r(np, 0.0), rphi(np);
  for (int j = 0; j < np; ++j) s[j] = p.branch_ns[j] == 1 ? -1.0 : 1.0;

  // Static conditions fix the size ratios: sum_j s_j r_j / n_j^(m-1) = 0.
  const int mc = static_cast<int>(p.static_zero_orders.size());
  if (mc > np - 1)
    throw infeasible_error("too many static conditions for this structure");
  if (mc == 0) {
    for (int j = 0; j < np; ++j) r[j] = p.r_cap;
  } else {
    // Solve the homogeneous system for the ratio vector, pinning the last
    // pair to r_cap.
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(mc, np - 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(mc);
    for (int q = 0; q < mc; ++q) {
      const int mo = p.static_zero_orders[q];
      for (int j = 0; j + 1 < np; ++j)
        B(q, j) = s[j] / std::pow(static_cast<double>(p.branch_ns[j]), mo - 1);
      rhs(q) = -s[np - 1] * p.r_cap /
               std::pow(static_cast<double>(p.branch_ns[np - 1]), mo - 1);
    }
    Eigen::VectorXd v = B.colPivHouseholderQr().solve(rhs);
    for (int j = 0; j + 1 < np; ++j) {
      if (!(v(j) > 0.0))
        throw infeasible_error("static cancellation demands a non-positive "
                               "junction size");
      r[j] = v(j);
    }
    r[np - 1] = p.r_cap;
    double rmax = 0.0;
    for (double x : r) rmax = std::max(rmax, x);
    for (auto& x : r) x *= p.r_cap / rmax;
  }

  for (int j = 0; j < np; ++j) rphi[j] = w[j] / (s[j] * r[j]);
  const double scale = drive_scale / rphi[0];
  for (int j = 0; j < np; ++j) rphi[j] *= scale;

  DesignSolution sol;
  if (std::abs(std::sin(phi_e0)) < 1e-15)
    sol.diagnostics.push_back(
        "sin(phi_e0) = 0: all driven coefficients vanish at this flux scale");
  sol.diagnostics.push_back(
      "driven strength carries the sin(phi_e0) = " +
      std::to_string(std::sin(phi_e0)) + " flux-window penalty");
  for (int j = 0; j < np; ++j) {
    JosephsonBranch a, b;
    a.r = b.r = r[j];
    a.n = b.n = p.branch_ns[j];
    if (p.branch_ns[j] == 1) {
      a.dc_bias = phi_e0 + pi;
      b.dc_bias = -(phi_e0 + pi);
    } else {
      a.dc_bias = p.branch_ns[j] * phi_e0;
      b.dc_bias = -p.branch_ns[j] * phi_e0;
    }
    a.ac_ratio = rphi[j];
    b.ac_ratio = -rphi[j];
    sol.branches.push_back(a);
    sol.branches.push_back(b);
  }
  return sol;
}

} // namespace

CircuitSpec DesignSolution::realize(double EL_GHz, double EC_GHz,
                                    int n_L) const {
  CircuitSpec c;
  if (n_L > 0) {
    c.inductor_EJL = EL_GHz * n_L;
    c.inductor_n = n_L;
  } else {
    c.inductor_EJL = EL_GHz;
    c.inductor_n = 0;
  }
  c.charging_energy = EC_GHz;
  c.branches = branches;
  return c;
}

DesignSolution design_odd(const DesignProblem& p) {
  DesignSolution sol = design_odd_impl(p);
  const DesignReport rep = verify_design(sol, p);
  sol.residual_c = rep.driven_c;
  sol.keep_coefficient = rep.keep_coefficient;
  if (!rep.cancellations_hold) {
    sol.feasible = false;
    sol.diagnostics.push_back("requested cancellations do not hold");
  }
  if (!rep.single_well) {
    sol.feasible = false;
    sol.diagnostics.push_back("realized circuit is not a single well");
  }
  return sol;
}

DesignSolution design_even(const DesignProblem& p) {
  DesignSolution sol = design_even_impl(p);
  const DesignReport rep = verify_design(sol, p);
  sol.residual_c = rep.driven_c;
  sol.keep_coefficient = rep.keep_coefficient;
  if (!rep.cancellations_hold) {
    sol.feasible = false;
    sol.diagnostics.push_back("requested cancellations do not hold");
  }
  if (!rep.single_well) {
    sol.feasible = false;
    sol.diagnostics.push_back("realized circuit is not a single well");
  }
  return sol;
}

DesignSolution design(const DesignProblem& p) {
  return p.parity == DesignParity::odd ? design_odd(p) : design_even(p);
}

DesignReport verify_design(const DesignSolution& sol, const DesignProblem& p,
                           int order) {
  DesignReport rep;
  CircuitSpec c = sol.realize();
  const PotentialSeries s = taylor_driven(c, order);
  for (int n = 1; n <= order; ++n) {
    rep.driven_c[n] = s.c_driven[n];
    rep.static_c[n] = s.c_static[n];
  }
  rep.keep_coefficient =
      p.keep_order <= order ? s.c_driven[p.keep_order] : 0.0;
  for (int o : p.zero_orders)
    if (o <= order)
      rep.max_cancelled_driven =
          std::max(rep.max_cancelled_driven, std::abs(s.c_driven[o]));
  for (int m : p.static_zero_orders)
    if (m <= order)
      rep.max_cancelled_static =
          std::max(rep.max_cancelled_static, std::abs(s.c_static[m]));
  rep.cancellations_hold =
      rep.max_cancelled_driven < 1e-12 && rep.max_cancelled_static < 1e-12;
  rep.single_well = brute_force_minima(c) == 1;
  return rep;
}

DesignProblem parse_design_problem(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed design problem: ") + e.what());
  }
  DesignProblem p;
  const std::string parity = j.value("parity", "odd");
  if (parity == "odd")
    p.parity = DesignParity::odd;
  else if (parity == "even")
    p.parity = DesignParity::even;
  else
    throw parse_error("parity must be 'odd' or 'even'");
  p.zero_orders = j.value("zero_orders", std::vector<int>{});
  p.keep_order = j.at("keep_order").get<int>();
  p.static_zero_orders = j.value("static_zero_orders", std::vector<int>{});
  p.branch_ns = j.at("branch_ns").get<std::vector<int>>();
  p.flux_scale = j.value("flux_scale_rad", 0.0);
  p.r_cap = j.value("r_cap", 1.0);
  p.drive_scale = j.value("drive_scale", 0.0);
  const std::string rule = j.value("drive_rule", "vandermonde");
  if (rule == "vandermonde")
    p.drive_rule = DriveRule::vandermonde;
  else if (rule == "proportional_n")
    p.drive_rule = DriveRule::proportional_n;
  else
    throw parse_error("drive_rule must be 'vandermonde' or 'proportional_n'");
  for (int o : p.zero_orders)
    if (o == p.keep_order)
      throw parse_error("keep_order cannot be in zero_orders");
  return p;
}

DesignProblem load_design_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open design problem '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_design_problem(ss.str());
}

std::string design_solution_json(const DesignSolution& sol) {
  nlohmann::json j;
  j["feasible"] = sol.feasible;
  j["keep_coefficient"] = sol.keep_coefficient;
  j["diagnostics"] = sol.diagnostics;
  nlohmann::json res = nlohmann::json::object();
  for (const auto& [o, v] : sol.residual_c) res[std::to_string(o)] = v;
  j["residual_c"] = res;
  j["circuit"] = nlohmann::json::parse(serialize_circuit(sol.realize()));
  return j.dump(2);
}

} // namespace nems
