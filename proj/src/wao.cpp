#include "nems/wao.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nems/potential.hpp"

namespace nems {

namespace {
constexpr double pi = std::numbers::pi;
constexpr double marginal_band = 0.05; // rad; the analytic limits are approximate
} // namespace

double truncate_flux(double phi_e) {
  double t = phi_e - 2.0 * pi * std::floor((phi_e + pi) / (2.0 * pi));
  if (t <= -pi) t += 2.0 * pi;
  return t;
}

double single_jj_limit(double EJ_over_EL) {
  if (!(EJ_over_EL > 0.0))
    throw validation_error("junction ratio must be positive");
  if (EJ_over_EL <= 1.0) return pi;
  return pi - (EJ_over_EL - 1.0);
}

double multi_jj_limit(double EJ_over_EL, int n) {
  if (n < 2) throw validation_error("multi-JJ limit needs n >= 2");
  return pi - EJ_over_EL * std::sin(pi / n);
}

namespace {

double branch_limit(const JosephsonBranch& b) {
  return b.n == 1 ? single_jj_limit(b.r) : multi_jj_limit(b.r, b.n);
}

} // namespace

double drive_window(const CircuitSpec& c) {
  double eps = std::numeric_limits<double>::infinity();
  for (const auto& b : c.branches) {
    if (b.ac_ratio == 0.0) continue;
    // a sub-critical single junction keeps the well single at any flux
    if (b.n == 1 && b.r <= 1.0) continue;
    const double lim = branch_limit(b);
    const double slack = lim - std::abs(truncate_flux(b.dc_bias));
    if (slack <= 0.0) return 0.0;
    eps = std::min(eps, slack / std::abs(b.ac_ratio));
  }
  return eps;
}

int brute_force_minima(const CircuitSpec& c, double window, int points) {
  if (points < 1001) throw validation_error("minima scan needs >= 1001 points");
  std::vector<double> u(points);
  const double h = 2.0 * window / (points - 1);
  for (int i = 0; i < points; ++i)
    u[i] = u_static(c, -window + i * h, /*force_periodic=*/true);
  int count = 0;
  for (int i = 1; i + 1 < points; ++i)
    if (u[i] < u[i - 1] && u[i] < u[i + 1]) ++count;
  return count;
}

double phase_slip_energy(double EJ, double EC_junction) {
  if (!(EJ > 0.0) || !(EC_junction > 0.0))
    throw validation_error("phase-slip energy needs positive EJ and EC");
  const double prefactor =
      std::sqrt(2.0 / pi) * std::pow(512.0 * EJ * EJ * EJ * EC_junction, 0.25);
  return prefactor * std::exp(-std::sqrt(8.0 * EJ / EC_junction));
}

WaoReport wao_check(const CircuitSpec& c) {
  WaoReport rep;
  bool marginal = false;
  bool analytic_ok = true;

  double re = 0.0, im = 0.0; // effective single-JJ phasor
  for (const auto& b : c.branches) {
    const double lim = branch_limit(b);
    rep.per_branch_limits.push_back(lim);
    const double bias = std::abs(truncate_flux(b.dc_bias));
    // Single-JJ branches are judged through the effective combination
    // below; a pi-biased balance branch is fine when another one cancels
    // it. Multi-JJ branches are checked individually (the limit is sharp).
    if (b.n > 1) {
      if (bias > lim + marginal_band) {
        analytic_ok = false;
        rep.notes.push_back("branch flux " + std::to_string(bias) +
                            " exceeds its limit " + std::to_string(lim));
      } else if (bias > lim - marginal_band) {
        marginal = true;
      }
      if (bias > pi / 2.0 && bias <= lim - marginal_band)
        rep.notes.push_back(
            "multi-JJ branch bias exceeds the pi/2 suggestion but not the "
            "analytic limit; the analytic limit binds");
    } else {
      re += b.r * std::cos(b.dc_bias);
      im += b.r * std::sin(b.dc_bias);
    }
  }

  rep.effective_sj_energy = std::hypot(re, im);
  rep.effective_sj_bias = rep.effective_sj_energy > 1e-15 ? std::atan2(im, re) : 0.0;
  // A sub-critical effective junction keeps the well single at any flux.
  if (rep.effective_sj_energy > 1.0 + 1e-12) {
    const double lim = single_jj_limit(rep.effective_sj_energy);
    const double bias = std::abs(truncate_flux(rep.effective_sj_bias));
    if (bias > lim + marginal_band) {
      analytic_ok = false;
      rep.notes.push_back("combined single-JJ branches violate the effective "
                          "SQUID condition");
    } else if (bias > lim - marginal_band) {
      marginal = true;
    }
  }

  rep.drive_headroom = drive_window(c);
  rep.minima_count = brute_force_minima(c);
  rep.single_well = rep.minima_count == 1;

  if (!rep.single_well)
    rep.verdict = WaoVerdict::multi_well;
  else if (!analytic_ok || marginal)
    rep.verdict = WaoVerdict::marginal;
  else
    rep.verdict = WaoVerdict::single_well;
  if (!analytic_ok && rep.single_well)
    rep.notes.push_back("analytic limit violated but scan finds one minimum; "
                        "treating as marginal");
  return rep;
}

std::string wao_report_json(const WaoReport& r) {
  nlohmann::json j;
  j["single_well"] = r.single_well;
  j["verdict"] = r.verdict == WaoVerdict::single_well ? "single_well"
                 : r.verdict == WaoVerdict::marginal  ? "marginal"
                                                      : "multi_well";
  j["per_branch_limits_rad"] = r.per_branch_limits;
  if (std::isfinite(r.drive_headroom))
    j["drive_headroom"] = r.drive_headroom;
  else
    j["drive_headroom"] = "unbounded";
  j["effective_sj"] = {{"EJ_over_EL", r.effective_sj_energy},
                       {"bias_rad", r.effective_sj_bias}};
  j["minima_count"] = r.minima_count;
  j["notes"] = r.notes;
  return j.dump(2);
}

} // namespace nems
