#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "nems/circuit.hpp"
#include "nems/designer.hpp"
#include "nems/drivetools.hpp"
#include "nems/dynamics.hpp"
#include "nems/potential.hpp"
#include "nems/quantize.hpp"
#include "nems/report.hpp"
#include "nems/wao.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

void write_or_print(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::string quantization_table(const nems::ModeQuantization& q,
                               const nems::WaoReport& wao) {
  std::ostringstream out;
  out.precision(6);
  out << "omega_static   " << q.omega_static << " GHz\n";
  out << "phi_zpf        " << q.phi_zpf << "\n";
  out << "n_zpf          " << q.n_zpf << "\n";
  out << "phi_star       " << q.series.phi_star << " rad\n";
  out << "kerr_static    " << q.kerr_static * 1e3 << " MHz\n";
  out << "well_depth     " << q.series.well_depth << " E_L\n";
  for (std::size_t n = 3; n < q.g_static.size(); ++n)
    out << "g" << n << "_static      " << q.g_static[n] * 1e3 << " MHz\n";
  for (std::size_t n = 1; n < q.g_driven.size(); ++n)
    out << "g" << n << "_driven      " << q.g_driven[n] * 1e3
        << " MHz per eps\n";
  out << "single_well    " << (wao.single_well ? "yes" : "no") << "\n";
  out << "wao_verdict    "
      << (wao.verdict == nems::WaoVerdict::single_well ? "single_well"
          : wao.verdict == nems::WaoVerdict::marginal  ? "marginal"
                                                       : "multi_well")
      << "\n";
  if (std::isfinite(wao.drive_headroom))
    out << "drive_headroom " << wao.drive_headroom << "\n";
  else
    out << "drive_headroom unbounded\n";
  return out.str();
}

int parse_axis(const std::string& axis) {
  if (axis.rfind("phi_e", 0) == 0) return std::stoi(axis.substr(5)) - 1;
  return std::stoi(axis);
}

int cmd_analyze(const std::string& target, int order, bool force,
                const std::string& format, const std::string& out_path) {
  const nems::CircuitSpec c = nems::resolve_circuit(target);
  for (const auto& d : c.validate()) std::cerr << d << "\n";
  const nems::WaoReport wao = nems::wao_check(c);
  if (!wao.single_well && !force) {
    std::cerr << "not a single-well operating point (use --force to analyze "
                 "anyway)\n";
    return exit_validation;
  }
  const nems::ModeQuantization q = nems::quantize(c, order);
  if (format == "json") {
    nlohmann::json j = nlohmann::json::parse(nems::quantization_json(q));
    j["wao"] = nlohmann::json::parse(nems::wao_report_json(wao));
    write_or_print(j.dump(2) + "\n", out_path);
  } else if (format == "csv") {
    write_or_print(nems::series_csv(q.series), out_path);
  } else {
    write_or_print(quantization_table(q, wao), out_path);
  }
  return exit_ok;
}

int cmd_report(int table, const std::string& fixtures,
               const std::string& format, const std::string& out_path) {
  std::string fixtures_json;
  if (!fixtures.empty()) {
    std::ifstream in(fixtures);
    if (!in) throw nems::parse_error("cannot open fixtures '" + fixtures + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    fixtures_json = ss.str();
  }
  const nems::TableReport rep = nems::run_table_report(table, fixtures_json);
  if (format == "json")
    write_or_print(nems::table_report_json(rep) + "\n", out_path);
  else if (format == "csv")
    write_or_print(nems::table_report_csv(rep), out_path);
  else
    write_or_print(nems::table_report_text(rep), out_path);
  return rep.pass ? exit_ok : exit_numerical;
}

int cmd_simulate(const std::string& scenario_path, const std::string& sweep,
                 const std::string& out_prefix) {
  std::ifstream in(scenario_path);
  if (!in)
    throw nems::parse_error("cannot open scenario '" + scenario_path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();

  if (sweep.empty()) {
    nems::SimScenario s = nems::parse_scenario(text);
    const nems::SimResult res = nems::evolve(s);
    write_or_print(nems::sim_result_csv(res),
                   out_prefix.empty() ? "" : out_prefix + "_series.csv");
    const std::string summary = nems::sim_result_summary_json(res) + "\n";
    if (out_prefix.empty())
      std::cout << summary;
    else {
      write_or_print(summary, out_prefix + "_summary.json");
      std::cout << summary;
    }
    return exit_ok;
  }

  const auto eq = sweep.find('=');
  const auto c1 = sweep.find(':');
  const auto c2 = sweep.find(':', c1 + 1);
  if (eq == std::string::npos || c1 == std::string::npos ||
      c2 == std::string::npos)
    throw nems::parse_error("--sweep expects key=lo:hi:n");
  const std::string key = sweep.substr(0, eq);
  const double lo = std::stod(sweep.substr(eq + 1, c1 - eq - 1));
  const double hi = std::stod(sweep.substr(c1 + 1, c2 - c1 - 1));
  const int n = std::stoi(sweep.substr(c2 + 1));
  if (n < 2) throw nems::parse_error("--sweep needs at least 2 points");

  nlohmann::json base = nlohmann::json::parse(text);
  std::ostringstream table;
  table.precision(10);
  const bool gate = base.value("kind", "custom") == std::string("bpcnot");
  table << key << (gate ? ",avg_gate_fidelity,control_leakage" : ",summary")
        << "\n";
  for (int i = 0; i < n; ++i) {
    const double value = lo + (hi - lo) * i / (n - 1);
    nlohmann::json point = base;
    point[key] = value;
    nems::SimScenario s = nems::parse_scenario(point.dump());
    if (gate) {
      const nems::cplx a1(point.at("alpha1").is_number()
                              ? point.at("alpha1").get<double>()
                              : point.at("alpha1").at(0).get<double>(),
                          0.0);
      const nems::cplx a2(point.at("alpha2").is_number()
                              ? point.at("alpha2").get<double>()
                              : point.at("alpha2").at(0).get<double>(),
                          0.0);
      const nems::GateFidelity f = nems::bpcnot_gate_fidelity(s, a1, a2);
      table << value << "," << f.average << "," << f.control_leakage << "\n";
      std::cerr << key << " = " << value << " -> F = " << f.average << "\n";
    } else {
      const nems::SimResult res = nems::evolve(s);
      nlohmann::json j =
          nlohmann::json::parse(nems::sim_result_summary_json(res));
      table << value << ",\"" << j["final"].dump() << "\"\n";
    }
  }
  write_or_print(table.str(),
                 out_prefix.empty() ? "" : out_prefix + "_sweep.csv");
  return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-loop SQUID nonlinearity design and verification"};
  app.require_subcommand(1);

  std::string target, config, format = "table", out_path;
  int order = 8;
  bool force = false;

  auto add_circuit_opts = [&](CLI::App* sub) {
    sub->add_option("--preset", target, "preset circuit name");
    sub->add_option("--config", config, "circuit config JSON path");
    sub->add_option("--format", format, "table|json|csv");
    sub->add_option("--out", out_path, "write output to a file");
  };
  auto pick_target = [&]() -> std::string {
    if (!target.empty()) return target;
    if (!config.empty()) return config;
    throw nems::validation_error("give --preset or --config");
  };

  auto* analyze = app.add_subcommand("analyze", "quantized-mode coefficients");
  add_circuit_opts(analyze);
  analyze->add_option("--order", order, "Taylor order (default 8)");
  analyze->add_flag("--force", force, "proceed despite a failed WAO check");

  auto* waocheck = app.add_subcommand("wao-check", "single-well diagnostics");
  add_circuit_opts(waocheck);

  std::string problem_path;
  auto* design = app.add_subcommand("design", "inverse nonlinearity design");
  design->add_option("--problem", problem_path, "design problem JSON")
      ->required();
  design->add_option("--out", out_path, "write output to a file");

  std::string axis = "phi_e1";
  double axis_from = 0.0, axis_to = 2.0 * std::numbers::pi;
  int samples = 101, levels = 1, grid_points = 1024;
  auto* sweep = app.add_subcommand("sweep", "spectrum along a flux axis");
  add_circuit_opts(sweep);
  sweep->add_option("--axis", axis, "phi_eK (1-based) or branch index");
  sweep->add_option("--from", axis_from, "start flux [rad]");
  sweep->add_option("--to", axis_to, "end flux [rad]");
  sweep->add_option("--samples", samples, "number of flux points");
  sweep->add_option("--levels", levels, "transition count per point");
  sweep->add_option("--grid-points", grid_points, "diagonalization grid");

  double eps_d = 0.5;
  auto* drive = app.add_subcommand("drive", "strong-drive harmonic content");
  add_circuit_opts(drive);
  drive->add_option("--eps", eps_d, "drive amplitude eps_d");
  drive->add_option("--order", order, "Taylor order (default 8)");

  std::string scenario_path, sweep_expr, out_prefix;
  auto* simulate = app.add_subcommand("simulate", "time-domain simulation");
  simulate->add_option("--scenario", scenario_path, "scenario JSON")
      ->required();
  simulate->add_option("--sweep", sweep_expr, "key=lo:hi:n parameter sweep");
  simulate->add_option("--out", out_prefix, "output file prefix");

  int table_id = 1;
  std::string fixtures;
  auto* report = app.add_subcommand("report", "reference-table regression");
  report->add_option("--table", table_id, "table number 1|2|3")->required();
  report->add_option("--fixtures", fixtures, "fixture JSON override");
  report->add_option("--format", format, "table|json|csv");
  report->add_option("--out", out_path, "write output to a file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze))
      return cmd_analyze(pick_target(), order, force, format, out_path);

    if (app.got_subcommand(waocheck)) {
      const nems::CircuitSpec c = nems::resolve_circuit(pick_target());
      for (const auto& d : c.validate()) std::cerr << d << "\n";
      write_or_print(nems::wao_report_json(nems::wao_check(c)) + "\n",
                     out_path);
      return exit_ok;
    }

    if (app.got_subcommand(design)) {
      const nems::DesignProblem p = nems::load_design_problem(problem_path);
      const nems::DesignSolution sol = nems::design(p);
      std::cout << nems::design_solution_json(sol) << "\n";
      if (!out_path.empty()) {
        // the file gets a circuit config ready for `analyze --config`
        write_or_print(nems::serialize_circuit(sol.realize(18.0, 0.2, 10)) +
                           "\n",
                       out_path);
      }
      return sol.feasible ? exit_ok : exit_numerical;
    }

    if (app.got_subcommand(sweep)) {
      const nems::CircuitSpec c = nems::resolve_circuit(pick_target());
      nems::FluxAxis fa{parse_axis(axis), axis_from, axis_to};
      const nems::SpectrumSweep sw =
          nems::sweep_spectrum(c, fa, samples, levels, grid_points);
      write_or_print(nems::sweep_csv(sw), out_path);
      return exit_ok;
    }

    if (app.got_subcommand(drive)) {
      const nems::CircuitSpec c = nems::resolve_circuit(pick_target());
      const nems::HarmonicDecomposition h =
          nems::bessel_decompose(c, eps_d, order);
      std::ostringstream out;
      out << nems::harmonics_csv(h);
      const nems::DriveShifts shifts = nems::strong_drive_shifts(c, eps_d);
      out << "# delta_omega_GHz," << shifts.delta_omega << "\n";
      out << "# delta_kerr_GHz," << shifts.delta_kerr << "\n";
      write_or_print(out.str(), out_path);
      return exit_ok;
    }

    if (app.got_subcommand(simulate))
      return cmd_simulate(scenario_path, sweep_expr, out_prefix);

    if (app.got_subcommand(report))
      return cmd_report(table_id, fixtures, format, out_path);
  } catch (const nems::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const nems::validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_validation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_numerical;
  }
  return exit_ok;
}
