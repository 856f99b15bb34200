#include "nems/report.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "nems/dynamics.hpp"
#include "nems/quantize.hpp"

namespace nems {

namespace {

using json = nlohmann::json;

struct ColumnContext {
  ModeQuantization q;
  double nbar = 4.0;
  double g_over_delta = 0.1;
  bool magnetic = true;
  double lambda() const { return 0.5 * std::atan(2.0 * g_over_delta); }
  double geometry() const {
    const double l = lambda();
    return std::cos(l) * std::cos(l) * std::sin(l);
  }
  double bpcnot_drive() const {
    // conditional-rotation rate K*nbar/sqrt(nbar) at alpha1 = alpha2
    const double rate =
        std::abs(q.kerr_static) * nbar / std::sqrt(nbar);
    if (magnetic) return rate / (1.5 * std::abs(q.g_driven[3]) * geometry());
    return rate / (12.0 * std::abs(q.g_static[4]) * geometry());
  }
};

double row_value(const ColumnContext& ctx, const json& jr, double sign) {
  const std::string kind = jr.at("kind").get<std::string>();
  if (kind == "omega") return ctx.q.omega_static;
  if (kind == "phi_zpf") return ctx.q.phi_zpf;
  if (kind == "g_static") return ctx.q.g_static.at(jr.at("order").get<int>());
  if (kind == "g_driven") {
    const double v = ctx.q.g_driven.at(jr.at("order").get<int>());
    if (jr.value("match", "signed") == std::string("magnitude"))
      return std::abs(v);
    return sign * v;
  }
  if (kind == "c_driven_zero")
    return ctx.q.series.c_driven.at(jr.at("order").get<int>());
  if (kind == "c_static_zero")
    return ctx.q.series.c_static.at(jr.at("order").get<int>());
  if (kind == "kerr") return ctx.q.kerr_static;
  if (kind == "drive_2ph") {
    // amplitude reaching the nbar*|K| two-photon rate
    if (ctx.magnetic)
      return 2.0 * ctx.nbar * std::abs(ctx.q.kerr_static) /
             std::abs(ctx.q.g_driven[2]);
    return ctx.nbar * std::abs(ctx.q.kerr_static) /
           (3.0 * std::abs(ctx.q.g_static[3]));
  }
  if (kind == "drive_bpcnot") return ctx.bpcnot_drive();
  if (kind == "residual_1ph")
    return 0.5 * ctx.bpcnot_drive() * std::abs(ctx.q.g_driven[1]);
  if (kind == "residual_2ph")
    return 0.5 * ctx.bpcnot_drive() * std::abs(ctx.q.g_driven[2]);
  throw validation_error("unknown fixture row kind '" + kind + "'");
}

std::string row_label(const json& jr) {
  const std::string kind = jr.at("kind").get<std::string>();
  if (jr.contains("order")) {
    const int n = jr.at("order").get<int>();
    if (kind == "g_static") return "g" + std::to_string(n) + "_static";
    if (kind == "g_driven") return "g" + std::to_string(n) + "_driven";
    if (kind == "c_driven_zero")
      return "c" + std::to_string(n) + "_driven_zero";
    if (kind == "c_static_zero")
      return "c" + std::to_string(n) + "_static_zero";
  }
  return kind;
}

} // namespace

TableReport run_table_report(int table, const std::string& fixtures_json) {
  json doc = json::parse(fixtures_json.empty() ? builtin_table_fixtures()
                                               : fixtures_json);
  const json* jtable = nullptr;
  for (const auto& jt : doc.at("tables"))
    if (jt.at("table").get<int>() == table) jtable = &jt;
  if (!jtable)
    throw validation_error("no fixture for table " + std::to_string(table));

  TableReport rep;
  rep.table = table;
  rep.pass = true;

  for (const auto& jcol : jtable->at("columns")) {
    CircuitSpec circuit =
        jcol.contains("circuit")
            ? preset_circuit(jcol.at("circuit").get<std::string>())
            : parse_circuit(jcol.at("circuit_json").dump());
    ColumnContext ctx;
    ctx.q = quantize(circuit, 8);
    ctx.nbar = jcol.value("nbar", 4.0);
    ctx.g_over_delta = jcol.value("g_over_delta", 0.1);
    ctx.magnetic = jcol.value("drive", "magnetic") == std::string("magnetic");

    // The overall drive orientation is a loop-geometry convention: pick the
    // global sign that best matches this column's nonzero driven rows.
    double sign = 1.0;
    {
      double err_plus = 0.0, err_minus = 0.0;
      for (const auto& jr : jcol.at("rows")) {
        if (jr.at("kind").get<std::string>() != "g_driven") continue;
        const double ref = jr.at("ref_GHz").get<double>();
        const double v = ctx.q.g_driven.at(jr.at("order").get<int>());
        err_plus += std::abs(v - ref);
        err_minus += std::abs(-v - ref);
      }
      if (err_minus < err_plus) sign = -1.0;
    }

    for (const auto& jr : jcol.at("rows")) {
      ReportRow row;
      row.column = jcol.at("name").get<std::string>();
      row.quantity = row_label(jr);
      row.note = jr.value("note", "");
      row.informational = jr.value("informational", false);
      const std::string kind = jr.at("kind").get<std::string>();

      if (kind == "c_driven_zero" || kind == "c_static_zero") {
        row.reference = 0.0;
        row.unit = "c-units";
        row.tolerance = jr.value("tol", 1e-9);
        row.absolute = true;
      } else if (jr.contains("ref_GHz")) {
        row.reference = jr.at("ref_GHz").get<double>();
        row.unit = "GHz";
        row.tolerance = jr.value("tol", 0.05);
        row.absolute = jr.value("mode", "rel") == std::string("abs");
      } else {
        row.reference = jr.at("ref").get<double>();
        row.unit = "";
        row.tolerance = jr.value("tol", 0.05);
        row.absolute = jr.value("mode", "rel") == std::string("abs");
      }

      row.computed = row_value(ctx, jr, sign);
      if (row.absolute || row.reference == 0.0) {
        row.rel_error = std::abs(row.computed - row.reference);
        row.pass = row.rel_error <= row.tolerance;
      } else {
        row.rel_error =
            std::abs(row.computed - row.reference) / std::abs(row.reference);
        row.pass = row.rel_error <= row.tolerance;
      }
      if (!row.pass && !row.informational) rep.pass = false;
      rep.rows.push_back(row);
    }
  }
  return rep;
}

std::string table_report_text(const TableReport& r) {
  std::ostringstream out;
  out << "table " << r.table << " regression\n";
  out << std::left << std::setw(10) << "column" << std::setw(18) << "quantity"
      << std::setw(16) << "computed" << std::setw(16) << "reference"
      << std::setw(12) << "error" << std::setw(8) << "tol"
      << "status\n";
  for (const auto& row : r.rows) {
    std::ostringstream cv, rv;
    cv << std::setprecision(6) << row.computed;
    rv << std::setprecision(6) << row.reference;
    out << std::left << std::setw(10) << row.column << std::setw(18)
        << row.quantity << std::setw(16) << cv.str() << std::setw(16)
        << rv.str() << std::setw(12) << std::setprecision(3) << row.rel_error
        << std::setw(8) << row.tolerance
        << (row.informational ? (row.pass ? "info-ok" : "info-off")
                              : (row.pass ? "PASS" : "FAIL"))
        << (row.note.empty() ? "" : "  [" + row.note + "]") << "\n";
  }
  out << "overall: " << (r.pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string table_report_json(const TableReport& r) {
  json j;
  j["table"] = r.table;
  j["pass"] = r.pass;
  j["rows"] = json::array();
  for (const auto& row : r.rows)
    j["rows"].push_back({{"column", row.column},
                         {"quantity", row.quantity},
                         {"computed", row.computed},
                         {"reference", row.reference},
                         {"unit", row.unit},
                         {"tolerance", row.tolerance},
                         {"absolute", row.absolute},
                         {"informational", row.informational},
                         {"error", row.rel_error},
                         {"pass", row.pass}});
  return j.dump(2);
}

std::string table_report_csv(const TableReport& r) {
  std::ostringstream out;
  out.precision(10);
  out << "column,quantity,computed,reference,unit,error,tolerance,"
         "informational,pass\n";
  for (const auto& row : r.rows)
    out << row.column << "," << row.quantity << "," << row.computed << ","
        << row.reference << "," << row.unit << "," << row.rel_error << ","
        << row.tolerance << "," << (row.informational ? 1 : 0) << ","
        << (row.pass ? 1 : 0) << "\n";
  return out.str();
}

} // namespace nems
