#pragma once

#include <string>
#include <vector>

#include "nems/circuit.hpp"

namespace nems {

/// One compared quantity of a reference-table column.
struct ReportRow {
  std::string column;
  std::string quantity;
  double computed = 0.0;
  double reference = 0.0;
  std::string unit;
  double tolerance = 0.05;
  bool absolute = false;      // compare |computed - ref| <= tol directly
  bool informational = false; // operating-point row; excluded from pass/fail
  double rel_error = 0.0;     // |c-r|/|r|, or |c-r| for absolute rows
  bool pass = false;
  std::string note;
};

struct TableReport {
  int table = 0;
  std::vector<ReportRow> rows;
  bool pass = false; // all non-informational rows
};

/// Compares every fixture row of the requested table (1, 2 or 3) against the
/// freshly computed values. fixtures_json empty selects the built-in copy.
TableReport run_table_report(int table, const std::string& fixtures_json = "");

std::string table_report_text(const TableReport& r);
std::string table_report_json(const TableReport& r);
std::string table_report_csv(const TableReport& r);

/// The built-in fixture document (mirrors fixtures/tables.json).
const char* builtin_table_fixtures();

} // namespace nems
