#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mobcache::bench {

struct ResultRow {
  std::string grid_param;
  double grid_value = 0.0;
  std::string strategy;
  std::string metric;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

/// Sorts rows by (grid value, strategy, metric); emit_report and the tests
/// rely on this order being schedule-independent.
void sort_rows(ResultTable& table);

/// results.csv in the fixed schema
/// `grid_param,grid_value,strategy,metric,value,std_error,seed`,
/// floats at 9 significant digits. Deterministic input gives byte-identical
/// output.
void write_results_csv(const ResultTable& table, const std::string& path);

/// Multi-series line chart (one polyline per strategy) of one metric against
/// the grid value.
void write_results_svg(const ResultTable& table, const std::string& metric,
                       const std::string& path);

/// Writes results.csv plus one SVG per metric (when with_svg). Returns the
/// paths written.
std::vector<std::string> emit_report(ResultTable table, const std::string& out_dir, bool with_svg);

}  // namespace mobcache::bench
