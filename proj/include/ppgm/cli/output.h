#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "ppgm/core/history.h"
#include "ppgm/nn/mlp.h"

namespace ppgm::cli {

/// Shortest round-trip decimal form with '.' as separator regardless of
/// locale; non-finite values print as nan, inf, -inf.
std::string format_number(double v);

/// Writes a CSV with ',' separators and LF line endings. Throws NumericError
/// (I/O failure) if the file cannot be written.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// history.csv columns.
const std::vector<std::string>& history_header();
void write_history(const std::string& path, const IterateHistory& history);

/// value0.csv columns.
const std::vector<std::string>& value0_header();
struct Value0Row {
  double x = 0.0;
  double value = 0.0;
  double stdErr = 0.0;
  double reference = IterateRecord::kNaN;
};
void write_value0(const std::string& path, const std::vector<Value0Row>& rows);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};
/// Line plot as a standalone SVG. On a log axis non-positive points are
/// dropped.
void write_line_plot(const std::string& path, const std::string& title, const std::string& xLabel,
                     const std::vector<PlotSeries>& series, bool logY);

nlohmann::json mlp_to_json(const nn::Mlp& net);
nn::Mlp mlp_from_json(const nlohmann::json& j, const std::string& path);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

}  // namespace ppgm::cli
