#pragma once

// Text output for experiment series and result tables, as CSV or as a JSON
// array of objects with the same field names.

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "evtrust/simulation.hpp"
#include "evtrust/trust.hpp"

namespace evtrust {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view name);

/// "%.10g"; the one number format used in every output.
std::string format_number(double v);

/// Column-oriented result table. Cells are strings or numbers.
class Table {
 public:
  using Cell = std::variant<std::string, double, long long>;

  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  /// Throws ArgumentError if the row width differs from the column count.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::string to_csv() const;
  std::string to_json() const;
  std::string render(OutputFormat format) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

/// Columns t, alpha_pred, alpha_obs, r_pred, s_pred, r_obs, s_obs, trust_r,
/// trust_s, certainty, discount; plus trust2_r, trust2_s when the series
/// tracks a second referrer.
Table series_table(std::span<const TimestepRecord> series);

std::string evidence_json(const Evidence& e);  // {"r":..,"s":..}
std::string belief_json(const Belief& b);      // {"b":..,"d":..,"u":..}

}  // namespace evtrust
