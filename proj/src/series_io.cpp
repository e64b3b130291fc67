#include "evtrust/series_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <json.hpp>

#include "evtrust/errors.hpp"

namespace evtrust {

namespace {

// Plain double for JSON output; keeps the printed precision of the CSV.
nlohmann::ordered_json json_number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

nlohmann::ordered_json json_cell(const Table::Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<long long>(&cell)) return *i;
  return json_number(std::get<double>(cell));
}

std::string quote_csv(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string csv_cell(const Table::Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return quote_csv(*s);
  if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
  return format_number(std::get<double>(cell));
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
  std::string key;
  for (char ch : name) key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (key == "csv") return OutputFormat::Csv;
  if (key == "json") return OutputFormat::Json;
  throw ArgumentError("unknown output format '" + std::string(name) + "' (expected csv or json)");
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw ArgumentError("table row has " + std::to_string(row.size()) + " cells, expected " +
                        std::to_string(columns_.size()));
  }
  rows_.push_back(std::move(row));
}

std::string Table::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i > 0) out += ',';
    out += quote_csv(columns_[i]);
  }
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string Table::to_json() const {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = json_cell(row[i]);
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

std::string Table::render(OutputFormat format) const {
  return format == OutputFormat::Json ? to_json() : to_csv();
}

Table series_table(std::span<const TimestepRecord> series) {
  const bool two_referrers =
      !series.empty() && std::all_of(series.begin(), series.end(),
                                     [](const TimestepRecord& r) { return r.secondary_trust.has_value(); });
  std::vector<std::string> columns = {"t",     "alpha_pred", "alpha_obs", "r_pred",
                                      "s_pred", "r_obs",     "s_obs",     "trust_r",
                                      "trust_s", "certainty", "discount"};
  if (two_referrers) {
    columns.push_back("trust2_r");
    columns.push_back("trust2_s");
  }
  Table table(std::move(columns));
  for (const auto& r : series) {
    std::vector<Table::Cell> row = {
        static_cast<long long>(r.t), r.alpha_pred,       r.alpha_obs,
        r.predicted.r(),             r.predicted.s(),    r.observed.r(),
        r.observed.s(),              r.trust_state.r(),  r.trust_state.s(),
        r.certainty_pred,            r.discount,
    };
    if (two_referrers) {
      row.emplace_back(r.secondary_trust->r());
      row.emplace_back(r.secondary_trust->s());
    }
    table.add_row(std::move(row));
  }
  return table;
}

std::string evidence_json(const Evidence& e) {
  nlohmann::ordered_json j;
  j["r"] = json_number(e.r());
  j["s"] = json_number(e.s());
  return j.dump();
}

std::string belief_json(const Belief& b) {
  nlohmann::ordered_json j;
  j["b"] = json_number(b.b());
  j["d"] = json_number(b.d());
  j["u"] = json_number(b.u());
  return j.dump();
}

}  // namespace evtrust
