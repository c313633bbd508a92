#pragma once

// Tabular experiment output: a header row, numeric rows and a few summary lines.
// Numbers are written with 12 significant digits.

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ringmod/errors.hpp"

namespace ringmod {

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw rejection("csv: not a number: '" + s + "'");
  }
  if (used != s.size()) throw rejection("csv: trailing characters in '" + s + "'");
  return v;
}

struct report {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> summary;
  int violations = 0;
  bool failed = false;  // the experiment could not reach a verdict

  void note(const std::string& key, const std::string& value) { summary.emplace_back(key, value); }
  void note(const std::string& key, double value) { summary.emplace_back(key, format_number(value)); }
  void add_row(std::vector<double> r) {
    if (r.size() != columns.size()) throw rejection("report row width does not match the header");
    rows.push_back(std::move(r));
  }
  std::string value_of(const std::string& key) const {
    for (const auto& [k, v] : summary)
      if (k == key) return v;
    return {};
  }
  bool ok() const { return violations == 0 && !failed; }
};

inline void write_csv(std::ostream& os, const report& r) {
  for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
  os << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_number(row[c]);
    os << '\n';
  }
}

inline void write_text(std::ostream& os, const report& r) {
  os << r.name << '\n';
  for (const auto& [k, v] : r.summary) os << "  " << k << ": " << v << '\n';
}

/// Parse what write_csv produced.
inline report read_csv(std::istream& is) {
  report r;
  std::string line;
  if (!std::getline(is, line)) throw rejection("csv: missing header");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.columns.push_back(cell);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(parse_number(cell));
    r.add_row(std::move(row));
  }
  return r;
}

}  // namespace ringmod
