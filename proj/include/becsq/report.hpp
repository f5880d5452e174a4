#pragma once

// In-memory result of one experiment: named tables, summary scalars and the
// effective settings. The CLI turns a Report into CSV files plus metadata.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace becsq {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Column {
  std::string name;
  std::string unit;  ///< "1" for dimensionless
};

struct Table {
  std::string name;  ///< file stem
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

struct Scalar {
  std::string name;
  double value = 0.0;
  /// Standard error; NaN for exact (analytic) values.
  double se = std::numeric_limits<double>::quiet_NaN();
  std::string unit = "1";
};

struct Report {
  std::string kind;
  nlohmann::json settings = nlohmann::json::object();
  std::vector<Table> tables;
  std::vector<Scalar> summary;
  std::vector<std::string> warnings;

  const Scalar& scalar(const std::string& name) const;
  void add(std::string name, double value, std::string unit = "1",
           double se = std::numeric_limits<double>::quiet_NaN());
};

}  // namespace becsq
