#include "becsq/report.hpp"

#include <stdexcept>

namespace becsq {

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw std::logic_error("table '" + name + "': row has " + std::to_string(row.size()) + " cells, expected " +
                           std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

const Scalar& Report::scalar(const std::string& name) const {
  for (const auto& s : summary)
    if (s.name == name) return s;
  throw std::out_of_range("report has no scalar '" + name + "'");
}

void Report::add(std::string name, double value, std::string unit, double se) {
  summary.push_back(Scalar{std::move(name), value, se, std::move(unit)});
}

}  // namespace becsq
