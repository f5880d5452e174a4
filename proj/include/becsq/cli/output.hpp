#pragma once

// Result persistence: RFC-4180 CSV tables with unit-annotated headers and a
// JSON metadata record per run, plus the record-to-record comparison.

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "becsq/cli/config.hpp"
#include "becsq/report.hpp"

namespace becsq::cli {

/// CRLF line endings; fields holding a comma, quote, CR or LF are quoted
/// with doubled quotes. Header cells read "name [unit]".
void write_csv(std::ostream& out, const Table& table);
std::string csv_field(const std::string& text);
std::string format_cell(const Cell& cell);

struct RunContext {
  std::string command_line;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
};

/// Version string from `git describe` at build time.
std::string version();

/// Metadata document for a finished run; `files` are relative to the run
/// directory.
nlohmann::json make_metadata(const Report& report, const RunConfig& config, const RunContext& context,
                             const std::vector<std::string>& files);

/// Writes <dir>/<table>.csv for each table and <dir>/metadata.json, and
/// returns the metadata.
nlohmann::json write_run(const std::filesystem::path& dir, const Report& report, const RunConfig& config,
                         const RunContext& context);

nlohmann::json read_metadata(const std::filesystem::path& path);

struct ComparisonRow {
  std::string name;
  std::string unit;
  double a = 0.0;
  double b = 0.0;
  double diff = 0.0;        ///< b - a
  double se = 0.0;          ///< combined standard error, 0 for exact values
  double significance = 0.0;  ///< diff / se; +-inf for a nonzero exact diff
};

struct Comparison {
  std::string kind;
  std::vector<ComparisonRow> rows;
  std::vector<std::string> only_in_a;
  std::vector<std::string> only_in_b;
};

/// Scalar-by-scalar differences of two metadata records. Throws
/// KindMismatchError when the experiment kinds differ.
Comparison compare(const nlohmann::json& a, const nlohmann::json& b);

Table comparison_table(const Comparison& c);

}  // namespace becsq::cli
