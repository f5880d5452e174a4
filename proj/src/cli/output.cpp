#include "becsq/cli/output.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>

#include "becsq/error.hpp"

#ifndef BECSQ_VERSION
#define BECSQ_VERSION "unknown"
#endif

namespace becsq::cli {

using nlohmann::json;

std::string version() { return BECSQ_VERSION; }

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string format_cell(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  const double v = std::get<double>(cell);
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    const auto& c = table.columns[i];
    out << (i ? "," : "") << csv_field(c.name + " [" + c.unit + "]");
  }
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(format_cell(row[i]));
    out << "\r\n";
  }
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double from_json(const json& j) { return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN(); }

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

json make_metadata(const Report& report, const RunConfig& config, const RunContext& context,
                   const std::vector<std::string>& files) {
  json summary = json::array();
  for (const auto& s : report.summary)
    summary.push_back({{"name", s.name}, {"value", number_or_null(s.value)}, {"se", number_or_null(s.se)}, {"unit", s.unit}});
  json tables = json::array();
  for (std::size_t i = 0; i < report.tables.size(); ++i) {
    json cols = json::array();
    for (const auto& c : report.tables[i].columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
    tables.push_back({{"file", files.at(i)}, {"rows", report.tables[i].rows.size()}, {"columns", cols}});
  }
  return {{"kind", report.kind},
          {"config_kind", to_string(config.kind)},
          {"config", config.canonical},
          {"config_hash", config.hash()},
          {"version", version()},
          {"timestamp", utc_now()},
          {"command", context.command_line},
          {"seed", context.seed},
          {"workers", context.workers},
          {"settings", report.settings},
          {"squeezing_db_convention",
           "squeezing_db = -10 log10(Var[N]/<N>) per state and -10 log10(Var[N_a-N_b]/<N_a+N_b>) for the "
           "difference; larger = more squeezed"},
          {"tables", tables},
          {"summary", summary},
          {"warnings", report.warnings}};
}

json write_run(const std::filesystem::path& dir, const Report& report, const RunConfig& config,
               const RunContext& context) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> files;
  for (const auto& t : report.tables) {
    const auto name = t.name + ".csv";
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    write_csv(out, t);
    files.push_back(name);
  }
  const auto meta = make_metadata(report, config, context, files);
  std::ofstream out(dir / "metadata.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (dir / "metadata.json").string());
  out << meta.dump(2) << "\n";
  return meta;
}

json read_metadata(const std::filesystem::path& path) {
  auto p = path;
  if (std::filesystem::is_directory(p)) p /= "metadata.json";
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

Comparison compare(const json& a, const json& b) {
  const auto ka = a.at("kind").get<std::string>(), kb = b.at("kind").get<std::string>();
  if (ka != kb) throw KindMismatchError("cannot compare a '" + ka + "' record with a '" + kb + "' record");
  Comparison c;
  c.kind = ka;
  auto index = [](const json& m) {
    std::map<std::string, json> out;
    for (const auto& s : m.at("summary")) out[s.at("name").get<std::string>()] = s;
    return out;
  };
  const auto sa = index(a), sb = index(b);
  // Keep the order of record a.
  for (const auto& s : a.at("summary")) {
    const auto name = s.at("name").get<std::string>();
    const auto it = sb.find(name);
    if (it == sb.end()) {
      c.only_in_a.push_back(name);
      continue;
    }
    ComparisonRow r;
    r.name = name;
    r.unit = s.value("unit", "1");
    r.a = from_json(s.at("value"));
    r.b = from_json(it->second.at("value"));
    r.diff = r.b - r.a;
    const double sea = from_json(s.at("se")), seb = from_json(it->second.at("se"));
    r.se = std::hypot(std::isfinite(sea) ? sea : 0.0, std::isfinite(seb) ? seb : 0.0);
    if (r.diff == 0.0)
      r.significance = 0.0;
    else if (r.se > 0.0)
      r.significance = r.diff / r.se;
    else
      r.significance = r.diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    c.rows.push_back(r);
  }
  for (const auto& [name, s] : sb)
    if (!sa.count(name)) c.only_in_b.push_back(name);
  return c;
}

Table comparison_table(const Comparison& c) {
  Table t{"compare",
          {{"scalar", "1"},
           {"unit", "1"},
           {"value_a", "scalar unit"},
           {"value_b", "scalar unit"},
           {"diff_b_minus_a", "scalar unit"},
           {"se_combined", "scalar unit"},
           {"significance", "sigma"}},
          {}};
  for (const auto& r : c.rows) t.add_row({r.name, r.unit, r.a, r.b, r.diff, r.se, r.significance});
  return t;
}

}  // namespace becsq::cli
