#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "becsq/cli/app.hpp"
#include "becsq/cli/config.hpp"
#include "becsq/cli/output.hpp"
#include "becsq/cli/units.hpp"
#include "becsq/error.hpp"

using namespace becsq;
using namespace becsq::cli;
namespace fs = std::filesystem;

namespace {

const char* two_mode_yaml = R"(experiment: two_mode_scan
two_mode:
  n_a: 100
  n_b: 100
  chi_aa: 0.04 /s
  tau_hold: 0.4 ms
scan:
  theta: {count: 8}
  phi: [0.1 rad]
)";

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("becsq-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "becsq");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_CASE("quantities convert to SI") {
  CHECK(parse_quantity("0.4 ms", Dimension::time) == doctest::Approx(4e-4));
  CHECK(parse_quantity("250us", Dimension::time) == doctest::Approx(2.5e-4));
  CHECK(parse_quantity("2.67e-2 /s", Dimension::rate) == doctest::Approx(2.67e-2));
  CHECK(parse_quantity("600 um", Dimension::length) == doctest::Approx(6e-4));
  CHECK(parse_quantity("90 deg", Dimension::angle) == doctest::Approx(M_PI / 2));
  CHECK_THROWS_AS(parse_quantity("0.4", Dimension::time), std::invalid_argument);
  CHECK_THROWS_AS(parse_quantity("0.4 parsec", Dimension::length), std::invalid_argument);
  CHECK_THROWS_AS(parse_quantity("0.4 ms", Dimension::length), std::invalid_argument);
}

TEST_CASE("config parses and validates") {
  const auto c = parse_config(two_mode_yaml);
  CHECK(c.kind == Kind::two_mode_scan);
  CHECK(c.two_mode.params.tau_hold == doctest::Approx(4e-4));
  CHECK(c.two_mode.theta_grid.size() == 8);

  SUBCASE("unknown key reports its line") {
    std::string text = two_mode_yaml;
    text += "colour: blue\n";
    try {
      parse_config(text, "x.yaml");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string what = e.what();
      CHECK(what.find("x.yaml:10") != std::string::npos);
      CHECK(what.find("colour") != std::string::npos);
    }
  }
  SUBCASE("missing unit") {
    std::string text = two_mode_yaml;
    text.replace(text.find("0.4 ms"), 6, "0.4");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
  SUBCASE("empty theta grid") {
    std::string text = two_mode_yaml;
    text.replace(text.find("{count: 8}"), 10, "[]");
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  }
  SUBCASE("unknown experiment") { CHECK_THROWS_AS(parse_config("experiment: nope\n"), ConfigError); }
}

TEST_CASE("config hash ignores key order and formatting") {
  const auto a = parse_config(two_mode_yaml);
  const auto b = parse_config(R"(scan: {phi: [ 0.1   rad ], theta: {count: 8}}
two_mode: {tau_hold: 400 us, chi_aa: 0.04 /s, n_b: 100, n_a: 1e2}
experiment: two_mode_scan
)");
  CHECK(a.hash() == b.hash());
  std::string changed = two_mode_yaml;
  changed.replace(changed.find("0.4 ms"), 6, "0.5 ms");
  CHECK(parse_config(changed).hash() != a.hash());
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("csv quoting and headers") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  Table t{"t", {{"theta", "rad"}, {"label", "1"}}, {}};
  t.add_row({0.5, std::string("x,y")});
  std::ostringstream os;
  write_csv(os, t);
  CHECK(os.str() == "theta [rad],label [1]\r\n0.5,\"x,y\"\r\n");
  CHECK_THROWS(t.add_row({1.0}));
}

TEST_CASE("compare") {
  const auto dir = scratch("compare");
  const auto c = parse_config(two_mode_yaml);
  Report r;
  r.kind = "two_mode_scan";
  r.add("x", 1.0, "dB", 0.1);
  r.add("y", 2.0, "1");
  RunContext ctx;
  const auto ma = write_run(dir / "a", r, c, ctx);
  CHECK(fs::exists(dir / "a" / "metadata.json"));

  SUBCASE("identical runs give zero differences") {
    const auto cmp = compare(ma, read_metadata(dir / "a"));
    REQUIRE(cmp.rows.size() == 2);
    for (const auto& row : cmp.rows) CHECK(row.diff == 0.0);
  }
  SUBCASE("significance uses the combined error") {
    Report r2 = r;
    r2.summary[0].value = 1.5;
    const auto cmp = compare(ma, write_run(dir / "b", r2, c, ctx));
    CHECK(cmp.rows[0].significance == doctest::Approx(0.5 / std::sqrt(0.02)));
  }
  SUBCASE("kind mismatch") {
    Report r3 = r;
    r3.kind = "twa_run";
    CHECK_THROWS_AS(compare(ma, write_run(dir / "c", r3, c, ctx)), KindMismatchError);
  }
}

TEST_CASE("tool exit codes and outputs") {
  const auto dir = scratch("tool");
  const auto cfg = dir / "two_mode.yaml";
  std::ofstream(cfg) << two_mode_yaml;

  std::string out, err;
  CHECK(run_cli({"two-mode", "--config", cfg.string(), "--out", (dir / "run").string()}, &out, &err) == exit_ok);
  CHECK(fs::exists(dir / "run" / "scan.csv"));
  CHECK(fs::exists(dir / "run" / "metadata.json"));
  const auto meta = read_metadata(dir / "run");
  CHECK(meta["config_hash"] == parse_config(two_mode_yaml).hash());

  CHECK(run_cli({"compare", (dir / "run").string(), (dir / "run").string()}, &out, &err) == exit_ok);

  // Wrong subcommand for the config, then a broken config: error, nothing written.
  CHECK(run_cli({"bogoliubov", "--config", cfg.string(), "--out", (dir / "bad1").string()}, &out, &err) == exit_error);
  std::string broken = two_mode_yaml;
  broken.replace(broken.find("{count: 8}"), 10, "[]");
  std::ofstream(dir / "broken.yaml") << broken;
  CHECK(run_cli({"two-mode", "--config", (dir / "broken.yaml").string(), "--out", (dir / "bad2").string()}, &out,
                &err) == exit_error);
  CHECK(!fs::exists(dir / "bad2"));
  CHECK(err.find("theta") != std::string::npos);

  CHECK(run_cli({"figure", "nope"}, &out, &err) == exit_error);
  CHECK(run_cli({"frobnicate"}, &out, &err) == exit_error);
}
