#include "becsq/cli/app.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <optional>
#include <thread>

#include "becsq/cli/config.hpp"
#include "becsq/cli/output.hpp"
#include "becsq/error.hpp"
#include "becsq/figures.hpp"

namespace becsq::cli {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> trajectories;
  std::string out;
};

std::size_t resolve_workers(const Flags& f, const RunConfig& c) {
  if (f.workers) return *f.workers;
  if (const char* env = std::getenv("BECSQ_WORKERS"); env && *env) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw ConfigError("BECSQ_WORKERS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<std::size_t>(v);
  }
  if (c.workers) return *c.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void print_report(std::ostream& out, const Report& rep) {
  for (const auto& s : rep.summary) {
    out << s.name << " = " << format_cell(s.value);
    if (std::isfinite(s.se)) out << " +- " << format_cell(s.se);
    if (s.unit != "1") out << " " << s.unit;
    out << "\n";
  }
}

int execute(Kind expected, const std::string& figure_name, const Flags& f, const std::string& command,
            std::ostream& out, std::ostream& err) {
  RunConfig c;
  if (!f.config.empty()) {
    c = load_config(f.config);
  } else if (expected == Kind::figure) {
    c = figure_config(figure_name);
  } else {
    throw ConfigError("--config is required for this subcommand");
  }
  if (c.kind != expected)
    throw ConfigError(f.config + ": experiment is '" + to_string(c.kind) + "' but the subcommand runs '" +
                      to_string(expected) + "'");
  if (expected == Kind::figure && !figure_name.empty() && c.figure != figure_name)
    throw ConfigError(f.config + ": config is for figure " + c.figure + ", command asked for figure " + figure_name);

  RunContext ctx;
  ctx.command_line = command;
  ctx.seed = f.seed ? *f.seed : c.seed.value_or(1);
  ctx.workers = resolve_workers(f, c);
  const std::size_t trajectories = f.trajectories ? *f.trajectories : c.trajectories.value_or(0);
  if (f.trajectories && *f.trajectories < 2) throw ConfigError("--trajectories must be >= 2");

  const std::string out_dir =
      f.out.empty() ? "becsq-out/" + (c.kind == Kind::figure ? "figure" + c.figure : to_string(c.kind)) + "-" +
                          c.hash().substr(0, 12)
                    : f.out;

  Report rep;
  switch (c.kind) {
    case Kind::two_mode_scan:
      rep = figures::run_two_mode(c.two_mode);
      break;
    case Kind::twa_run: {
      auto job = c.twa;
      job.options.trajectories = trajectories ? trajectories : 100;
      job.options.seed = ctx.seed;
      job.options.workers = ctx.workers;
      if (c.snapshots) {
        job.options.snapshot_trajectories = c.snapshots;
        job.options.snapshot_dir = (std::filesystem::path(out_dir) / "snapshots").string();
        std::filesystem::create_directories(job.options.snapshot_dir);
      }
      rep = figures::run_twa(job);
      break;
    }
    case Kind::bogoliubov_curve:
      rep = figures::run_bogoliubov(c.bogoliubov);
      break;
    case Kind::scaling_sweep:
      rep = figures::run_scaling(c.scaling);
      break;
    case Kind::figure: {
      figures::Ensemble ens{trajectories, ctx.seed, ctx.workers};
      rep = c.figure == "6" ? figures::figure6(ens, c.mode_shape) : figures::figure(c.figure, ens);
      break;
    }
  }
  write_run(out_dir, rep, c, ctx);
  print_report(out, rep);
  out << "output: " << out_dir << "\n";
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  return rep.warnings.empty() ? exit_ok : exit_warnings;
}

int run_compare(const std::string& a, const std::string& b, const std::string& out_dir, double threshold,
                std::ostream& out, std::ostream& err) {
  const auto c = compare(read_metadata(a), read_metadata(b));
  const auto table = comparison_table(c);
  write_csv(out, table);
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream f(std::filesystem::path(out_dir) / "compare.csv", std::ios::binary);
    write_csv(f, table);
  }
  for (const auto& n : c.only_in_a) err << "note: '" << n << "' only in " << a << "\n";
  for (const auto& n : c.only_in_b) err << "note: '" << n << "' only in " << b << "\n";
  bool flagged = false;
  for (const auto& r : c.rows)
    if (std::abs(r.significance) > threshold && std::isfinite(r.se) && r.se > 0.0) {
      err << "warning: " << r.name << " differs by " << format_cell(r.significance) << " sigma\n";
      flagged = true;
    }
  return flagged ? exit_warnings : exit_ok;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative number squeezing in two-component condensates: two-mode analytics, truncated-Wigner "
               "field simulation and Bogoliubov depletion.",
               "becsq"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  Flags f;
  // Deterministic subcommands accept --seed/--workers too; they are recorded but unused.
  auto common = [&](CLI::App* s) {
    s->add_option("--config", f.config, "YAML run configuration")->check(CLI::ExistingFile);
    s->add_option("--out", f.out, "Output directory (default becsq-out/<kind>-<config hash>)");
    s->add_option("--seed", f.seed, "Random seed (overrides the config)");
    s->add_option("--workers", f.workers, "Worker threads (overrides BECSQ_WORKERS)")->check(CLI::PositiveNumber);
    s->add_option("--trajectories", f.trajectories, "Ensemble size R (overrides the config)");
  };

  auto* two = app.add_subcommand("two-mode", "Analytic two-mode recombination scan");
  common(two);
  auto* twa = app.add_subcommand("twa", "Truncated-Wigner field simulation of a pulse sequence");
  common(twa);
  auto* bog = app.add_subcommand("bogoliubov", "Bogoliubov non-condensed fraction vs hold time");
  common(bog);
  auto* scal = app.add_subcommand("scaling", "Bogoliubov size-scaling sweep");
  common(scal);
  auto* fig = app.add_subcommand("figure", "Reproduce a published figure");
  std::string figure_name;
  std::string names;
  for (const auto& n : figures::figure_names()) names += (names.empty() ? "" : ", ") + n;
  fig->add_option("n", figure_name, "Figure: " + names)->required();
  common(fig);
  auto* cmp = app.add_subcommand("compare", "Compare the summary scalars of two runs");
  std::string rec_a, rec_b;
  double threshold = 3.0;
  cmp->add_option("a", rec_a, "Run directory or metadata.json")->required();
  cmp->add_option("b", rec_b, "Run directory or metadata.json")->required();
  cmp->add_option("--out", f.out, "Directory for compare.csv");
  cmp->add_option("--sigma", threshold, "Significance that flags a difference")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_error;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

  try {
    if (*two) return execute(Kind::two_mode_scan, "", f, command, out, err);
    if (*twa) return execute(Kind::twa_run, "", f, command, out, err);
    if (*bog) return execute(Kind::bogoliubov_curve, "", f, command, out, err);
    if (*scal) return execute(Kind::scaling_sweep, "", f, command, out, err);
    if (*fig) {
      bool known = false;
      for (const auto& n : figures::figure_names()) known = known || n == figure_name;
      if (!known) throw ConfigError("unknown figure '" + figure_name + "' (" + names + ")");
      return execute(Kind::figure, figure_name, f, command, out, err);
    }
    if (*cmp) return run_compare(rec_a, rec_b, f.out, threshold, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_error;
  }
  return exit_error;
}

}  // namespace becsq::cli
