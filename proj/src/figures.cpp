#include "becsq/figures.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "becsq/constants.hpp"

namespace becsq::figures {

using constants::hbar;
using constants::pi;
using experiments::ModeShape;
using nlohmann::json;
using two_mode::Metric;

namespace {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::Na:
      return "Na";
    case Metric::Nb:
      return "Nb";
    case Metric::Difference:
      return "diff";
  }
  return "?";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<double> linspace_pi(std::size_t n) { return experiments::theta_grid(n); }

json params_json(const two_mode::TwoModeParams& p) {
  return {{"n_a", p.n_a},       {"n_b", p.n_b},           {"chi_aa_per_s", p.chi_aa},
          {"chi_ab_per_s", p.chi_ab}, {"chi_bb_per_s", p.chi_bb}, {"tau_hold_s", p.tau_hold}};
}

json line_json(const experiments::Line1D& s) {
  return {{"shape", experiments::to_string(s.shape)},
          {"n_total", s.n_total},
          {"chi_aa_per_s", s.chi_aa},
          {"chi_ab_per_s", s.chi_ab},
          {"chi_bb_per_s", s.chi_bb},
          {"box_m", s.box},
          {"points", s.points},
          {"width_m", s.width},
          {"mass_kg", s.mass}};
}

json box_json(const experiments::Box& s) {
  return {{"dim", s.dim},
          {"points", s.points},
          {"extents_m", s.extents},
          {"n_total", s.n_total},
          {"chi_aa_per_s", s.chi_aa},
          {"chi_ab_per_s", s.chi_ab},
          {"chi_bb_per_s", s.chi_bb},
          {"mass_kg", s.mass}};
}

json bog_json(const bogoliubov::BogoliubovParams& p) {
  return {{"chi_aa_per_s", p.chi_aa}, {"n_a", p.n_a},         {"n_total", p.denominator()},
          {"mass_kg", p.mass},        {"tau_hold_s", p.tau_hold}, {"theta_rad", p.theta},
          {"dim", p.dim},             {"extents_m", p.extents}};
}

json sequence_json(const twa::PulseSequence& seq) {
  json events = json::array();
  for (const auto& e : seq.events) {
    if (const auto* b = std::get_if<twa::Beamsplit>(&e))
      events.push_back({{"beamsplit", {{"theta_rad", b->theta}, {"phi_rad", b->phi}}}});
    else if (const auto* h = std::get_if<twa::Hold>(&e))
      events.push_back({{"hold_s", h->duration}});
    else
      events.push_back("pi_pulse");
  }
  json j = {{"events", events}};
  if (seq.scan) j["scan"] = {{"theta_rad", seq.scan->theta_grid}, {"phi_rad", seq.scan->phi_grid}};
  return j;
}

Table moments_table(const std::string& name, const std::vector<twa::ScanPoint>& scan) {
  Table t{name,
          {{"theta", "rad"},
           {"phi", "rad"},
           {"mean_Na", "atoms"},
           {"var_Na", "atoms^2"},
           {"var_Nb", "atoms^2"},
           {"var_diff", "atoms^2"},
           {"se_var_diff", "atoms^2"},
           {"fraction", "1"}},
          {}};
  for (const auto& p : scan)
    t.add_row({p.theta, p.phi, p.numbers.mean_Na, p.numbers.var_Na, p.numbers.var_Nb, p.numbers.var_diff,
               p.numbers.se_var_diff, p.fraction.value});
  return t;
}

Table squeezing_table(const std::string& name, const std::vector<twa::ScanPoint>& scan, const std::string& label) {
  Table t{name,
          {{"case", "1"},
           {"theta", "rad"},
           {"phi", "rad"},
           {"db_Na", "dB"},
           {"se_db_Na", "dB"},
           {"db_Nb", "dB"},
           {"se_db_Nb", "dB"},
           {"db_diff", "dB"},
           {"se_db_diff", "dB"}},
          {}};
  for (const auto& p : scan) {
    const auto& n = p.numbers;
    t.add_row({label, p.theta, p.phi, n.db_Na, n.se_db_Na, n.db_Nb, n.se_db_Nb, n.db_diff, n.se_db_diff});
  }
  return t;
}

void append(Table& into, const Table& from) {
  for (const auto& r : from.rows) into.rows.push_back(r);
}

Table events_table(const twa::RunResult& r, const FieldLattice& lattice) {
  Table t{"events",
          {{"event", "1"},
           {"time", "s"},
           {"mean_Na", "atoms"},
           {"mean_Nb", "atoms"},
           {"var_Na", "atoms^2"},
           {"var_Nb", "atoms^2"},
           {"var_diff", "atoms^2"},
           {"se_var_diff", "atoms^2"},
           {"fraction", "1"},
           {"se_fraction", "1"}},
          {}};
  for (const auto& e : r.events) {
    const auto n = twa::estimate_numbers(e.moments, lattice);
    const auto f = twa::noncondensed_fraction(e.moments, lattice);
    t.add_row({e.label, e.time, n.mean_Na, n.mean_Nb, n.var_Na, n.var_Nb, n.var_diff, n.se_var_diff, f.value, f.se});
  }
  return t;
}

// Best scan point among those at the given phi (all points when phi is unset).
std::size_t best_at(const std::vector<twa::ScanPoint>& scan, Metric metric, std::optional<double> phi) {
  if (!phi) return experiments::best_point(scan, metric);
  std::vector<twa::ScanPoint> sub;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < scan.size(); ++i)
    if (scan[i].phi == *phi) {
      sub.push_back(scan[i]);
      index.push_back(i);
    }
  if (sub.empty()) throw std::invalid_argument("no scan points at phi = " + fmt(*phi));
  return index[experiments::best_point(sub, metric)];
}

void add_best(Report& rep, const std::string& suffix, const twa::ScanPoint& p, Metric metric) {
  const std::string m = metric_name(metric);
  rep.add("best_db_" + m + suffix, experiments::db_of(p.numbers, metric), "dB",
          experiments::se_db_of(p.numbers, metric));
  rep.add("best_theta" + suffix, p.theta, "rad");
  rep.add("best_phi" + suffix, p.phi, "rad");
}

void add_run_warnings(Report& rep, const twa::RunResult& r, const std::string& context) {
  for (const auto& w : r.warnings) rep.warnings.push_back(context.empty() ? w : context + ": " + w);
  for (const auto& p : r.scan)
    if (p.numbers.negative_variance) {
      rep.warnings.push_back((context.empty() ? "" : context + ": ") +
                             "negative ordering-corrected variance beyond 3 SE in the recombination scan");
      break;
    }
}

Table analytic_curve(const std::string& name, const two_mode::TwoModeParams& base, std::span<const double> phis,
                     std::size_t points) {
  Table t{name,
          {{"phi", "rad"},
           {"theta", "rad"},
           {"N_a", "atoms"},
           {"var_Na_over_Na", "1"},
           {"var_diff_over_N", "1"},
           {"db_Na", "dB"},
           {"db_diff", "dB"}},
          {}};
  const auto thetas = linspace_pi(points);
  const auto table = two_mode::scan_recombination(base, thetas, phis);
  for (const auto& row : table.rows) {
    const auto& r = row.result;
    t.add_row({row.phi, row.theta, r.N_a, r.var_Na / r.N_a, r.var_diff / (r.N_a + r.N_b), r.db_Na, r.db_diff});
  }
  return t;
}

twa::RunResult run(const experiments::Prepared& prep, const twa::PulseSequence& seq, const Ensemble& ens,
                   std::size_t default_r) {
  twa::RunOptions o;
  o.trajectories = ens.trajectories ? ens.trajectories : default_r;
  o.seed = ens.seed;
  o.workers = ens.workers;
  return twa::run_sequence(prep.lattice, prep.initial, prep.hold, seq, o);
}

json ensemble_json(const Ensemble& e, std::size_t default_r) {
  return {{"trajectories", e.trajectories ? e.trajectories : default_r}, {"seed", e.seed}};
}

}  // namespace

Report run_two_mode(const TwoModeJob& job) {
  if (job.theta_grid.empty() || job.phi_grid.empty()) throw std::invalid_argument("theta and phi grids must be nonempty");
  job.params.validate();
  Report rep;
  rep.kind = "two_mode_scan";
  rep.settings = params_json(job.params);
  rep.settings["theta_rad"] = job.theta_grid;
  rep.settings["phi_rad"] = job.phi_grid;

  const auto table = two_mode::scan_recombination(job.params, job.theta_grid, job.phi_grid);
  Table t{"scan",
          {{"theta", "rad"},
           {"phi", "rad"},
           {"N_a", "atoms"},
           {"N_b", "atoms"},
           {"var_Na", "atoms^2"},
           {"var_Nb", "atoms^2"},
           {"var_diff", "atoms^2"},
           {"db_Na", "dB"},
           {"db_Nb", "dB"},
           {"db_diff", "dB"}},
          {}};
  bool degenerate = false;
  for (const auto& row : table.rows) {
    const auto& r = row.result;
    degenerate = degenerate || r.degenerate;
    t.add_row({row.theta, row.phi, r.N_a, r.N_b, r.var_Na, r.var_Nb, r.var_diff, r.db_Na, r.db_Nb, r.db_diff});
  }
  rep.tables.push_back(std::move(t));
  for (Metric m : {Metric::Na, Metric::Nb, Metric::Difference}) {
    const auto& row = table.rows[table.best(m)];
    const std::string s = metric_name(m);
    const double db = m == Metric::Na ? row.result.db_Na : m == Metric::Nb ? row.result.db_Nb : row.result.db_diff;
    rep.add("best_db_" + s, db, "dB");
    rep.add("best_theta_" + s, row.theta, "rad");
    rep.add("best_phi_" + s, row.phi, "rad");
  }
  if (degenerate) rep.warnings.push_back("a mean number used as dB reference is zero; dB undefined there");
  return rep;
}

Report run_twa(const TwaJob& job) {
  Report rep;
  rep.kind = "twa_run";
  experiments::Prepared prep = job.setup == TwaJob::Setup::line ? experiments::prepare(job.line)
                                                                : experiments::prepare(job.box);
  prep.hold.dt = job.dt;
  rep.settings["setup"] = job.setup == TwaJob::Setup::line ? line_json(job.line) : box_json(job.box);
  rep.settings["sequence"] = sequence_json(job.sequence);
  rep.settings["trajectories"] = job.options.trajectories;
  rep.settings["seed"] = job.options.seed;
  rep.settings["dt_s"] = job.dt;
  rep.settings["metric"] = metric_name(job.metric);
  if (job.options.energy_cutoff) rep.settings["energy_cutoff_J"] = *job.options.energy_cutoff;

  const auto r = twa::run_sequence(prep.lattice, prep.initial, prep.hold, job.sequence, job.options);
  rep.settings["dt_used_s"] = r.dt;
  rep.settings["overlap_per_m"] = prep.overlap;
  rep.settings["U_aa_J_m"] = prep.hold.U_aa;
  rep.settings["trap_omega_rad_per_s"] = prep.trap_omega;
  add_run_warnings(rep, r, "");
  rep.tables.push_back(events_table(r, prep.lattice));

  const auto last = twa::estimate_numbers(r.events.back().moments, prep.lattice);
  const auto frac = twa::noncondensed_fraction(r.events.back().moments, prep.lattice, job.options.energy_cutoff);
  rep.add("final_mean_Na", last.mean_Na, "atoms", last.se_mean_Na);
  rep.add("final_mean_Nb", last.mean_Nb, "atoms", last.se_mean_Nb);
  rep.add("final_fraction", frac.value, "1", frac.se);
  if (!r.scan.empty()) {
    rep.tables.push_back(moments_table("moments", r.scan));
    rep.tables.push_back(squeezing_table("squeezing", r.scan, "twa"));
    add_best(rep, "", r.scan[experiments::best_point(r.scan, job.metric)], job.metric);
  }
  return rep;
}

Report run_bogoliubov(const BogoliubovJob& job) {
  if (job.tau_grid.empty()) throw std::invalid_argument("tau grid must be nonempty");
  job.params.validate();
  Report rep;
  rep.kind = "bogoliubov_curve";
  rep.settings = bog_json(job.params);
  rep.settings["tau_hold_s"] = job.tau_grid;
  Table t{"bogoliubov",
          {{"size", "m"}, {"tau_hold", "s"}, {"fraction_sum", "1"}, {"fraction_integral", "1"}, {"validity_metric", "1"}},
          {}};
  double peak = 0.0;
  for (double tau : job.tau_grid) {
    auto p = job.params;
    p.tau_hold = tau;
    const double s = bogoliubov::depletion_sum(p).fraction;
    t.add_row({p.extents[0], tau, s, bogoliubov::depletion_integral(p), bogoliubov::validity_metric(p)});
    peak = std::max(peak, s);
  }
  rep.tables.push_back(std::move(t));
  rep.add("peak_fraction_sum", peak);
  return rep;
}

Report run_scaling(const ScalingJob& job) {
  if (job.sizes.size() < 2) throw std::invalid_argument("scaling needs at least two sizes");
  Report rep;
  rep.kind = "scaling_sweep";
  rep.settings = bog_json(job.base);
  rep.settings["sizes_m"] = job.sizes;
  rep.settings["with_sum"] = job.with_sum;
  const auto r = bogoliubov::scaling_prediction(job.base, job.sizes, job.with_sum);
  Table t{"bogoliubov",
          {{"size", "m"}, {"tau_hold", "s"}, {"fraction_sum", "1"}, {"fraction_integral", "1"}, {"validity_metric", "1"}},
          {}};
  for (const auto& row : r.rows) {
    const Cell sum = job.with_sum ? Cell{row.fraction_sum} : Cell{std::string{}};
    t.add_row({row.size, row.tau_hold, sum, row.fraction_integral, row.validity_metric});
  }
  rep.tables.push_back(std::move(t));
  rep.add("slope_integral", r.slope_integral);
  if (job.with_sum) rep.add("slope_sum", r.slope_sum);
  return rep;
}

Report figure2(std::size_t theta_points) {
  Report rep;
  rep.kind = "figure2";
  two_mode::TwoModeParams p;
  p.n_a = p.n_b = 5e5;
  p.chi_aa = 0.04;
  p.chi_bb = 0.01;
  p.tau_hold = 4e-4;
  const std::vector<double> phis{0.10, 1.42, 3.24, 4.71};
  rep.settings = params_json(p);
  rep.settings["phi_rad"] = phis;
  rep.settings["theta_points"] = theta_points;
  rep.tables.push_back(analytic_curve("curves", p, phis, theta_points));
  for (double phi : phis) {
    p.phi = phi;
    const auto o = two_mode::optimize_theta(p, Metric::Na);
    rep.add("best_db_Na_phi" + fmt(phi), o.db, "dB");
    rep.add("best_theta_phi" + fmt(phi), o.theta, "rad");
  }
  return rep;
}

Report figure3(std::size_t theta_points) {
  Report rep;
  rep.kind = "figure3";
  two_mode::TwoModeParams p;
  p.n_a = p.n_b = 2e5;
  p.chi_aa = 0.03;
  p.chi_ab = 0.02;
  p.chi_bb = 0.01;
  p.tau_hold = 2e-3;
  const std::vector<double> phis{1.67, 1.55};
  rep.settings = params_json(p);
  rep.settings["phi_rad"] = phis;
  rep.settings["theta_points"] = theta_points;
  rep.tables.push_back(analytic_curve("curves", p, phis, theta_points));
  p.phi = 1.67;
  const auto a = two_mode::optimize_theta(p, Metric::Na);
  rep.add("best_db_Na_phi1.67", a.db, "dB");
  rep.add("best_theta_Na_phi1.67", a.theta, "rad");
  p.phi = 1.55;
  const auto d = two_mode::optimize_theta(p, Metric::Difference);
  rep.add("best_db_diff_phi1.55", d.db, "dB");
  rep.add("best_theta_diff_phi1.55", d.theta, "rad");
  return rep;
}

namespace {

experiments::Line1D line_setup(ModeShape shape, double n_total) {
  experiments::Line1D s;
  s.shape = shape;
  s.n_total = n_total;
  s.chi_aa = 0.03;
  s.box = 256e-6;
  s.points = 256;
  s.width = shape == ModeShape::gaussian ? 20e-6 : 50e-6;
  return s;
}

}  // namespace

Report figure4(const Ensemble& ens) {
  constexpr std::size_t default_r = 500;
  constexpr double tau = 3e-4, phi = 4.0;
  Report rep;
  rep.kind = "figure4";
  rep.settings = ensemble_json(ens, default_r);
  rep.settings["tau_hold_s"] = tau;
  rep.settings["phi_rad"] = phi;
  rep.settings["theta_points"] = 256;

  two_mode::TwoModeParams p;
  p.n_a = p.n_b = 1e5;
  p.chi_aa = 0.03;
  p.tau_hold = tau;
  p.phi = phi;
  rep.tables.push_back(analytic_curve("analytic", p, std::vector<double>{phi}, 512));
  const auto opt = two_mode::optimize_theta(p, Metric::Na);
  rep.add("analytic_db_Na", opt.db, "dB");
  rep.add("analytic_theta", opt.theta, "rad");

  Table moments{"moments", {}, {}}, squeezing{"squeezing", {}, {}};
  for (ModeShape shape : {ModeShape::uniform, ModeShape::thomas_fermi, ModeShape::gaussian}) {
    const auto setup = line_setup(shape, 2e5);
    const std::string name = experiments::to_string(shape);
    rep.settings["setups"][name] = line_json(setup);
    const auto prep = experiments::prepare(setup);
    const auto r = run(prep, experiments::squeeze_sequence(tau, false, experiments::theta_grid(256), {phi}), ens,
                       default_r);
    add_run_warnings(rep, r, name);
    add_best(rep, "." + name, r.scan[experiments::best_point(r.scan, Metric::Na)], Metric::Na);

    auto m = moments_table("moments", r.scan);
    m.columns.insert(m.columns.begin(), Column{"shape", "1"});
    for (auto& row : m.rows) row.insert(row.begin(), Cell{name});
    if (moments.columns.empty()) moments.columns = m.columns;
    append(moments, m);
    auto s = squeezing_table("squeezing", r.scan, name);
    if (squeezing.columns.empty()) squeezing.columns = s.columns;
    append(squeezing, s);
  }
  rep.tables.push_back(std::move(moments));
  rep.tables.push_back(std::move(squeezing));
  return rep;
}

Report figure5(const Ensemble& ens) {
  constexpr std::size_t default_r = 200;
  Report rep;
  rep.kind = "figure5";
  experiments::Box box;
  box.dim = 1;
  box.points = {1024, 1, 1};
  box.extents = {600e-6, 1.0, 1.0};
  box.n_total = 4e5;
  box.chi_aa = 2.67e-2;
  rep.settings = ensemble_json(ens, default_r);
  rep.settings["setup"] = box_json(box);
  rep.settings["theta_rad"] = 0.0;

  twa::PulseSequence seq;
  seq.events.push_back(twa::Beamsplit{pi / 4.0, 0.0});
  std::vector<double> taus;
  for (int i = 1; i <= 13; ++i) {
    taus.push_back(1e-3 * i);
    seq.events.push_back(twa::Hold{1e-3});
  }
  const auto prep = experiments::prepare(box);
  const auto r = run(prep, seq, ens, default_r);
  add_run_warnings(rep, r, "twa");

  bogoliubov::BogoliubovParams bp;
  bp.chi_aa = box.chi_aa;
  bp.n_a = box.n_total / 2.0;
  bp.n_total = box.n_total;
  bp.dim = 1;
  bp.extents = box.extents;

  Table t{"fraction",
          {{"tau_hold", "s"},
           {"fraction_sum", "1"},
           {"fraction_integral", "1"},
           {"validity_metric", "1"},
           {"fraction_twa", "1"},
           {"se_fraction_twa", "1"}},
          {}};
  double worst_twa = 0.0, worst_integral = 0.0;
  // events: initial, beamsplit, then one record per hold.
  for (std::size_t i = 0; i < taus.size(); ++i) {
    bp.tau_hold = taus[i];
    const double s = bogoliubov::depletion_sum(bp).fraction;
    const double in = bogoliubov::depletion_integral(bp);
    const double v = bogoliubov::validity_metric(bp);
    const auto f = twa::noncondensed_fraction(r.events[i + 2].moments, prep.lattice);
    t.add_row({taus[i], s, in, v, f.value, f.se});
    if (s < 0.1) worst_twa = std::max(worst_twa, std::abs(f.value / s - 1.0));
    if (v < 0.1) worst_integral = std::max(worst_integral, std::abs(in / s - 1.0));
  }
  rep.tables.push_back(std::move(t));
  rep.add("max_rel_dev_twa_vs_sum", worst_twa);
  rep.add("max_rel_dev_integral_vs_sum", worst_integral);
  bp.tau_hold = taus.back();
  rep.add("fraction_sum_at_13ms", bogoliubov::depletion_sum(bp).fraction);
  return rep;
}

Report figure6(const Ensemble& ens, ModeShape shape) {
  constexpr std::size_t default_r = 500;
  Report rep;
  rep.kind = "figure6";
  const auto setup = line_setup(shape, 4e5);
  rep.settings = ensemble_json(ens, default_r);
  rep.settings["setup"] = line_json(setup);
  rep.settings["theta_points"] = 256;
  rep.settings["phi_scan_points"] = 128;

  two_mode::TwoModeParams p;
  p.n_a = p.n_b = 2e5;
  p.chi_aa = 0.03;
  p.tau_hold = 3e-4;
  p.phi = 3.1;
  rep.tables.push_back(analytic_curve("analytic", p, std::vector<double>{3.1}, 512));
  rep.add("analytic_db_Na", two_mode::optimize_theta(p, Metric::Na).db, "dB");

  struct Case {
    const char* name;
    double tau;
    bool pulse;
    double phi;
  };
  const Case cases[] = {{"no_pulse", 3e-4, false, 3.1}, {"pulse", 3e-4, true, 3.1}, {"pulse_long", 5e-4, true, 3.87}};
  const auto prep = experiments::prepare(setup);
  Table moments{"moments", {}, {}}, squeezing{"squeezing", {}, {}};
  for (const auto& c : cases) {
    // The captioned phi first, then a uniform phi grid for the phi-optimised value.
    std::vector<double> phis{c.phi};
    for (int i = 0; i < 128; ++i) phis.push_back(2.0 * pi * i / 128.0);
    const auto r = run(prep, experiments::squeeze_sequence(c.tau, c.pulse, experiments::theta_grid(256), phis), ens,
                       default_r);
    add_run_warnings(rep, r, c.name);
    add_best(rep, std::string(".") + c.name, r.scan[best_at(r.scan, Metric::Na, c.phi)], Metric::Na);
    const auto& any = r.scan[experiments::best_point(r.scan, Metric::Na)];
    rep.add(std::string("best_db_Na_any_phi.") + c.name, any.numbers.db_Na, "dB", any.numbers.se_db_Na);
    rep.add(std::string("best_phi_any.") + c.name, any.phi, "rad");

    std::vector<twa::ScanPoint> captioned;
    for (const auto& pt : r.scan)
      if (pt.phi == c.phi) captioned.push_back(pt);
    auto m = moments_table("moments", captioned);
    m.columns.insert(m.columns.begin(), Column{"case", "1"});
    for (auto& row : m.rows) row.insert(row.begin(), Cell{std::string(c.name)});
    if (moments.columns.empty()) moments.columns = m.columns;
    append(moments, m);
    auto s = squeezing_table("squeezing", captioned, c.name);
    if (squeezing.columns.empty()) squeezing.columns = s.columns;
    append(squeezing, s);
  }
  rep.tables.push_back(std::move(moments));
  rep.tables.push_back(std::move(squeezing));
  rep.add("pulse_gain_db", rep.scalar("best_db_Na.pulse").value - rep.scalar("best_db_Na.no_pulse").value, "dB",
          std::hypot(rep.scalar("best_db_Na.pulse").se, rep.scalar("best_db_Na.no_pulse").se));
  return rep;
}

Report scaling_figure(int dim) {
  ScalingJob job;
  auto& b = job.base;
  const double L0 = 50e-6;
  b.dim = dim;
  b.extents = {L0, dim >= 2 ? L0 : 1.0, dim == 3 ? L0 : 1.0};
  b.theta = 0.0;
  double U = 0.0;
  if (dim == 1) {
    b.n_total = 1e5;
    U = 8.9e-40;
    b.tau_hold = 10.0 * L0;
  } else if (dim == 2) {
    b.n_total = 1e5;
    U = 8.9e-44;
    b.tau_hold = 1e5 * L0 * L0;
  } else if (dim == 3) {
    b.n_total = 1e4;
    U = 4.7e-49;
    b.tau_hold = 1.25e11 * L0 * L0 * L0;
  } else {
    throw std::invalid_argument("scaling dimension must be 1, 2 or 3");
  }
  b.n_a = b.n_total / 2.0;
  b.chi_aa = U / (hbar * std::pow(L0, dim));
  for (double L = L0; L <= 3200e-6 * 1.0001; L *= 2.0) job.sizes.push_back(L);
  job.with_sum = dim == 1;
  Report rep = run_scaling(job);
  rep.kind = "scaling" + std::to_string(dim) + "d";
  rep.settings["U_J_m^dim"] = U;
  return rep;
}

Report box3d_surrogate(const Ensemble& ens) {
  constexpr std::size_t default_r = 100;
  Report rep;
  rep.kind = "box3d";
  experiments::Box box;
  box.dim = 3;
  box.points = {32, 32, 32};
  box.extents = {10e-6, 10e-6, 10e-6};
  box.n_total = 1e6;
  box.chi_aa = 2e-3;
  constexpr double tau = 2.5e-3;
  rep.settings = ensemble_json(ens, default_r);
  rep.settings["setup"] = box_json(box);
  rep.settings["tau_hold_s"] = tau;

  // phi at the analytic optimum on a 64-point grid.
  two_mode::TwoModeParams p;
  p.n_a = p.n_b = box.n_total / 2.0;
  p.chi_aa = box.chi_aa;
  p.tau_hold = tau;
  two_mode::Optimum best;
  double best_phi = 0.0;
  best.db = -1e300;
  for (int i = 0; i < 64; ++i) {
    p.phi = 2.0 * pi * i / 64.0;
    const auto o = two_mode::optimize_theta(p, Metric::Na);
    if (o.db > best.db) {
      best = o;
      best_phi = p.phi;
    }
  }
  rep.settings["phi_rad"] = best_phi;
  rep.add("analytic_db_Na", best.db, "dB");

  bogoliubov::BogoliubovParams bp;
  bp.chi_aa = box.chi_aa;
  bp.n_a = p.n_a;
  bp.n_total = box.n_total;
  bp.tau_hold = tau;
  bp.dim = 3;
  bp.extents = box.extents;
  rep.add("fraction_integral", bogoliubov::depletion_integral(bp));
  rep.add("fraction_sum", bogoliubov::depletion_sum(bp).fraction);

  const auto prep = experiments::prepare(box);
  const auto r = run(prep, experiments::squeeze_sequence(tau, false, experiments::theta_grid(256), {best_phi}), ens,
                     default_r);
  add_run_warnings(rep, r, "");
  add_best(rep, "", r.scan[experiments::best_point(r.scan, Metric::Na)], Metric::Na);
  const auto f = twa::noncondensed_fraction(r.events.back().moments, prep.lattice);
  rep.add("fraction_twa", f.value, "1", f.se);
  rep.tables.push_back(moments_table("moments", r.scan));
  rep.tables.push_back(squeezing_table("squeezing", r.scan, "box3d"));
  return rep;
}

std::vector<std::string> figure_names() {
  return {"2", "3", "4", "5", "6", "scaling1d", "scaling2d", "scaling3d", "box3d"};
}

Report figure(const std::string& name, const Ensemble& ens) {
  if (name == "2") return figure2();
  if (name == "3") return figure3();
  if (name == "4") return figure4(ens);
  if (name == "5") return figure5(ens);
  if (name == "6") return figure6(ens);
  if (name == "scaling1d") return scaling_figure(1);
  if (name == "scaling2d") return scaling_figure(2);
  if (name == "scaling3d") return scaling_figure(3);
  if (name == "box3d") return box3d_surrogate(ens);
  std::string list;
  for (const auto& n : figure_names()) list += (list.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown figure '" + name + "' (" + list + ")");
}

}  // namespace becsq::figures
