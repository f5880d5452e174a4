#include "becsq/cli/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "becsq/cli/units.hpp"
#include "becsq/error.hpp"

namespace becsq::cli {

using nlohmann::json;

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::two_mode_scan:
      return "two_mode_scan";
    case Kind::twa_run:
      return "twa_run";
    case Kind::bogoliubov_curve:
      return "bogoliubov_curve";
    case Kind::scaling_sweep:
      return "scaling_sweep";
    case Kind::figure:
      return "figure";
  }
  return "?";
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

// Unit conversion leaves last-bit noise ("400 us" vs "0.4 ms"); hash 15 digits.
nlohmann::json rounded(const nlohmann::json& j) {
  if (j.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", j.get<double>());
    return std::strtod(buf, nullptr);
  }
  if (j.is_object()) {
    auto out = nlohmann::json::object();
    for (const auto& [k, v] : j.items()) out[k] = rounded(v);
    return out;
  }
  if (j.is_array()) {
    auto out = nlohmann::json::array();
    for (const auto& v : j) out.push_back(rounded(v));
    return out;
  }
  return j;
}

}  // namespace

std::string RunConfig::hash() const { return sha256_hex(rounded(canonical).dump()); }

namespace {

// A YAML mapping being read, with its dotted path and canonical output.
class Reader {
 public:
  Reader(YAML::Node node, std::string path, json& out, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), out_(out), source_(source) {
    if (!node_.IsMap()) fail(node_, "expected a mapping");
  }

  [[noreturn]] void fail(const YAML::Node& n, const std::string& what, const std::string& key = "") const {
    std::string where = source_;
    if (n.Mark().line >= 0) where += ":" + std::to_string(n.Mark().line + 1);
    const std::string full = key.empty() ? path_ : (path_.empty() ? key : path_ + "." + key);
    throw ConfigError(where + ": " + (full.empty() ? "" : full + ": ") + what);
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const auto k = kv.first.as<std::string>();
      if (!ok.count(k)) {
        std::string list;
        for (const auto& a : ok) list += (list.empty() ? "" : ", ") + a;
        fail(kv.first, "unknown key (allowed: " + list + ")", k);
      }
    }
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) const {
    const auto n = node_[key];
    if (!n) fail(node_, "missing required key", key);
    return n;
  }

  double quantity(const std::string& key, Dimension d) {
    const double v = quantity_of(get(key), d, key);
    out_[key] = v;
    return v;
  }
  double quantity(const std::string& key, Dimension d, double fallback) {
    if (has(key)) return quantity(key, d);
    out_[key] = fallback;
    return fallback;
  }

  double number(const std::string& key) {
    const double v = number_of(get(key), key);
    out_[key] = v;
    return v;
  }
  double number(const std::string& key, double fallback) {
    if (has(key)) return number(key);
    out_[key] = fallback;
    return fallback;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t lo = 0) {
    const auto n = get(key);
    const double v = number_of(n, key);
    if (v < static_cast<double>(lo) || v != std::floor(v) || v > 1.8e19)
      fail(n, "expected an integer >= " + std::to_string(lo), key);
    const auto u = static_cast<std::uint64_t>(v);
    out_[key] = u;
    return u;
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback, std::uint64_t lo) {
    if (has(key)) return integer(key, lo);
    out_[key] = fallback;
    return fallback;
  }

  std::string text(const std::string& key) {
    const auto n = get(key);
    if (!n.IsScalar()) fail(n, "expected a string", key);
    const auto s = n.as<std::string>();
    out_[key] = s;
    return s;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (has(key)) return text(key);
    out_[key] = fallback;
    return fallback;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) {
      out_[key] = fallback;
      return fallback;
    }
    const auto n = get(key);
    try {
      const bool v = n.as<bool>();
      out_[key] = v;
      return v;
    } catch (const YAML::Exception&) {
      fail(n, "expected true or false", key);
    }
  }

  Reader child(const std::string& key) { return Reader(get(key), join(key), out_[key], source_); }

  /// Either a list of quantities, or {from, to, count[, spacing: linear|log]}
  /// with both ends included, or {count} alone for [0, pi) angle grids.
  std::vector<double> grid(const std::string& key, Dimension d, bool allow_count_only = false) {
    const auto n = get(key);
    std::vector<double> g;
    if (n.IsSequence()) {
      for (const auto& item : n) g.push_back(quantity_of(item, d, key));
    } else if (n.IsMap()) {
      json spec;
      Reader r(n, join(key), spec, source_);
      r.allow({"from", "to", "count", "spacing"});
      const auto count = r.integer("count", 1);
      if (allow_count_only && !r.has("from") && !r.has("to")) {
        g = experiments::theta_grid(count);
      } else {
        const double a = r.quantity("from", d), b = r.quantity("to", d);
        const auto spacing = r.text("spacing", "linear");
        if (spacing != "linear" && spacing != "log") r.fail(n, "spacing must be linear or log", "spacing");
        if (spacing == "log" && !(a > 0.0 && b > 0.0)) r.fail(n, "log spacing needs positive ends");
        for (std::uint64_t i = 0; i < count; ++i) {
          const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
          g.push_back(spacing == "log" ? a * std::pow(b / a, t) : a + (b - a) * t);
        }
      }
    } else {
      fail(n, "expected a list or a {from, to, count} mapping", key);
    }
    if (g.empty()) fail(n, "grid must be nonempty", key);
    out_[key] = g;
    return g;
  }

  const YAML::Node& node() const { return node_; }
  json& out() { return out_; }
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  double quantity_of(const YAML::Node& n, Dimension d, const std::string& key) const {
    if (!n.IsScalar()) fail(n, "expected '<number> <unit>'", key);
    try {
      return parse_quantity(n.as<std::string>(), d);
    } catch (const std::invalid_argument& e) {
      fail(n, e.what(), key);
    }
  }

  double number_of(const YAML::Node& n, const std::string& key) const {
    if (!n.IsScalar()) fail(n, "expected a number", key);
    const auto s = n.as<std::string>();
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || !std::isfinite(v))
      fail(n, "expected a plain dimensionless number, got '" + s + "'", key);
    return v;
  }

  YAML::Node node_;
  std::string path_;
  json& out_;
  const std::string& source_;
};

two_mode::TwoModeParams read_two_mode(Reader r) {
  r.allow({"n_a", "n_b", "chi_aa", "chi_ab", "chi_bb", "tau_hold"});
  two_mode::TwoModeParams p;
  p.n_a = r.number("n_a");
  p.n_b = r.number("n_b");
  p.chi_aa = r.quantity("chi_aa", Dimension::rate);
  p.chi_ab = r.quantity("chi_ab", Dimension::rate, 0.0);
  p.chi_bb = r.quantity("chi_bb", Dimension::rate, 0.0);
  p.tau_hold = r.quantity("tau_hold", Dimension::time);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(r.node(), e.what());
  }
  return p;
}

bogoliubov::BogoliubovParams read_bogoliubov(Reader r, bool tau_required) {
  r.allow({"chi_aa", "n_a", "n_total", "mass", "tau_hold", "theta", "dim", "extents"});
  bogoliubov::BogoliubovParams p;
  p.chi_aa = r.quantity("chi_aa", Dimension::rate);
  p.n_a = r.number("n_a");
  p.n_total = r.number("n_total", p.n_a);
  p.mass = r.quantity("mass", Dimension::mass, constants::rb87_mass);
  p.tau_hold = tau_required ? r.quantity("tau_hold", Dimension::time) : 0.0;
  if (!tau_required && r.has("tau_hold")) r.fail(r.node(), "tau_hold belongs in the top-level tau_hold grid", "tau_hold");
  p.theta = r.quantity("theta", Dimension::angle, 0.0);
  p.dim = static_cast<int>(r.integer("dim", 1));
  const auto ext = r.grid("extents", Dimension::length);
  if (p.dim < 1 || p.dim > 3) r.fail(r.node(), "dim must be 1, 2 or 3", "dim");
  if (ext.size() != static_cast<std::size_t>(p.dim)) r.fail(r.node(), "extents needs one length per dimension", "extents");
  for (int i = 0; i < p.dim; ++i) p.extents[i] = ext[i];
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    r.fail(r.node(), e.what());
  }
  return p;
}

void read_setup(Reader r, figures::TwaJob& job) {
  const auto kind = r.text("kind");
  if (kind == "line") {
    r.allow({"kind", "shape", "n_total", "chi_aa", "chi_ab", "chi_bb", "box", "points", "width", "mass"});
    job.setup = figures::TwaJob::Setup::line;
    auto& s = job.line;
    try {
      s.shape = experiments::parse_mode_shape(r.text("shape", "uniform"));
    } catch (const std::invalid_argument& e) {
      r.fail(r.node(), e.what(), "shape");
    }
    s.n_total = r.number("n_total");
    s.chi_aa = r.quantity("chi_aa", Dimension::rate);
    s.chi_ab = r.quantity("chi_ab", Dimension::rate, 0.0);
    s.chi_bb = r.quantity("chi_bb", Dimension::rate, 0.0);
    s.box = r.quantity("box", Dimension::length);
    s.points = r.integer("points", 1);
    s.width = s.shape == experiments::ModeShape::uniform ? r.quantity("width", Dimension::length, 0.0)
                                                         : r.quantity("width", Dimension::length);
    s.mass = r.quantity("mass", Dimension::mass, constants::rb87_mass);
  } else if (kind == "box") {
    r.allow({"kind", "dim", "points", "extents", "n_total", "chi_aa", "chi_ab", "chi_bb", "mass"});
    job.setup = figures::TwaJob::Setup::box;
    auto& s = job.box;
    s.dim = static_cast<int>(r.integer("dim", 1));
    if (s.dim < 1 || s.dim > 3) r.fail(r.node(), "dim must be 1, 2 or 3", "dim");
    const auto pts = r.get("points");
    if (!pts.IsSequence() || pts.size() != static_cast<std::size_t>(s.dim))
      r.fail(pts, "points needs one count per dimension", "points");
    json pj = json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto v = pts[i].as<std::string>();
      std::size_t c = 0;
      const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), c);
      if (ec != std::errc{} || end != v.data() + v.size() || c == 0) r.fail(pts[i], "expected a positive integer", "points");
      s.points[i] = c;
      pj.push_back(c);
    }
    r.out()["points"] = pj;
    const auto ext = r.grid("extents", Dimension::length);
    if (ext.size() != static_cast<std::size_t>(s.dim)) r.fail(r.node(), "extents needs one length per dimension", "extents");
    for (int i = 0; i < 3; ++i) {
      if (i >= s.dim) {
        s.points[i] = 1;
        s.extents[i] = 1.0;
      } else {
        s.extents[i] = ext[i];
      }
    }
    s.n_total = r.number("n_total");
    s.chi_aa = r.quantity("chi_aa", Dimension::rate);
    s.chi_ab = r.quantity("chi_ab", Dimension::rate, 0.0);
    s.chi_bb = r.quantity("chi_bb", Dimension::rate, 0.0);
    s.mass = r.quantity("mass", Dimension::mass, constants::rb87_mass);
  } else {
    r.fail(r.node(), "kind must be line or box", "kind");
  }
}

twa::PulseSequence read_sequence(const YAML::Node& n, json& out, const std::string& source, Reader& parent) {
  if (!n.IsSequence()) parent.fail(n, "expected a list of events", "sequence");
  twa::PulseSequence seq;
  out = json::array();
  for (const auto& ev : n) {
    if (ev.IsScalar() && ev.as<std::string>() == "pi_pulse") {
      seq.events.push_back(twa::PiPulse{});
      out.push_back("pi_pulse");
      continue;
    }
    if (!ev.IsMap() || ev.size() != 1) parent.fail(ev, "event must be pi_pulse, {hold: <time>} or {beamsplit: {theta, phi}}", "sequence");
    json e;
    Reader r(ev, "sequence[" + std::to_string(out.size()) + "]", e, source);
    r.allow({"hold", "beamsplit"});
    if (r.has("hold")) {
      const double t = r.quantity("hold", Dimension::time);
      if (t < 0.0) r.fail(ev, "hold must be >= 0", "hold");
      seq.events.push_back(twa::Hold{t});
    } else {
      auto b = r.child("beamsplit");
      b.allow({"theta", "phi"});
      const double th = b.quantity("theta", Dimension::angle);
      const double ph = b.quantity("phi", Dimension::angle, 0.0);
      seq.events.push_back(twa::Beamsplit{th, ph});
    }
    out.push_back(e);
  }
  return seq;
}

two_mode::Metric read_metric(Reader& r) {
  const auto m = r.text("metric", "Na");
  if (m == "Na") return two_mode::Metric::Na;
  if (m == "Nb") return two_mode::Metric::Nb;
  if (m == "diff") return two_mode::Metric::Difference;
  r.fail(r.node(), "metric must be Na, Nb or diff", "metric");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig c;
  if (!root || root.IsNull()) throw ConfigError(source + ": empty configuration");
  Reader r(root, "", c.canonical, source);
  const auto kind = r.text("experiment");

  auto common = [&] {
    if (r.has("seed")) c.seed = r.integer("seed", 0);
    if (r.has("trajectories")) c.trajectories = r.integer("trajectories", 2);
    if (r.has("workers")) c.workers = r.integer("workers", 1);
  };

  if (kind == "two_mode_scan") {
    c.kind = Kind::two_mode_scan;
    r.allow({"experiment", "two_mode", "scan"});
    c.two_mode.params = read_two_mode(r.child("two_mode"));
    auto s = r.child("scan");
    s.allow({"theta", "phi"});
    c.two_mode.theta_grid = s.grid("theta", Dimension::angle, true);
    c.two_mode.phi_grid = s.grid("phi", Dimension::angle);
  } else if (kind == "twa_run") {
    c.kind = Kind::twa_run;
    r.allow({"experiment", "seed", "trajectories", "workers", "setup", "sequence", "scan", "dt", "energy_cutoff",
             "metric", "snapshots"});
    common();
    read_setup(r.child("setup"), c.twa);
    c.twa.sequence = read_sequence(r.get("sequence"), c.canonical["sequence"], source, r);
    if (r.has("scan")) {
      auto s = r.child("scan");
      s.allow({"theta", "phi"});
      twa::RecombinationScan scan;
      scan.theta_grid = s.grid("theta", Dimension::angle, true);
      scan.phi_grid = s.grid("phi", Dimension::angle);
      c.twa.sequence.scan = std::move(scan);
    }
    c.twa.dt = r.quantity("dt", Dimension::time, 0.0);
    if (c.twa.dt < 0.0) r.fail(r.get("dt"), "dt must be >= 0", "dt");
    if (r.has("energy_cutoff")) c.twa.options.energy_cutoff = r.quantity("energy_cutoff", Dimension::energy);
    c.twa.metric = read_metric(r);
    c.snapshots = r.integer("snapshots", 0, 0);
    try {
      c.twa.sequence.validate();
    } catch (const std::invalid_argument& e) {
      r.fail(r.get("sequence"), e.what(), "sequence");
    }
  } else if (kind == "bogoliubov_curve") {
    c.kind = Kind::bogoliubov_curve;
    r.allow({"experiment", "bogoliubov", "tau_hold"});
    c.bogoliubov.params = read_bogoliubov(r.child("bogoliubov"), false);
    c.bogoliubov.tau_grid = r.grid("tau_hold", Dimension::time);
    for (double t : c.bogoliubov.tau_grid)
      if (t < 0.0) r.fail(r.get("tau_hold"), "hold times must be >= 0", "tau_hold");
  } else if (kind == "scaling_sweep") {
    c.kind = Kind::scaling_sweep;
    r.allow({"experiment", "bogoliubov", "sizes", "with_sum"});
    c.scaling.base = read_bogoliubov(r.child("bogoliubov"), true);
    c.scaling.sizes = r.grid("sizes", Dimension::length);
    if (c.scaling.sizes.size() < 2) r.fail(r.get("sizes"), "need at least two sizes", "sizes");
    c.scaling.with_sum = r.flag("with_sum", true);
  } else if (kind == "figure") {
    c.kind = Kind::figure;
    r.allow({"experiment", "figure", "seed", "trajectories", "workers", "mode_shape"});
    common();
    c.figure = r.text("figure");
    bool known = false;
    for (const auto& n : figures::figure_names()) known = known || n == c.figure;
    if (!known) r.fail(r.get("figure"), "unknown figure '" + c.figure + "'", "figure");
    if (r.has("mode_shape")) {
      try {
        c.mode_shape = experiments::parse_mode_shape(r.text("mode_shape"));
      } catch (const std::invalid_argument& e) {
        r.fail(r.get("mode_shape"), e.what(), "mode_shape");
      }
    }
  } else {
    r.fail(r.get("experiment"),
           "unknown experiment '" + kind + "' (two_mode_scan, twa_run, bogoliubov_curve, scaling_sweep, figure)",
           "experiment");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

RunConfig figure_config(const std::string& name) {
  return parse_config("experiment: figure\nfigure: \"" + name + "\"\n", "figure " + name);
}

}  // namespace becsq::cli
