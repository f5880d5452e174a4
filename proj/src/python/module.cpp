#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "becsq/bogoliubov.hpp"
#include "becsq/error.hpp"
#include "becsq/experiments.hpp"
#include "becsq/figures.hpp"
#include "becsq/mode_reduction.hpp"
#include "becsq/two_mode.hpp"

namespace py = pybind11;
using namespace becsq;

namespace {

py::object cell_to_py(const Cell& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return py::str(*s);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return py::int_(*i);
  return py::float_(std::get<double>(c));
}

// Tables become {column: list}, scalars {name: (value, se, unit)}.
py::dict report_to_py(const Report& r) {
  py::dict tables;
  for (const auto& t : r.tables) {
    py::dict cols;
    for (std::size_t j = 0; j < t.columns.size(); ++j) {
      py::list values;
      for (const auto& row : t.rows) values.append(cell_to_py(row[j]));
      cols[py::str(t.columns[j].name)] = values;
    }
    tables[py::str(t.name)] = cols;
  }
  py::dict summary;
  for (const auto& s : r.summary) summary[py::str(s.name)] = py::make_tuple(s.value, s.se, s.unit);
  py::dict out;
  out["kind"] = r.kind;
  out["tables"] = tables;
  out["summary"] = summary;
  out["warnings"] = r.warnings;
  out["settings"] = py::module_::import("json").attr("loads")(r.settings.dump());
  return out;
}

two_mode::Metric parse_metric(const std::string& m) {
  if (m == "Na") return two_mode::Metric::Na;
  if (m == "Nb") return two_mode::Metric::Nb;
  if (m == "diff") return two_mode::Metric::Difference;
  throw std::invalid_argument("metric must be 'Na', 'Nb' or 'diff'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Relative number squeezing in two-component condensates (C++ core).";

  py::register_exception<Error>(m, "BecsqError", PyExc_RuntimeError);
  py::register_exception<TruncationError>(m, "TruncationError", PyExc_RuntimeError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<InstabilityError>(m, "InstabilityError", PyExc_RuntimeError);

  py::class_<two_mode::TwoModeParams>(m, "TwoModeParams")
      .def(py::init([](double n_a, double n_b, double chi_aa, double chi_ab, double chi_bb, double tau_hold,
                       double theta, double phi) {
             two_mode::TwoModeParams p{n_a, n_b, chi_aa, chi_ab, chi_bb, tau_hold, theta, phi};
             p.validate();
             return p;
           }),
           py::arg("n_a"), py::arg("n_b"), py::arg("chi_aa") = 0.0, py::arg("chi_ab") = 0.0, py::arg("chi_bb") = 0.0,
           py::arg("tau_hold") = 0.0, py::arg("theta") = 0.0, py::arg("phi") = 0.0)
      .def_readwrite("n_a", &two_mode::TwoModeParams::n_a)
      .def_readwrite("n_b", &two_mode::TwoModeParams::n_b)
      .def_readwrite("chi_aa", &two_mode::TwoModeParams::chi_aa)
      .def_readwrite("chi_ab", &two_mode::TwoModeParams::chi_ab)
      .def_readwrite("chi_bb", &two_mode::TwoModeParams::chi_bb)
      .def_readwrite("tau_hold", &two_mode::TwoModeParams::tau_hold)
      .def_readwrite("theta", &two_mode::TwoModeParams::theta)
      .def_readwrite("phi", &two_mode::TwoModeParams::phi);

  py::class_<two_mode::CoherentFactors>(m, "CoherentFactors")
      .def_readonly("A", &two_mode::CoherentFactors::A)
      .def_readonly("A2", &two_mode::CoherentFactors::A2)
      .def_readonly("B", &two_mode::CoherentFactors::B)
      .def_readonly("B2", &two_mode::CoherentFactors::B2)
      .def_readonly("D", &two_mode::CoherentFactors::D);

  py::class_<two_mode::SqueezingResult>(m, "SqueezingResult")
      .def_readonly("N_a", &two_mode::SqueezingResult::N_a)
      .def_readonly("N_b", &two_mode::SqueezingResult::N_b)
      .def_readonly("var_Na", &two_mode::SqueezingResult::var_Na)
      .def_readonly("var_Nb", &two_mode::SqueezingResult::var_Nb)
      .def_readonly("var_diff", &two_mode::SqueezingResult::var_diff)
      .def_readonly("db_Na", &two_mode::SqueezingResult::db_Na)
      .def_readonly("db_Nb", &two_mode::SqueezingResult::db_Nb)
      .def_readonly("db_diff", &two_mode::SqueezingResult::db_diff)
      .def_readonly("degenerate", &two_mode::SqueezingResult::degenerate);

  m.def("coherent_factors", &two_mode::coherent_factors, py::arg("params"));
  m.def("evaluate", &two_mode::evaluate, py::arg("params"));
  m.def("fock_oracle", [](const two_mode::TwoModeParams& p, std::size_t cutoff) {
        return two_mode::fock_oracle(p, cutoff ? cutoff : two_mode::fock_cutoff_for(p));
      }, py::arg("params"), py::arg("cutoff") = 0, "Truncated Fock-space evolution; cutoff 0 picks one automatically.");
  m.def("optimize_theta", [](const two_mode::TwoModeParams& p, const std::string& metric) {
        const auto o = two_mode::optimize_theta(p, parse_metric(metric));
        return py::make_tuple(o.theta, o.db);
      }, py::arg("params"), py::arg("metric") = "Na", "Best (theta, dB) over [0, pi) at the params' phi.");
  m.def("scan_recombination",
        [](const two_mode::TwoModeParams& p, std::vector<double> thetas, std::vector<double> phis) {
          return report_to_py(figures::run_two_mode({p, std::move(thetas), std::move(phis)}));
        },
        py::arg("params"), py::arg("theta_grid"), py::arg("phi_grid"));

  auto mr = m.def_submodule("mode_reduction");
  mr.def("u_from_scattering", [](double a_aa, double a_ab, double a_bb, double mass) {
        const auto c = mode_reduction::u_from_scattering({a_aa, a_ab, a_bb, mass});
        return py::make_tuple(c.U_aa, c.U_ab, c.U_bb);
      }, py::arg("a_aa"), py::arg("a_ab") = 0.0, py::arg("a_bb") = 0.0, py::arg("mass") = constants::rb87_mass);
  mr.def("chi_overlap", [](py::array_t<double, py::array::c_style | py::array::forcecast> rho, double dV, double U) {
        return mode_reduction::chi_overlap(std::span<const double>(rho.data(), static_cast<std::size_t>(rho.size())), dV, U);
      }, py::arg("density"), py::arg("dV"), py::arg("U"));
  auto harmonic = [](std::array<double, 3> w, std::optional<double> p) {
    mode_reduction::TrapSpec t;
    t.kind = mode_reduction::TrapKind::harmonic;
    t.omegas = w;
    t.filter_p = p;
    return t;
  };
  mr.def("chi_gaussian", [=](std::array<double, 3> omegas, double U, double mass) {
        return mode_reduction::chi_gaussian(harmonic(omegas, std::nullopt), U, mass);
      }, py::arg("omegas"), py::arg("U"), py::arg("mass") = constants::rb87_mass);
  mr.def("chi_thomas_fermi", [=](std::array<double, 3> omegas, double U, double N, double mass) {
        return mode_reduction::chi_thomas_fermi(harmonic(omegas, std::nullopt), U, mass, N);
      }, py::arg("omegas"), py::arg("U"), py::arg("N"), py::arg("mass") = constants::rb87_mass);
  mr.def("chi_filtered_gaussian", [=](std::array<double, 3> omegas, double U, double p, double mass) {
        return mode_reduction::chi_filtered_gaussian(harmonic(omegas, p), U, mass);
      }, py::arg("omegas"), py::arg("U"), py::arg("p"), py::arg("mass") = constants::rb87_mass);
  mr.def("chi_uniform", [](std::array<double, 3> extents, double U) {
        mode_reduction::TrapSpec t;
        t.kind = mode_reduction::TrapKind::box;
        t.extents = extents;
        return mode_reduction::chi_uniform(t, U);
      }, py::arg("extents"), py::arg("U"));

  auto bg = m.def_submodule("bogoliubov");
  py::class_<bogoliubov::BogoliubovParams>(bg, "BogoliubovParams")
      .def(py::init([](double chi_aa, double n_a, double tau_hold, std::vector<double> extents, double n_total,
                       double theta, double mass) {
             bogoliubov::BogoliubovParams p;
             p.chi_aa = chi_aa;
             p.n_a = n_a;
             p.tau_hold = tau_hold;
             p.dim = static_cast<int>(extents.size());
             if (p.dim < 1 || p.dim > 3) throw std::invalid_argument("extents must hold 1 to 3 lengths");
             for (int i = 0; i < p.dim; ++i) p.extents[i] = extents[i];
             p.n_total = n_total;
             p.theta = theta;
             p.mass = mass;
             p.validate();
             return p;
           }),
           py::arg("chi_aa"), py::arg("n_a"), py::arg("tau_hold"), py::arg("extents"), py::arg("n_total") = 0.0,
           py::arg("theta") = 0.0, py::arg("mass") = constants::rb87_mass)
      .def_readwrite("tau_hold", &bogoliubov::BogoliubovParams::tau_hold)
      .def_readwrite("theta", &bogoliubov::BogoliubovParams::theta)
      .def_property_readonly("Lambda", &bogoliubov::BogoliubovParams::Lambda);
  bg.def("occupation_k", &bogoliubov::occupation_k, py::arg("params"), py::arg("k"));
  bg.def("depletion_sum", [](const bogoliubov::BogoliubovParams& p) { return bogoliubov::depletion_sum(p).fraction; },
         py::arg("params"));
  bg.def("depletion_integral", &bogoliubov::depletion_integral, py::arg("params"));
  bg.def("f_integral", &bogoliubov::f_integral, py::arg("dim"), py::arg("Lambda"));
  bg.def("validity_metric", &bogoliubov::validity_metric, py::arg("params"));
  bg.def("scaling_prediction", [](const bogoliubov::BogoliubovParams& base, std::vector<double> sizes, bool with_sum) {
        return report_to_py(figures::run_scaling({base, std::move(sizes), with_sum}));
      }, py::arg("base"), py::arg("sizes"), py::arg("with_sum") = true);

  m.def("twa_box", [](std::vector<std::size_t> points, std::vector<double> extents, double n_total, double chi_aa,
                      double chi_ab, double chi_bb, double tau_hold, bool pi_pulse, std::vector<double> theta_grid,
                      std::vector<double> phi_grid, std::size_t trajectories, std::uint64_t seed, std::size_t workers) {
        if (points.empty() || points.size() > 3 || points.size() != extents.size())
          throw std::invalid_argument("points and extents need 1 to 3 matching entries");
        figures::TwaJob job;
        job.setup = figures::TwaJob::Setup::box;
        job.box.dim = static_cast<int>(points.size());
        for (std::size_t i = 0; i < 3; ++i) {
          job.box.points[i] = i < points.size() ? points[i] : 1;
          job.box.extents[i] = i < points.size() ? extents[i] : 1.0;
        }
        job.box.n_total = n_total;
        job.box.chi_aa = chi_aa;
        job.box.chi_ab = chi_ab;
        job.box.chi_bb = chi_bb;
        job.sequence = experiments::squeeze_sequence(tau_hold, pi_pulse, std::move(theta_grid), std::move(phi_grid));
        job.options.trajectories = trajectories;
        job.options.seed = seed;
        job.options.workers = workers;
        Report rep;
        {
          py::gil_scoped_release release;
          rep = figures::run_twa(job);
        }
        return report_to_py(rep);
      },
      py::arg("points"), py::arg("extents"), py::arg("n_total"), py::arg("chi_aa"), py::arg("chi_ab") = 0.0,
      py::arg("chi_bb") = 0.0, py::arg("tau_hold") = 0.0, py::arg("pi_pulse") = false,
      py::arg("theta_grid") = std::vector<double>{0.0}, py::arg("phi_grid") = std::vector<double>{0.0},
      py::arg("trajectories") = 100, py::arg("seed") = 1, py::arg("workers") = 0,
      "Uniform periodic box: beamsplit, hold (optionally split by a pi pulse), recombination scan.");

  m.def("figure", [](const std::string& name, std::size_t trajectories, std::uint64_t seed, std::size_t workers) {
        Report rep;
        {
          py::gil_scoped_release release;
          rep = figures::figure(name, {trajectories, seed, workers});
        }
        return report_to_py(rep);
      }, py::arg("name"), py::arg("trajectories") = 0, py::arg("seed") = 1, py::arg("workers") = 0,
      "Figure job by name ('2', '3', '4', '5', '6', 'scaling1d', ...); trajectories 0 = job default.");
  m.attr("figure_names") = figures::figure_names();
}
