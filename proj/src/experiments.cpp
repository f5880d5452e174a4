#include "becsq/experiments.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "becsq/mode_reduction.hpp"

namespace becsq::experiments {

using constants::hbar;
using constants::pi;

std::string to_string(ModeShape shape) {
  switch (shape) {
    case ModeShape::uniform:
      return "uniform";
    case ModeShape::thomas_fermi:
      return "thomas_fermi";
    case ModeShape::gaussian:
      return "gaussian";
  }
  return "?";
}

ModeShape parse_mode_shape(std::string_view name) {
  if (name == "uniform") return ModeShape::uniform;
  if (name == "thomas_fermi") return ModeShape::thomas_fermi;
  if (name == "gaussian") return ModeShape::gaussian;
  throw std::invalid_argument("unknown mode shape '" + std::string(name) + "' (uniform, thomas_fermi, gaussian)");
}

namespace {

Prepared finish(FieldLattice lattice, std::vector<double> rho, double n_total, double chi_aa, double chi_ab,
                double chi_bb, double mass) {
  const double dV = lattice.dV();
  double norm = 0.0;
  for (double r : rho) norm += r;
  norm *= dV;
  for (double& r : rho) r /= norm;

  Prepared p;
  p.lattice = lattice;
  p.overlap = mode_reduction::chi_overlap(rho, dV, hbar);
  p.hold.mass = mass;
  p.hold.U_aa = hbar * chi_aa / p.overlap;
  p.hold.U_ab = hbar * chi_ab / p.overlap;
  p.hold.U_bb = hbar * chi_bb / p.overlap;
  p.initial.mean_a.resize(rho.size());
  p.initial.mean_b.assign(rho.size(), cplx{});
  for (std::size_t i = 0; i < rho.size(); ++i) p.initial.mean_a[i] = std::sqrt(n_total * rho[i]);
  return p;
}

}  // namespace

Prepared prepare(const Line1D& s) {
  if (!(s.n_total > 0.0)) throw std::invalid_argument("n_total must be > 0");
  if (s.chi_aa < 0.0 || s.chi_ab < 0.0 || s.chi_bb < 0.0) throw std::invalid_argument("chi values must be >= 0");
  const auto lattice = FieldLattice::make(1, {s.points, 1, 1}, {s.box, 1.0, 1.0});
  const auto x = lattice.x_axis(0);
  std::vector<double> rho(x.size(), 1.0);
  if (s.shape != ModeShape::uniform) {
    if (!(s.width > 0.0)) throw std::invalid_argument("mode width must be > 0");
    const double w = s.width;
    if (s.shape == ModeShape::gaussian) {
      if (6.0 * w > s.box / 2.0) throw std::invalid_argument("gaussian mode does not fit the box (need 12 sigma)");
      for (std::size_t i = 0; i < x.size(); ++i) rho[i] = std::exp(-x[i] * x[i] / (2.0 * w * w));
    } else {
      if (w >= s.box / 2.0) throw std::invalid_argument("Thomas-Fermi radius does not fit the box");
      for (std::size_t i = 0; i < x.size(); ++i) rho[i] = std::max(0.0, 1.0 - x[i] * x[i] / (w * w));
    }
  }
  Prepared p = finish(lattice, std::move(rho), s.n_total, s.chi_aa, s.chi_ab, s.chi_bb, s.mass);

  if (s.shape == ModeShape::gaussian) {
    p.trap_omega = hbar / (2.0 * s.mass * s.width * s.width);
  } else if (s.shape == ModeShape::thomas_fermi) {
    // mu = 3 N U / (4 R) = m w^2 R^2 / 2 in 1D.
    const double mu = 3.0 * s.n_total * p.hold.U_aa / (4.0 * s.width);
    p.trap_omega = std::sqrt(2.0 * mu / (s.mass * s.width * s.width));
  }
  if (p.trap_omega > 0.0) {
    std::vector<double> V(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) V[i] = 0.5 * s.mass * p.trap_omega * p.trap_omega * x[i] * x[i];
    p.hold.V_a = V;
    p.hold.V_b = std::move(V);
  }
  return p;
}

Prepared prepare(const Box& s) {
  if (!(s.n_total > 0.0)) throw std::invalid_argument("n_total must be > 0");
  if (s.chi_aa < 0.0 || s.chi_ab < 0.0 || s.chi_bb < 0.0) throw std::invalid_argument("chi values must be >= 0");
  const auto lattice = FieldLattice::make(s.dim, s.points, s.extents);
  return finish(lattice, std::vector<double>(lattice.size(), 1.0), s.n_total, s.chi_aa, s.chi_ab, s.chi_bb, s.mass);
}

twa::PulseSequence squeeze_sequence(double tau_hold, bool pi_pulse, std::vector<double> theta_grid,
                                    std::vector<double> phi_grid) {
  twa::PulseSequence seq;
  seq.events.push_back(twa::Beamsplit{pi / 4.0, 0.0});
  if (pi_pulse) {
    seq.events.push_back(twa::Hold{tau_hold / 2.0});
    seq.events.push_back(twa::PiPulse{});
    seq.events.push_back(twa::Hold{tau_hold / 2.0});
  } else {
    seq.events.push_back(twa::Hold{tau_hold});
  }
  seq.scan = twa::RecombinationScan{std::move(theta_grid), std::move(phi_grid)};
  seq.validate();
  return seq;
}

std::vector<double> theta_grid(std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = pi * static_cast<double>(i) / static_cast<double>(count);
  return g;
}

double db_of(const twa::NumberEstimate& e, two_mode::Metric metric) {
  switch (metric) {
    case two_mode::Metric::Na:
      return e.db_Na;
    case two_mode::Metric::Nb:
      return e.db_Nb;
    case two_mode::Metric::Difference:
      return e.db_diff;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double se_db_of(const twa::NumberEstimate& e, two_mode::Metric metric) {
  switch (metric) {
    case two_mode::Metric::Na:
      return e.se_db_Na;
    case two_mode::Metric::Nb:
      return e.se_db_Nb;
    case two_mode::Metric::Difference:
      return e.se_db_diff;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::size_t best_point(const std::vector<twa::ScanPoint>& scan, two_mode::Metric metric) {
  if (scan.empty()) throw std::invalid_argument("best_point: empty scan");
  std::size_t best = scan.size();
  for (std::size_t i = 0; i < scan.size(); ++i) {
    const double v = db_of(scan[i].numbers, metric);
    if (!std::isfinite(v)) continue;
    if (best == scan.size()) {
      best = i;
      continue;
    }
    const double b = db_of(scan[best].numbers, metric);
    const double tol = 1e-12 * std::max(std::abs(v), std::abs(b));
    if (v > b + tol) {
      best = i;
    } else if (std::abs(v - b) <= tol) {
      const auto& p = scan[i];
      const auto& q = scan[best];
      if (p.theta < q.theta || (p.theta == q.theta && p.phi < q.phi)) best = i;
    }
  }
  if (best == scan.size()) throw std::runtime_error("best_point: no finite squeezing value in scan");
  return best;
}

}  // namespace becsq::experiments
