#include "becsq/twa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "becsq/error.hpp"
#include "becsq/rng.hpp"
#include "becsq/snapshot.hpp"
#include "becsq/two_mode.hpp"

namespace becsq::twa {

using constants::hbar;

namespace {

constexpr double kDbPerLn = 10.0 / 2.302585092994046;

struct StepPlan {
  std::size_t full = 0;
  double remainder = 0.0;
  std::size_t total() const { return full + (remainder > 0.0 ? 1 : 0); }
};

StepPlan plan_steps(double duration, double dt) {
  StepPlan p;
  if (duration <= 0.0) return p;
  const double ratio = duration / dt;
  p.full = static_cast<std::size_t>(std::floor(ratio + 1e-9));
  p.remainder = duration - static_cast<double>(p.full) * dt;
  if (p.remainder <= 1e-9 * dt) p.remainder = 0.0;
  return p;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double sum_norm(const std::vector<cplx>& f, double dV) {
  double s = 0.0;
  for (const auto& z : f) s += std::norm(z);
  return s * dV;
}

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;
};

template <class F>
MeanVar mean_var(std::size_t begin, std::size_t end, F value) {
  const std::size_t n = end - begin;
  MeanVar mv;
  if (n == 0) return mv;
  double s = 0.0;
  for (std::size_t i = begin; i < end; ++i) s += value(i);
  mv.mean = s / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double d = value(i) - mv.mean;
    ss += d * d;
  }
  mv.var = n > 1 ? ss / static_cast<double>(n - 1) : std::numeric_limits<double>::quiet_NaN();
  return mv;
}

double standard_error(const std::vector<double>& batch_values) {
  const std::size_t nb = batch_values.size();
  if (nb < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto mv = mean_var(0, nb, [&](std::size_t i) { return batch_values[i]; });
  return std::sqrt(mv.var / static_cast<double>(nb));
}

// Pointwise and spectral observation of one trajectory.
class Observer {
 public:
  Observer(const FieldLattice& lattice, const SpectralPlan& plan, const std::vector<char>& counted)
      : lattice_(lattice), plan_(plan), counted_(counted), fa_(lattice.size()), fb_(lattice.size()),
        pa_(lattice.size()), pb_(lattice.size()) {}

  Observation observe(const FieldPair& f) {
    const std::size_t M = lattice_.size();
    const double dV = lattice_.dV();
    const double threshold = -1.5 / dV;
    Observation o;
    double low = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      const double ra = std::norm(f.a[i]);
      const double rb = std::norm(f.b[i]);
      o.Wa += ra;
      o.Wb += rb;
      o.X += std::conj(f.a[i]) * f.b[i];
      if (ra - 1.0 / dV < threshold || rb - 1.0 / dV < threshold) low += 1.0;
    }
    o.Wa *= dV;
    o.Wb *= dV;
    o.X *= dV;
    o.low_density_points = low;

    std::copy(f.a.begin(), f.a.end(), fa_.begin());
    std::copy(f.b.begin(), f.b.end(), fb_.begin());
    plan_.forward(fa_.data());
    plan_.forward(fb_.data());
    const double scale = dV / static_cast<double>(M);
    for (std::size_t k = 0; k < M; ++k) {
      pa_[k] = std::norm(fa_[k]) * scale;
      pb_[k] = std::norm(fb_[k]) * scale;
      if (counted_[k]) {
        o.Ka += pa_[k];
        o.Kb += pb_[k];
        o.Y += std::conj(fa_[k]) * fb_[k] * scale;
      }
    }
    return o;
  }

  const std::vector<double>& power_a() const { return pa_; }
  const std::vector<double>& power_b() const { return pb_; }

 private:
  const FieldLattice& lattice_;
  const SpectralPlan& plan_;
  const std::vector<char>& counted_;
  std::vector<cplx> fa_, fb_;
  std::vector<double> pa_, pb_;
};

enum class FailureKind { instability, step_size, other };

[[noreturn]] void rethrow_failure(FailureKind kind, const std::string& message) {
  switch (kind) {
    case FailureKind::instability:
      throw InstabilityError(message);
    case FailureKind::step_size:
      throw StepSizeError(message);
    case FailureKind::other:
      break;
  }
  throw Error(message);
}

}  // namespace

double default_time_step(const FieldLattice& lattice, const HoldParams& params, const FieldPair& mean_fields) {
  lattice.validate();
  const std::size_t M = lattice.size();
  const double dV = lattice.dV();
  double rho_max = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    const double ra = i < mean_fields.a.size() ? std::norm(mean_fields.a[i]) : 0.0;
    const double rb = i < mean_fields.b.size() ? std::norm(mean_fields.b[i]) : 0.0;
    rho_max = std::max(rho_max, ra + rb);
  }
  rho_max += 2.0 / dV;
  const double u_max = std::max(std::abs(params.U_aa) + std::abs(params.U_ab), std::abs(params.U_bb) + std::abs(params.U_ab));
  const double local_rate = u_max * rho_max / hbar;

  double k2_max = 0.0;
  for (double k2 : lattice.k_squared()) k2_max = std::max(k2_max, k2);
  const double kinetic_rate = hbar * k2_max / (2.0 * params.mass);

  double dt = std::numeric_limits<double>::infinity();
  if (local_rate > 0.0) dt = std::min(dt, 0.05 / local_rate);
  if (kinetic_rate > 0.0) dt = std::min(dt, 0.5 / kinetic_rate);
  if (!std::isfinite(dt)) dt = 1e-3;
  return dt;
}

FieldPair sample_initial(const FieldLattice& lattice, std::span<const cplx> mean_a, std::span<const cplx> mean_b,
                         std::uint64_t seed, std::uint64_t trajectory) {
  const std::size_t M = lattice.size();
  if (mean_a.size() != M || mean_b.size() != M) throw std::invalid_argument("sample_initial: mean field size != lattice size");
  const double sigma = std::sqrt(0.25 / lattice.dV());
  const Philox rng_a(seed, trajectory, 0);
  const Philox rng_b(seed, trajectory, 1);
  FieldPair f;
  f.a.resize(M);
  f.b.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    const auto ga = rng_a.normal_pair(static_cast<std::uint32_t>(i));
    const auto gb = rng_b.normal_pair(static_cast<std::uint32_t>(i));
    f.a[i] = mean_a[i] + sigma * cplx{ga[0], ga[1]};
    f.b[i] = mean_b[i] + sigma * cplx{gb[0], gb[1]};
  }
  return f;
}

HoldIntegrator::HoldIntegrator(const FieldLattice& lattice, HoldParams params)
    : lattice_(lattice), params_(std::move(params)), plan_(lattice) {
  const std::size_t M = lattice_.size();
  if (!(params_.mass > 0.0)) throw std::invalid_argument("HoldParams: mass must be > 0");
  if ((!params_.V_a.empty() && params_.V_a.size() != M) || (!params_.V_b.empty() && params_.V_b.size() != M)) {
    throw std::invalid_argument("HoldParams: potential size != lattice size");
  }
  const auto k2 = lattice_.k_squared();
  omega0_.resize(M);
  for (std::size_t i = 0; i < M; ++i) omega0_[i] = hbar * k2[i] / (2.0 * params_.mass);
  // A component with no potential and no coupling evolves freely and is
  // propagated in one exact kinetic step.
  free_a_ = all_zero(params_.V_a) && params_.U_aa == 0.0 && params_.U_ab == 0.0;
  free_b_ = all_zero(params_.V_b) && params_.U_bb == 0.0 && params_.U_ab == 0.0;
}

void HoldIntegrator::local_step(FieldPair& f, double h) const {
  const std::size_t M = lattice_.size();
  const double dV = lattice_.dV();
  const double inv_dV = 1.0 / dV;
  const double limit = params_.overflow_guard * inv_dV;
  const double scale = h / hbar;
  const bool va = !params_.V_a.empty();
  const bool vb = !params_.V_b.empty();
  for (std::size_t i = 0; i < M; ++i) {
    const double ra = std::norm(f.a[i]);
    const double rb = std::norm(f.b[i]);
    if (!(ra <= limit) || !(rb <= limit)) {
      std::ostringstream msg;
      msg << "field amplitude left the overflow guard at grid point " << i;
      throw InstabilityError(msg.str());
    }
    if (!free_a_) {
      const double e = (va ? params_.V_a[i] : 0.0) + params_.U_aa * (ra - inv_dV) + params_.U_ab * (rb - 0.5 * inv_dV);
      f.a[i] *= std::polar(1.0, -e * scale);
    }
    if (!free_b_) {
      const double e = (vb ? params_.V_b[i] : 0.0) + params_.U_bb * (rb - inv_dV) + params_.U_ab * (ra - 0.5 * inv_dV);
      f.b[i] *= std::polar(1.0, -e * scale);
    }
  }
}

void HoldIntegrator::kinetic_step(std::vector<cplx>& field, double h, std::vector<cplx>& phase_cache,
                                  double& cached_h) const {
  const std::size_t M = lattice_.size();
  if (M == 1) return;
  if (cached_h != h) {
    phase_cache.resize(M);
    const double norm = 1.0 / static_cast<double>(M);
    for (std::size_t k = 0; k < M; ++k) phase_cache[k] = std::polar(norm, -omega0_[k] * h);
    cached_h = h;
  }
  plan_.forward(field.data());
  for (std::size_t k = 0; k < M; ++k) field[k] *= phase_cache[k];
  plan_.backward(field.data());
}

HoldReport HoldIntegrator::evolve(FieldPair& f, double duration, double dt) const {
  if (!(duration >= 0.0)) throw std::invalid_argument("evolve_hold: duration must be >= 0");
  if (!(dt > 0.0)) throw std::invalid_argument("evolve_hold: dt must be > 0");
  const std::size_t M = lattice_.size();
  if (f.a.size() != M || f.b.size() != M) throw std::invalid_argument("evolve_hold: field size != lattice size");

  HoldReport report;
  report.dt = dt;
  if (duration == 0.0) return report;

  const double dV = lattice_.dV();
  const double wa0 = sum_norm(f.a, dV);
  const double wb0 = sum_norm(f.b, dV);

  const StepPlan steps = plan_steps(duration, dt);
  report.steps = steps.total();
  report.last_step = steps.remainder > 0.0 ? steps.remainder : dt;

  std::vector<cplx> cache;
  double cached_h = -1.0;
  if (free_a_) kinetic_step(f.a, duration, cache, cached_h);
  if (free_b_) kinetic_step(f.b, duration, cache, cached_h);

  if (!free_a_ || !free_b_) {
    cached_h = -1.0;
    double previous = 0.0;
    for (std::size_t s = 0; s < report.steps; ++s) {
      const double h = s < steps.full ? dt : steps.remainder;
      local_step(f, 0.5 * (previous + h));
      if (!free_a_) kinetic_step(f.a, h, cache, cached_h);
      if (!free_b_) kinetic_step(f.b, h, cache, cached_h);
      previous = h;
    }
    local_step(f, 0.5 * previous);
  }

  const double wa1 = sum_norm(f.a, dV);
  const double wb1 = sum_norm(f.b, dV);
  if (!std::isfinite(wa1) || !std::isfinite(wb1)) throw InstabilityError("non-finite field after hold");
  report.drift_a = wa0 > 0.0 ? std::abs(wa1 - wa0) / wa0 : 0.0;
  report.drift_b = wb0 > 0.0 ? std::abs(wb1 - wb0) / wb0 : 0.0;
  const double allowed = params_.norm_tolerance * duration + 1e-12 + 1e-15 * static_cast<double>(report.steps);
  if (report.drift_a > allowed || report.drift_b > allowed) {
    std::ostringstream msg;
    msg << "stochastic norm drift " << std::max(report.drift_a, report.drift_b) << " exceeds " << allowed
        << " (dt = " << dt << " s)";
    throw StepSizeError(msg.str());
  }
  return report;
}

HoldReport evolve_hold(const FieldLattice& lattice, FieldPair& fields, const HoldParams& params, double duration) {
  const HoldIntegrator integrator(lattice, params);
  const double dt = params.dt > 0.0 ? params.dt : default_time_step(lattice, params, fields);
  return integrator.evolve(fields, duration, dt);
}

void apply_beamsplitter(FieldPair& fields, double theta, double phi) {
  if (fields.a.size() != fields.b.size()) throw std::invalid_argument("apply_beamsplitter: component size mismatch");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const cplx to_a = cplx{0.0, -1.0} * std::polar(s, phi);
  const cplx to_b = cplx{0.0, -1.0} * std::polar(s, -phi);
  for (std::size_t i = 0; i < fields.a.size(); ++i) {
    const cplx a = fields.a[i];
    const cplx b = fields.b[i];
    fields.a[i] = c * a + to_a * b;
    fields.b[i] = c * b + to_b * a;
  }
}

void apply_pi_pulse(FieldPair& fields) { apply_beamsplitter(fields, constants::pi / 2.0, 0.0); }

void PulseSequence::validate() const {
  for (const auto& e : events) {
    if (const auto* h = std::get_if<Hold>(&e)) {
      if (!(h->duration >= 0.0)) throw std::invalid_argument("PulseSequence: hold duration must be >= 0");
    }
  }
  if (scan && (scan->theta_grid.empty() || scan->phi_grid.empty())) {
    throw std::invalid_argument("PulseSequence: recombination scan grids must be nonempty");
  }
}

Observation rotate(const Observation& o, double theta, double phi) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double sp = std::sin(phi);
  const double cp = std::cos(phi);
  Observation r = o;
  const double cross_w = 2.0 * c * s * (sp * o.X.real() + cp * o.X.imag());
  r.Wa = c * c * o.Wa + s * s * o.Wb + cross_w;
  r.Wb = s * s * o.Wa + c * c * o.Wb - cross_w;
  const double cross_k = 2.0 * c * s * (sp * o.Y.real() + cp * o.Y.imag());
  r.Ka = c * c * o.Ka + s * s * o.Kb + cross_k;
  r.Kb = s * s * o.Ka + c * c * o.Kb - cross_k;
  // X' = sum conj(a') b' follows from the same rotation.
  const cplx ua = cplx{0.0, -1.0} * std::polar(s, phi);
  const cplx ub = cplx{0.0, -1.0} * std::polar(s, -phi);
  const auto mix = [&](double w_a, double w_b, cplx x) {
    // conj(c a + ua b) (c b + ub a)
    return c * c * x + c * ub * w_a + std::conj(ua) * c * w_b + std::conj(ua) * ub * std::conj(x);
  };
  r.X = mix(o.Wa, o.Wb, o.X);
  r.Y = mix(o.Ka, o.Kb, o.Y);
  return r;
}

EnsembleMoments::EnsembleMoments(std::size_t trajectories, std::size_t batches, std::size_t modes,
                                 std::size_t counted_modes, bool per_mode)
    : batches_(std::max<std::size_t>(1, std::min(batches, std::max<std::size_t>(trajectories, 1)))),
      modes_(modes),
      counted_modes_(counted_modes),
      obs_(trajectories) {
  if (per_mode) {
    mode_sum_a_.assign(batches_ * modes_, 0.0);
    mode_sum_b_.assign(batches_ * modes_, 0.0);
  }
}

std::size_t EnsembleMoments::batch_begin(std::size_t batch) const { return batch * obs_.size() / batches_; }

std::size_t EnsembleMoments::batch_of(std::size_t trajectory) const {
  std::size_t b = trajectory * batches_ / std::max<std::size_t>(obs_.size(), 1);
  while (b + 1 < batches_ && batch_begin(b + 1) <= trajectory) ++b;
  while (b > 0 && batch_begin(b) > trajectory) --b;
  return b;
}

void EnsembleMoments::record(std::size_t trajectory, const Observation& o) { obs_.at(trajectory) = o; }

void EnsembleMoments::add_mode_power(std::size_t batch, std::span<const double> power_a,
                                     std::span<const double> power_b) {
  if (mode_sum_a_.empty()) return;
  double* sa = mode_sum_a_.data() + batch * modes_;
  double* sb = mode_sum_b_.data() + batch * modes_;
  for (std::size_t k = 0; k < modes_; ++k) {
    sa[k] += power_a[k];
    sb[k] += power_b[k];
  }
}

std::vector<double> EnsembleMoments::mode_occupation(int component) const {
  std::vector<double> out(modes_, std::numeric_limits<double>::quiet_NaN());
  if (mode_sum_a_.empty()) return out;
  const auto& sums = component == 0 ? mode_sum_a_ : mode_sum_b_;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < batches_; ++b)
    for (std::size_t k = 0; k < modes_; ++k) out[k] += sums[b * modes_ + k];
  const double R = static_cast<double>(obs_.size());
  for (auto& v : out) v = v / R - 0.5;
  return out;
}

std::vector<double> EnsembleMoments::mode_occupation_se(int component) const {
  std::vector<double> out(modes_, std::numeric_limits<double>::quiet_NaN());
  if (mode_sum_a_.empty() || batches_ < 2) return out;
  const auto& sums = component == 0 ? mode_sum_a_ : mode_sum_b_;
  std::vector<double> batch_means(batches_);
  for (std::size_t k = 0; k < modes_; ++k) {
    for (std::size_t b = 0; b < batches_; ++b) {
      const double n = static_cast<double>(batch_begin(b + 1) - batch_begin(b));
      batch_means[b] = sums[b * modes_ + k] / n;
    }
    out[k] = standard_error(batch_means);
  }
  return out;
}

EnsembleMoments EnsembleMoments::rotated(double theta, double phi) const {
  EnsembleMoments r(obs_.size(), batches_, modes_, counted_modes_, false);
  for (std::size_t i = 0; i < obs_.size(); ++i) r.obs_[i] = rotate(obs_[i], theta, phi);
  r.mode_energy_ = mode_energy_;
  return r;
}

NumberEstimate estimate_numbers(const EnsembleMoments& ensemble, const FieldLattice& lattice) {
  const std::size_t R = ensemble.trajectories();
  if (R < 2) throw InsufficientTrajectoriesError("estimate_numbers: at least 2 trajectories are required");
  const double M = static_cast<double>(lattice.size());
  const auto& o = ensemble.observations();
  const auto wa = [&](std::size_t i) { return o[i].Wa; };
  const auto wb = [&](std::size_t i) { return o[i].Wb; };
  const auto wd = [&](std::size_t i) { return o[i].Wa - o[i].Wb; };

  NumberEstimate e;
  e.trajectories = R;
  const auto a = mean_var(0, R, wa);
  const auto b = mean_var(0, R, wb);
  const auto d = mean_var(0, R, wd);
  e.mean_Na = a.mean - M / 2.0;
  e.mean_Nb = b.mean - M / 2.0;
  e.var_Na = a.var - M / 4.0;
  e.var_Nb = b.var - M / 4.0;
  e.var_diff = d.var - M / 2.0;

  const std::size_t nb = ensemble.batches();
  std::vector<double> ma(nb), mb(nb), va(nb), vb(nb), vd(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    const std::size_t lo = ensemble.batch_begin(k);
    const std::size_t hi = ensemble.batch_begin(k + 1);
    const auto ba = mean_var(lo, hi, wa);
    const auto bb = mean_var(lo, hi, wb);
    ma[k] = ba.mean;
    mb[k] = bb.mean;
    va[k] = ba.var;
    vb[k] = bb.var;
    vd[k] = mean_var(lo, hi, wd).var;
  }
  e.se_mean_Na = standard_error(ma);
  e.se_mean_Nb = standard_error(mb);
  e.se_var_Na = standard_error(va);
  e.se_var_Nb = standard_error(vb);
  e.se_var_diff = standard_error(vd);

  e.db_Na = two_mode::squeezing_db(e.var_Na, e.mean_Na);
  e.db_Nb = two_mode::squeezing_db(e.var_Nb, e.mean_Nb);
  e.db_diff = two_mode::squeezing_db(e.var_diff, e.mean_Na + e.mean_Nb);
  const auto db_se = [](double var, double se_var, double mean, double se_mean) {
    return kDbPerLn * std::hypot(se_var / var, se_mean / mean);
  };
  e.se_db_Na = db_se(e.var_Na, e.se_var_Na, e.mean_Na, e.se_mean_Na);
  e.se_db_Nb = db_se(e.var_Nb, e.se_var_Nb, e.mean_Nb, e.se_mean_Nb);
  e.se_db_diff = db_se(e.var_diff, e.se_var_diff, e.mean_Na + e.mean_Nb, std::hypot(e.se_mean_Na, e.se_mean_Nb));

  const auto negative = [](double v, double se) { return std::isfinite(se) ? v < -3.0 * se : v < 0.0; };
  e.negative_variance =
      negative(e.var_Na, e.se_var_Na) || negative(e.var_Nb, e.se_var_Nb) || negative(e.var_diff, e.se_var_diff);
  return e;
}

FractionEstimate noncondensed_fraction(const EnsembleMoments& ensemble, const FieldLattice& lattice,
                                       std::optional<double> energy_cutoff) {
  const std::size_t R = ensemble.trajectories();
  if (R < 1) throw InsufficientTrajectoriesError("noncondensed_fraction: no trajectories");
  const double M = static_cast<double>(lattice.size());
  const auto& o = ensemble.observations();
  const double total = mean_var(0, R, [&](std::size_t i) { return o[i].Wa + o[i].Wb; }).mean - M;
  const std::size_t nb = ensemble.batches();

  FractionEstimate fe;
  std::vector<double> per_batch(nb);
  if (ensemble.has_mode_data()) {
    const auto& energy = ensemble.mode_energy();
    if (energy_cutoff && energy.size() != ensemble.modes()) {
      throw std::invalid_argument("noncondensed_fraction: energy cutoff needs mode energies");
    }
    std::vector<char> mask(ensemble.modes(), 0);
    for (std::size_t k = 1; k < ensemble.modes(); ++k) {
      mask[k] = !energy_cutoff || energy[k] < *energy_cutoff;
      fe.modes += mask[k] ? 1 : 0;
    }
    const auto occ = ensemble.mode_occupation(0);
    for (std::size_t k = 0; k < ensemble.modes(); ++k)
      if (mask[k]) fe.value += occ[k];
    fe.value /= total;
    // Batch estimates from the per-batch mode sums.
    for (std::size_t b = 0; b < nb; ++b) {
      const double n = static_cast<double>(ensemble.batch_begin(b + 1) - ensemble.batch_begin(b));
      double s = 0.0;
      const auto* sums = ensemble.mode_sums(0).data() + b * ensemble.modes();
      for (std::size_t k = 0; k < ensemble.modes(); ++k)
        if (mask[k]) s += sums[k] / n - 0.5;
      per_batch[b] = s / total;
    }
  } else {
    if (energy_cutoff) throw std::invalid_argument("noncondensed_fraction: cutoff requires per-mode data");
    fe.modes = ensemble.counted_modes();
    const double half = 0.5 * static_cast<double>(fe.modes);
    fe.value = (mean_var(0, R, [&](std::size_t i) { return o[i].Ka; }).mean - half) / total;
    for (std::size_t b = 0; b < nb; ++b) {
      per_batch[b] = (mean_var(ensemble.batch_begin(b), ensemble.batch_begin(b + 1),
                               [&](std::size_t i) { return o[i].Ka; })
                          .mean -
                      half) /
                     total;
    }
  }
  fe.se = standard_error(per_batch);
  return fe;
}

ValidityReport validity(const EnsembleMoments& ensemble) {
  ValidityReport v;
  if (ensemble.has_mode_data() && ensemble.batches() >= 2) {
    for (int c = 0; c < 2; ++c) {
      const auto occ = ensemble.mode_occupation(c);
      const auto se = ensemble.mode_occupation_se(c);
      // Var|alpha|^2 >= 1/4 for any Gaussian Wigner state. The floor stops a
      // batch SE that shrinks together with a low batch mean from flagging
      // vacuum modes.
      const double floor = 0.5 / std::sqrt(static_cast<double>(ensemble.trajectories()));
      std::size_t bad = 0;
      for (std::size_t k = 0; k < occ.size(); ++k)
        if (occ[k] < -3.0 * std::max(se[k], floor)) ++bad;
      (c == 0 ? v.negative_mode_fraction_a : v.negative_mode_fraction_b) =
          static_cast<double>(bad) / static_cast<double>(occ.size());
    }
  }
  const auto& o = ensemble.observations();
  if (!o.empty() && ensemble.modes() > 0) {
    double low = 0.0;
    for (const auto& x : o) low += x.low_density_points;
    v.low_density_point_fraction = low / (static_cast<double>(o.size()) * static_cast<double>(ensemble.modes()));
  }
  v.warn = v.negative_mode_fraction_a > 0.01 || v.negative_mode_fraction_b > 0.01 || v.low_density_point_fraction > 0.01;
  return v;
}

RunResult run_sequence(const FieldLattice& lattice, const InitialState& initial, const HoldParams& params,
                       const PulseSequence& sequence, const RunOptions& options) {
  lattice.validate();
  sequence.validate();
  const std::size_t M = lattice.size();
  if (initial.mean_a.size() != M || initial.mean_b.size() != M) {
    throw std::invalid_argument("run_sequence: initial mean field size != lattice size");
  }
  const std::size_t R = options.trajectories;
  if (R < 1) throw InsufficientTrajectoriesError("run_sequence: at least one trajectory is required");

  const FieldPair means{initial.mean_a, initial.mean_b};
  const double dt = params.dt > 0.0 ? params.dt : default_time_step(lattice, params, means);
  const HoldIntegrator integrator(lattice, params);

  const auto k2 = lattice.k_squared();
  std::vector<double> energy(M);
  std::vector<char> counted(M, 0);
  std::size_t counted_modes = 0;
  for (std::size_t k = 0; k < M; ++k) {
    energy[k] = hbar * hbar * k2[k] / (2.0 * params.mass);
    counted[k] = k2[k] > 0.0 && (!options.energy_cutoff || energy[k] < *options.energy_cutoff);
    counted_modes += counted[k] ? 1 : 0;
  }

  const std::size_t nb = options.batches ? options.batches : std::max<std::size_t>(1, std::min<std::size_t>(20, R / 2));

  RunResult result;
  result.dt = dt;
  double time = 0.0;
  const auto add_record = [&](std::string label) {
    EventRecord rec{std::move(label), time, EnsembleMoments(R, nb, M, counted_modes, options.per_mode)};
    rec.moments.set_mode_energy(energy);
    result.events.push_back(std::move(rec));
  };
  add_record("initial");
  for (const auto& e : sequence.events) {
    std::string label = "beamsplit";
    if (const auto* h = std::get_if<Hold>(&e)) {
      label = "hold";
      time += h->duration;
      result.steps_per_trajectory += plan_steps(h->duration, dt).total();
    } else if (std::holds_alternative<PiPulse>(e)) {
      label = "pi_pulse";
    }
    add_record(label);
  }

  std::vector<std::pair<double, double>> grid;
  if (sequence.scan) {
    for (double phi : sequence.scan->phi_grid)
      for (double theta : sequence.scan->theta_grid) grid.emplace_back(theta, phi);
  }
  std::vector<EnsembleMoments> literal;
  if (options.literal_scan) literal.assign(grid.size(), EnsembleMoments(R, nb, M, counted_modes, false));

  if (!options.snapshot_dir.empty() && options.snapshot_trajectories > 0) {
    std::filesystem::create_directories(options.snapshot_dir);
  }

  const EnsembleMoments partition(R, nb, 0, 0, false);
  const std::size_t batches = partition.batches();

  std::atomic<std::size_t> next_batch{0};
  std::atomic<std::size_t> first_failure{std::numeric_limits<std::size_t>::max()};
  std::mutex failure_mutex;
  FailureKind failure_kind = FailureKind::other;
  std::string failure_message;

  const auto worker = [&]() {
    Observer observer(lattice, integrator.plan(), counted);
    for (;;) {
      const std::size_t b = next_batch.fetch_add(1);
      if (b >= batches) return;
      for (std::size_t t = partition.batch_begin(b); t < partition.batch_begin(b + 1); ++t) {
        if (t >= first_failure.load()) return;
        try {
          FieldPair f = sample_initial(lattice, initial.mean_a, initial.mean_b, options.seed, t);
          for (std::size_t e = 0; e <= sequence.events.size(); ++e) {
            if (e > 0) {
              const auto& ev = sequence.events[e - 1];
              if (const auto* bs = std::get_if<Beamsplit>(&ev)) {
                apply_beamsplitter(f, bs->theta, bs->phi);
              } else if (const auto* h = std::get_if<Hold>(&ev)) {
                integrator.evolve(f, h->duration, dt);
              } else {
                apply_pi_pulse(f);
              }
            }
            auto& moments = result.events[e].moments;
            moments.record(t, observer.observe(f));
            moments.add_mode_power(b, observer.power_a(), observer.power_b());
          }
          for (std::size_t g = 0; g < literal.size(); ++g) {
            FieldPair rotated = f;
            apply_beamsplitter(rotated, grid[g].first, grid[g].second);
            literal[g].record(t, observer.observe(rotated));
          }
          if (t < options.snapshot_trajectories && !options.snapshot_dir.empty()) {
            SnapshotHeader header{lattice, dt, options.seed, t, time};
            const auto path = std::filesystem::path(options.snapshot_dir) / snapshot_filename(t);
            write_snapshot(path.string(), header, f);
          }
        } catch (const std::exception& ex) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (t < first_failure.load()) {
            first_failure.store(t);
            failure_message = ex.what();
            failure_kind = dynamic_cast<const InstabilityError*>(&ex)   ? FailureKind::instability
                           : dynamic_cast<const StepSizeError*>(&ex) ? FailureKind::step_size
                                                                     : FailureKind::other;
          }
          return;
        }
      }
    }
  };

  std::size_t workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, batches);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_failure.load() != std::numeric_limits<std::size_t>::max()) {
    std::ostringstream msg;
    msg << "trajectory " << first_failure.load() << " failed: " << failure_message;
    rethrow_failure(failure_kind, msg.str());
  }

  for (const auto& rec : result.events) {
    const auto v = validity(rec.moments);
    if (v.warn) {
      std::ostringstream msg;
      msg << "TWA validity: after " << rec.label << " at t=" << rec.time << " s, negative-occupation mode fraction a="
          << v.negative_mode_fraction_a << " b=" << v.negative_mode_fraction_b
          << ", low-density point fraction=" << v.low_density_point_fraction;
      result.warnings.push_back(msg.str());
    }
  }

  if (!grid.empty()) {
    const EnsembleMoments& final_moments = result.events.back().moments;
    result.scan.reserve(grid.size());
    bool negative = false;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const EnsembleMoments ens =
          options.literal_scan ? literal[g] : final_moments.rotated(grid[g].first, grid[g].second);
      ScanPoint p;
      p.theta = grid[g].first;
      p.phi = grid[g].second;
      if (R >= 2) {
        p.numbers = estimate_numbers(ens, lattice);
        negative = negative || p.numbers.negative_variance;
      }
      p.fraction = noncondensed_fraction(ens, lattice);
      result.scan.push_back(p);
    }
    if (negative) result.warnings.push_back("negative ordering-corrected variance beyond 3 standard errors in scan");
  }
  if (R >= 2 && nb < 10) {
    result.warnings.push_back("fewer than 10 batches; standard errors are unreliable");
  }
  return result;
}

}  // namespace becsq::twa
