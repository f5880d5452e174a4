#pragma once

// Truncated-Wigner evolution of two coupled condensate components on a
// periodic lattice, with instantaneous pulses and ordering-corrected
// estimators. Fields are in m^{-dim/2}; sums W = sum |phi|^2 dV are atoms.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "becsq/constants.hpp"
#include "becsq/lattice.hpp"

namespace becsq::twa {

struct FieldPair {
  std::vector<cplx> a;
  std::vector<cplx> b;
};

struct HoldParams {
  double mass = constants::rb87_mass;
  double U_aa = 0.0;  ///< J m^dim
  double U_ab = 0.0;
  double U_bb = 0.0;
  std::vector<double> V_a;  ///< J per grid point, empty = zero
  std::vector<double> V_b;
  double dt = 0.0;                 ///< s, 0 selects default_time_step
  double norm_tolerance = 1e-8;    ///< allowed relative drift per simulated second
  double overflow_guard = 1e150;   ///< bound on |phi|^2 dV at any point
};

struct HoldReport {
  std::size_t steps = 0;
  double dt = 0.0;
  double last_step = 0.0;  ///< length of the final (possibly partial) step
  double drift_a = 0.0;    ///< relative change of W_a
  double drift_b = 0.0;
};

/// Largest step with nonlinear phase < 0.05 rad and kinetic phase at the
/// largest |k| < 0.5 rad. The density bound uses the mean fields plus two
/// vacuum quanta per point, so all trajectories share the step. Potentials
/// are applied exactly and do not limit the step.
double default_time_step(const FieldLattice& lattice, const HoldParams& params, const FieldPair& mean_fields);

/// Independent complex Gaussian noise of variance 1/(2 dV) per point added to
/// the mean fields. Deterministic in (seed, trajectory).
FieldPair sample_initial(const FieldLattice& lattice, std::span<const cplx> mean_a, std::span<const cplx> mean_b,
                         std::uint64_t seed, std::uint64_t trajectory = 0);

/// Symmetric split-step integrator for the hold stage. Reusable across
/// trajectories and threads.
class HoldIntegrator {
 public:
  HoldIntegrator(const FieldLattice& lattice, HoldParams params);

  /// Throws InstabilityError if a value leaves the overflow guard and
  /// StepSizeError if a component norm drifts beyond tolerance.
  HoldReport evolve(FieldPair& fields, double duration, double dt) const;

  const FieldLattice& lattice() const { return lattice_; }
  const SpectralPlan& plan() const { return plan_; }
  const HoldParams& params() const { return params_; }

 private:
  void local_step(FieldPair& f, double h) const;
  void kinetic_step(std::vector<cplx>& field, double h, std::vector<cplx>& phase_cache, double& cached_h) const;

  FieldLattice lattice_;
  HoldParams params_;
  SpectralPlan plan_;
  std::vector<double> omega0_;  // hbar k^2 / 2m per mode
  bool free_a_ = false;
  bool free_b_ = false;
};

HoldReport evolve_hold(const FieldLattice& lattice, FieldPair& fields, const HoldParams& params, double duration);

/// phi_a' = c phi_a - i e^{i phi} s phi_b, phi_b' = c phi_b - i e^{-i phi} s phi_a.
void apply_beamsplitter(FieldPair& fields, double theta, double phi);

/// Beamsplitter with theta = pi/2, phi = 0.
void apply_pi_pulse(FieldPair& fields);

struct Beamsplit {
  double theta = 0.0;
  double phi = 0.0;
};
struct Hold {
  double duration = 0.0;
};
struct PiPulse {};
using PulseEvent = std::variant<Beamsplit, Hold, PiPulse>;

struct RecombinationScan {
  std::vector<double> theta_grid;
  std::vector<double> phi_grid;
};

struct PulseSequence {
  std::vector<PulseEvent> events;
  std::optional<RecombinationScan> scan;  ///< applied after the last event

  void validate() const;
};

/// Per-trajectory scalars from which every reported moment is built.
/// X = sum conj(phi_a) phi_b dV; K_j = sum |alpha_j(k)|^2 over the counted
/// non-zero modes; Y = the matching sum of conj(alpha_a) alpha_b.
struct Observation {
  double Wa = 0.0;
  double Wb = 0.0;
  cplx X;
  double Ka = 0.0;
  double Kb = 0.0;
  cplx Y;
  /// Grid points where either ordering-corrected density n_j = |phi_j|^2 - 1/dV
  /// lies below -3/(2 dV).
  double low_density_points = 0.0;
};

/// Moments after a recombination pulse, obtained from the pre-pulse
/// observation. Exact: W, K are quadratic forms of the fields.
Observation rotate(const Observation& o, double theta, double phi);

class EnsembleMoments {
 public:
  EnsembleMoments() = default;
  /// `modes` is the lattice size M, `counted_modes` the number of modes in
  /// the K sums. Per-mode accumulators are allocated when `per_mode` is set.
  EnsembleMoments(std::size_t trajectories, std::size_t batches, std::size_t modes, std::size_t counted_modes,
                  bool per_mode);

  /// Contiguous batch holding `trajectory`.
  std::size_t batch_of(std::size_t trajectory) const;
  std::size_t batch_begin(std::size_t batch) const;

  void record(std::size_t trajectory, const Observation& o);
  /// Adds one trajectory's |alpha(k)|^2 to the batch sums. Callers add the
  /// trajectories of a batch in index order.
  void add_mode_power(std::size_t batch, std::span<const double> power_a, std::span<const double> power_b);

  std::size_t trajectories() const { return obs_.size(); }
  std::size_t batches() const { return batches_; }
  std::size_t modes() const { return modes_; }
  std::size_t counted_modes() const { return counted_modes_; }
  bool has_mode_data() const { return !mode_sum_a_.empty(); }
  const std::vector<Observation>& observations() const { return obs_; }
  /// Per-batch sums of |alpha(k)|^2, batch-major.
  const std::vector<double>& mode_sums(int component) const { return component == 0 ? mode_sum_a_ : mode_sum_b_; }

  /// E|alpha_j(k)|^2 - 1/2 per mode (component 0 = a, 1 = b) and its
  /// batch-means standard error.
  std::vector<double> mode_occupation(int component) const;
  std::vector<double> mode_occupation_se(int component) const;

  /// Same ensemble after a recombination pulse. Per-mode data is dropped.
  EnsembleMoments rotated(double theta, double phi) const;

  void set_mode_energy(std::vector<double> energy) { mode_energy_ = std::move(energy); }
  const std::vector<double>& mode_energy() const { return mode_energy_; }

 private:
  std::size_t batches_ = 0;
  std::size_t modes_ = 0;
  std::size_t counted_modes_ = 0;
  std::vector<Observation> obs_;
  std::vector<double> mode_sum_a_;  // batches_ x modes_
  std::vector<double> mode_sum_b_;
  std::vector<double> mode_energy_;  // hbar w0_k, J
};

struct NumberEstimate {
  std::size_t trajectories = 0;
  double mean_Na = 0.0, mean_Nb = 0.0;
  double var_Na = 0.0, var_Nb = 0.0, var_diff = 0.0;
  double se_mean_Na = 0.0, se_mean_Nb = 0.0;
  double se_var_Na = 0.0, se_var_Nb = 0.0, se_var_diff = 0.0;
  /// Shot-noise referenced squeezing, larger = more squeezed.
  double db_Na = 0.0, db_Nb = 0.0, db_diff = 0.0;
  double se_db_Na = 0.0, se_db_Nb = 0.0, se_db_diff = 0.0;
  /// Some ordering-corrected variance is below zero by more than 3 SE.
  bool negative_variance = false;
};

/// mean N_j = E[W_j] - M/2, Var N_j = Var[W_j] - M/4, Var(N_a - N_b) =
/// Var[W_a - W_b] - M/2, with batch-means standard errors.
/// Throws InsufficientTrajectoriesError for fewer than two trajectories.
NumberEstimate estimate_numbers(const EnsembleMoments& ensemble, const FieldLattice& lattice);

struct FractionEstimate {
  double value = 0.0;
  double se = 0.0;
  std::size_t modes = 0;  ///< modes included in the sum
};

/// sum_{k != 0} (E|alpha_a(k)|^2 - 1/2) / N_total. With per-mode data the
/// optional cutoff keeps modes with hbar w0_k < energy_cutoff; otherwise the
/// run-time mask baked into K_a is used and the cutoff must be unset.
FractionEstimate noncondensed_fraction(const EnsembleMoments& ensemble, const FieldLattice& lattice,
                                       std::optional<double> energy_cutoff = std::nullopt);

struct ValidityReport {
  /// Modes whose estimated occupation is below -3 SE (SE floored at the
  /// vacuum value 1/(2 sqrt R)), as a fraction of all modes, per component.
  double negative_mode_fraction_a = 0.0;
  double negative_mode_fraction_b = 0.0;
  /// Average fraction of grid points with n_j < -3/(2 dV).
  double low_density_point_fraction = 0.0;
  bool warn = false;  ///< any of the above exceeds 1%
};

ValidityReport validity(const EnsembleMoments& ensemble);

struct InitialState {
  std::vector<cplx> mean_a;
  std::vector<cplx> mean_b;
};

struct RunOptions {
  std::size_t trajectories = 100;
  std::uint64_t seed = 0;
  std::size_t workers = 0;   ///< 0 = hardware concurrency
  std::size_t batches = 0;   ///< 0 = min(20, R/2)
  std::optional<double> energy_cutoff;  ///< J, restricts the K sums
  bool per_mode = true;
  /// Apply the beamsplitter to every trajectory's saved field per scan point
  /// instead of rotating the recorded quadratic forms.
  bool literal_scan = false;
  std::size_t snapshot_trajectories = 0;
  std::string snapshot_dir;
};

struct EventRecord {
  std::string label;
  double time = 0.0;  ///< accumulated hold time after the event
  EnsembleMoments moments;
};

struct ScanPoint {
  double theta = 0.0;
  double phi = 0.0;
  NumberEstimate numbers;
  FractionEstimate fraction;
};

struct RunResult {
  /// One record for the sampled initial state, then one per event.
  std::vector<EventRecord> events;
  std::vector<ScanPoint> scan;  ///< phi-major, theta-minor
  double dt = 0.0;
  std::size_t steps_per_trajectory = 0;
  std::vector<std::string> warnings;
};

/// Runs every trajectory through the sequence. Output is independent of the
/// worker count. The first failing trajectory (lowest index) aborts the run
/// with its index in the message.
RunResult run_sequence(const FieldLattice& lattice, const InitialState& initial, const HoldParams& params,
                       const PulseSequence& sequence, const RunOptions& options);

}  // namespace becsq::twa
