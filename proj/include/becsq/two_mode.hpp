#pragma once

// Zero-dimensional two-mode model of the beamsplit / hold / recombine
// sequence. All angles are in radians, rates in rad/s and times in seconds.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace becsq::two_mode {

using complex = std::complex<double>;

struct TwoModeParams {
  double n_a = 0.0;  ///< mean atoms in |a> after the first pulse
  double n_b = 0.0;  ///< mean atoms in |b> after the first pulse
  double chi_aa = 0.0;
  double chi_ab = 0.0;
  double chi_bb = 0.0;
  double tau_hold = 0.0;
  double theta = 0.0;  ///< recombination pulse area
  double phi = 0.0;    ///< recombination phase

  double lambda_aa() const { return chi_aa * tau_hold; }
  double lambda_ab() const { return chi_ab * tau_hold; }
  double lambda_bb() const { return chi_bb * tau_hold; }

  /// Throws std::invalid_argument on negative populations or hold time.
  void validate() const;
};

struct CoherentFactors {
  complex A;
  complex A2;
  complex B;
  complex B2;
  complex D;
};

struct SqueezingResult {
  double N_a = 0.0;
  double N_b = 0.0;
  double var_Na = 0.0;
  double var_Nb = 0.0;
  double var_diff = 0.0;
  // Shot-noise referenced squeezing, larger = more squeezed. NaN when the
  // reference mean is zero (see `degenerate`).
  double db_Na = 0.0;
  double db_Nb = 0.0;
  double db_diff = 0.0;
  bool degenerate = false;
  /// Largest |Im| / max(|Re|, 1) seen while assembling the variances.
  double imag_residue = 0.0;
};

/// -10 log10(variance / reference); NaN for a zero reference, +inf for a
/// non-positive variance.
double squeezing_db(double variance, double reference);

CoherentFactors coherent_factors(const TwoModeParams& params);

/// Closed-form means and variances after the final pulse.
SqueezingResult evaluate(const TwoModeParams& params);

enum class Metric { Na, Nb, Difference };

struct ScanRow {
  double theta;
  double phi;
  SqueezingResult result;
};

struct ScanTable {
  /// Row order: phi-major, theta-minor (row = i_phi * n_theta + i_theta).
  std::vector<ScanRow> rows;
  std::size_t best_Na = 0;
  std::size_t best_Nb = 0;
  std::size_t best_diff = 0;

  std::size_t best(Metric metric) const;
};

/// Evaluates every (theta, phi) pair; ties in the optimum (equal to 1e-12
/// relative) are broken by the smallest theta, then the smallest phi.
ScanTable scan_recombination(const TwoModeParams& base, std::span<const double> theta_grid,
                             std::span<const double> phi_grid);

struct Optimum {
  double theta = 0.0;
  double db = 0.0;
  SqueezingResult result;
};

/// Best squeezing over theta in [0, pi) at fixed phi: dense scan followed by
/// Brent refinement around the best sample.
Optimum optimize_theta(const TwoModeParams& base, Metric metric, std::size_t coarse_points = 20000);

/// Smallest total-number cutoff whose truncated coherent state keeps
/// 1 - norm below `tail`.
std::size_t fock_cutoff_for(const TwoModeParams& params, double tail = 1e-14);

/// Brute-force state-vector evolution in a two-mode Fock basis truncated at
/// total number `cutoff`. Throws TruncationError when the truncated initial
/// norm is below 1 - 1e-10.
SqueezingResult fock_oracle(const TwoModeParams& params, std::size_t cutoff);

}  // namespace becsq::two_mode
