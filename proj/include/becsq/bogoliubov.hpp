#pragma once

// Bogoliubov occupation of non-condensed modes for a uniform condensate in
// a periodic box with a single nonlinearity chi_aa.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "becsq/constants.hpp"

namespace becsq::bogoliubov {

struct BogoliubovParams {
  double chi_aa = 0.0;   ///< rad/s
  double n_a = 0.0;      ///< condensate atoms in |a>
  double n_total = 0.0;  ///< atoms in the fraction denominator; 0 means n_a
  double mass = constants::rb87_mass;
  double tau_hold = 0.0;  ///< s
  double theta = 0.0;     ///< recombination angle, rad
  int dim = 1;
  std::array<double, 3> extents{1.0, 1.0, 1.0};  ///< m, first `dim` used

  void validate() const;
  double Lambda() const { return n_a * chi_aa * tau_hold; }
  double denominator() const { return n_total > 0.0 ? n_total : n_a; }
  double measure() const;  ///< L, A or V
};

struct Mode {
  std::array<double, 3> k{};  ///< rad/m
  double omega0 = 0.0;        ///< rad/s
  double omega = 0.0;
  double u = 1.0;
  double v = 0.0;
  double occupation = 0.0;
};

struct BogoliubovSpectrum {
  std::vector<Mode> modes;
};

double free_frequency(const BogoliubovParams& p, double k2);
double bogoliubov_frequency(const BogoliubovParams& p, double k2);

/// Modes with |n_i| <= k_cutoff on every used axis, k = 0 excluded.
BogoliubovSpectrum spectrum(const BogoliubovParams& p, int k_cutoff);

/// [n_a chi tau cos(theta) sinc(w_k tau)]^2 with sinc(x) = sin(x)/x.
double occupation_k(const BogoliubovParams& p, std::array<double, 3> k);

struct DepletionSum {
  double fraction = 0.0;
  double enumerated = 0.0;  ///< part from explicitly summed modes
  double tail = 0.0;        ///< integral estimate beyond the summed sphere
  double radius = 0.0;      ///< final |k| bound, rad/m
  std::size_t modes = 0;
};

/// (1/N) sum_{k != 0} n(k). Modes inside |k| <= K are summed, the rest is
/// estimated by the continuum integral; K doubles from `initial_radius`
/// (rad/m, 0 = automatic) until the result moves by < 0.1%.
/// Throws ConvergenceError when `max_modes` is reached first.
DepletionSum depletion_sum(const BogoliubovParams& p, double initial_radius = 0.0, std::size_t max_modes = 50'000'000);

/// I_d(Lambda, u0) = int_{u0}^inf u^{d-1} sinc^2(u sqrt(u^2 + 2 Lambda)) du,
/// split at the zeros of the sinc argument with an analytic mean-value tail.
/// Relative accuracy about 1e-7; throws ConvergenceError otherwise.
double sinc_integral(int dim, double Lambda, double u0 = 0.0);

/// f^{dD}(Lambda) in the Phi = w0 tau variable; equals 2 I_d(Lambda, 0).
double f_integral(int dim, double Lambda);

/// Continuum approximation of the fraction.
double depletion_integral(const BogoliubovParams& p);

/// w(k_min) tau with k_min = 2 pi / (largest extent).
double validity_metric(const BogoliubovParams& p);

struct ScalingRow {
  double size = 0.0;  ///< side length L, m
  double tau_hold = 0.0;
  double fraction_sum = 0.0;
  double fraction_integral = 0.0;
  double validity_metric = 0.0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  /// Least-squares slopes of log fraction vs log(L^dim).
  double slope_integral = 0.0;
  double slope_sum = 0.0;
};

/// Isotropic size sweep at fixed n_a and chi tau: chi scales as L^-dim and
/// tau_hold as L^dim from the base parameters (base side = extents[0]).
ScalingResult scaling_prediction(const BogoliubovParams& base, std::span<const double> sizes, bool with_sum = true);

double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace becsq::bogoliubov
