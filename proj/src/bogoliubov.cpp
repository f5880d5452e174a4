#include "becsq/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/gauss.hpp>

#include "becsq/error.hpp"

namespace becsq::bogoliubov {

using constants::hbar;
using constants::pi;

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double surface_factor(int dim) {
  switch (dim) {
    case 1:
      return 2.0;
    case 2:
      return 2.0 * pi;
    default:
      return 4.0 * pi;
  }
}

// Argument x = u sqrt(u^2 + 2 Lambda) and its inverse u^2 = x^2 / (Lambda + sqrt(Lambda^2 + x^2)).
double sinc_argument(double u, double Lambda) { return u * std::sqrt(u * u + 2.0 * Lambda); }

double u_at(double x, double Lambda) { return std::sqrt(x * x / (Lambda + std::sqrt(Lambda * Lambda + x * x))); }

// (1/2) int_u^inf t^{d-3} / (t^2 + 2 Lambda) dt: the integrand with sin^2 replaced by its mean.
double mean_tail(int dim, double Lambda, double u) {
  const double x = std::sqrt(2.0 * Lambda) / u;
  const double x2 = x * x;
  double g = 0.0;
  switch (dim) {
    case 1:
      // (x - atan x) / x^3
      g = x < 1e-3 ? 1.0 / 3.0 - x2 / 5.0 + x2 * x2 / 7.0 : (x - std::atan(x)) / (x2 * x);
      return 0.5 * g / (u * u * u);
    case 2:
      g = x2 < 1e-12 ? 1.0 : std::log1p(x2) / x2;
      return 0.5 * g / (2.0 * u * u);
    default:
      g = x < 1e-6 ? 1.0 : std::atan(x) / x;
      return 0.5 * g / u;
  }
}

double panels(int dim, double Lambda, double u0, std::size_t count, double& u_end) {
  const auto integrand = [dim, Lambda](double u) {
    const double s = sinc(sinc_argument(u, Lambda));
    return std::pow(u, dim - 1) * s * s;
  };
  // Each panel holds one lobe of sinc^2, so a fixed 20-point rule is exact to rounding.
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const double x0 = sinc_argument(u0, Lambda);
  std::size_t j = static_cast<std::size_t>(std::floor(x0 / pi)) + 1;
  double a = u0;
  double total = 0.0;
  for (std::size_t n = 0; n < count; ++n, ++j) {
    const double b = u_at(pi * static_cast<double>(j), Lambda);
    if (b > a) total += Gauss::integrate(integrand, a, b);
    a = std::max(a, b);
  }
  u_end = a;
  return total;
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("bogoliubov: dim must be 1, 2 or 3");
}

// kappa = sqrt(2 m / (hbar tau)); continuum prefactor (Lambda cos)^2 / N * V S_d kappa^d / (2 pi)^d.
double kappa(const BogoliubovParams& p) { return std::sqrt(2.0 * p.mass / (hbar * p.tau_hold)); }

double continuum_prefactor(const BogoliubovParams& p) {
  const double lc = p.Lambda() * std::cos(p.theta);
  return lc * lc / p.denominator() * p.measure() * surface_factor(p.dim) * std::pow(kappa(p) / (2.0 * pi), p.dim);
}

}  // namespace

void BogoliubovParams::validate() const {
  check_dim(dim);
  if (!(chi_aa >= 0.0)) throw std::invalid_argument("BogoliubovParams: chi_aa must be >= 0");
  if (!(n_a > 0.0)) throw std::invalid_argument("BogoliubovParams: n_a must be > 0");
  if (!(n_total >= 0.0)) throw std::invalid_argument("BogoliubovParams: n_total must be >= 0");
  if (!(mass > 0.0)) throw std::invalid_argument("BogoliubovParams: mass must be > 0");
  if (!(tau_hold >= 0.0)) throw std::invalid_argument("BogoliubovParams: tau_hold must be >= 0");
  for (int i = 0; i < dim; ++i) {
    if (!(extents[i] > 0.0)) throw std::invalid_argument("BogoliubovParams: extents must be > 0");
  }
}

double BogoliubovParams::measure() const {
  double m = 1.0;
  for (int i = 0; i < dim; ++i) m *= extents[i];
  return m;
}

double free_frequency(const BogoliubovParams& p, double k2) { return hbar * k2 / (2.0 * p.mass); }

double bogoliubov_frequency(const BogoliubovParams& p, double k2) {
  const double w0 = free_frequency(p, k2);
  return std::sqrt(w0 * (w0 + 2.0 * p.chi_aa * p.n_a));
}

double occupation_k(const BogoliubovParams& p, std::array<double, 3> k) {
  const double k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
  if (k2 == 0.0) throw std::invalid_argument("occupation_k: k must be nonzero");
  const double amp = p.Lambda() * std::cos(p.theta) * sinc(bogoliubov_frequency(p, k2) * p.tau_hold);
  return amp * amp;
}

BogoliubovSpectrum spectrum(const BogoliubovParams& p, int k_cutoff) {
  p.validate();
  if (k_cutoff < 1) throw std::invalid_argument("spectrum: k_cutoff must be >= 1");
  BogoliubovSpectrum s;
  const int nx = k_cutoff;
  const int ny = p.dim >= 2 ? k_cutoff : 0;
  const int nz = p.dim >= 3 ? k_cutoff : 0;
  const double mu = p.chi_aa * p.n_a;
  for (int i = -nx; i <= nx; ++i)
    for (int j = -ny; j <= ny; ++j)
      for (int l = -nz; l <= nz; ++l) {
        if (i == 0 && j == 0 && l == 0) continue;
        Mode m;
        m.k = {2.0 * pi * i / p.extents[0], p.dim >= 2 ? 2.0 * pi * j / p.extents[1] : 0.0,
               p.dim >= 3 ? 2.0 * pi * l / p.extents[2] : 0.0};
        const double k2 = m.k[0] * m.k[0] + m.k[1] * m.k[1] + m.k[2] * m.k[2];
        m.omega0 = free_frequency(p, k2);
        m.omega = bogoliubov_frequency(p, k2);
        const double u2 = (m.omega0 + mu) / (2.0 * m.omega) + 0.5;
        m.u = std::sqrt(u2);
        m.v = std::sqrt(std::max(0.0, u2 - 1.0));
        m.occupation = occupation_k(p, m.k);
        s.modes.push_back(m);
      }
  return s;
}

double sinc_integral(int dim, double Lambda, double u0) {
  check_dim(dim);
  if (!(Lambda >= 0.0) || !(u0 >= 0.0)) throw std::invalid_argument("sinc_integral: Lambda and u0 must be >= 0");
  std::size_t count = 2000;
  double u_end = 0.0;
  double previous = panels(dim, Lambda, u0, count, u_end) + mean_tail(dim, Lambda, u_end);
  for (int attempt = 0; attempt < 6; ++attempt) {
    count *= 2;
    const double current = panels(dim, Lambda, u0, count, u_end) + mean_tail(dim, Lambda, u_end);
    if (std::abs(current - previous) <= 1e-8 * std::abs(current)) return current;
    previous = current;
  }
  std::ostringstream msg;
  msg << "sinc_integral: no convergence for dim=" << dim << ", Lambda=" << Lambda << ", u0=" << u0;
  throw ConvergenceError(msg.str());
}

double f_integral(int dim, double Lambda) { return 2.0 * sinc_integral(dim, Lambda, 0.0); }

double depletion_integral(const BogoliubovParams& p) {
  p.validate();
  if (p.tau_hold == 0.0 || p.chi_aa == 0.0) return 0.0;
  return continuum_prefactor(p) * sinc_integral(p.dim, p.Lambda(), 0.0);
}

double validity_metric(const BogoliubovParams& p) {
  p.validate();
  double L = 0.0;
  for (int i = 0; i < p.dim; ++i) L = std::max(L, p.extents[i]);
  const double k = 2.0 * pi / L;
  return bogoliubov_frequency(p, k * k) * p.tau_hold;
}

DepletionSum depletion_sum(const BogoliubovParams& p, double initial_radius, std::size_t max_modes) {
  p.validate();
  DepletionSum out;
  const double amp = p.Lambda() * std::cos(p.theta);
  if (p.tau_hold == 0.0 || p.chi_aa == 0.0 || amp == 0.0) return out;

  const int d = p.dim;
  std::array<double, 3> dk{0.0, 0.0, 0.0};
  double dk_min = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i) {
    dk[i] = 2.0 * pi / p.extents[i];
    dk_min = std::min(dk_min, dk[i]);
  }
  const double kap = kappa(p);
  double K = initial_radius > 0.0 ? initial_radius : std::max(kap, 4.0 * dk_min);
  const double tau = p.tau_hold;
  const double N = p.denominator();

  const auto evaluate = [&](double radius, DepletionSum& r) {
    const double K2 = radius * radius;
    std::array<long long, 3> nmax{0, 0, 0};
    for (int i = 0; i < d; ++i) nmax[i] = static_cast<long long>(std::floor(radius / dk[i]));
    double sum = 0.0;
    std::size_t count = 0;
    // Non-negative octant with multiplicity 2^(nonzero components).
    for (long long i = 0; i <= nmax[0]; ++i) {
      const double kx2 = (i * dk[0]) * (i * dk[0]);
      if (kx2 > K2) break;
      for (long long j = 0; j <= nmax[1]; ++j) {
        const double kxy2 = kx2 + (j * dk[1]) * (j * dk[1]);
        if (kxy2 > K2) break;
        for (long long l = 0; l <= nmax[2]; ++l) {
          const double k2 = kxy2 + (l * dk[2]) * (l * dk[2]);
          if (k2 > K2) break;
          if (i == 0 && j == 0 && l == 0) continue;
          const double weight = static_cast<double>(1 << ((i != 0) + (j != 0) + (l != 0)));
          const double s = sinc(bogoliubov_frequency(p, k2) * tau);
          sum += weight * s * s;
          count += static_cast<std::size_t>(weight);
        }
      }
      if (count > max_modes) break;
    }
    r.enumerated = amp * amp * sum / N;
    r.tail = continuum_prefactor(p) * sinc_integral(d, p.Lambda(), radius / kap);
    r.fraction = r.enumerated + r.tail;
    r.radius = radius;
    r.modes = count;
    return count <= max_modes;
  };

  DepletionSum prev;
  if (!evaluate(K, prev)) throw ConvergenceError("depletion_sum: mode budget exhausted at the initial radius");
  for (;;) {
    K *= 2.0;
    DepletionSum next;
    if (!evaluate(K, next)) {
      std::ostringstream msg;
      msg << "depletion_sum: bound doubling did not converge within " << max_modes << " modes";
      throw ConvergenceError(msg.str());
    }
    if (std::abs(next.fraction - prev.fraction) < 1e-3 * std::abs(next.fraction)) return next;
    prev = next;
  }
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 matching points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

ScalingResult scaling_prediction(const BogoliubovParams& base, std::span<const double> sizes, bool with_sum) {
  base.validate();
  if (sizes.size() < 2) throw std::invalid_argument("scaling_prediction: need at least two sizes");
  const double L0 = base.extents[0];
  ScalingResult result;
  std::vector<double> log_measure, log_integral, log_sum;
  for (double L : sizes) {
    if (!(L > 0.0)) throw std::invalid_argument("scaling_prediction: sizes must be > 0");
    BogoliubovParams p = base;
    const double ratio = std::pow(L / L0, base.dim);
    for (int i = 0; i < p.dim; ++i) p.extents[i] = L;
    p.chi_aa = base.chi_aa / ratio;
    p.tau_hold = base.tau_hold * ratio;
    ScalingRow row;
    row.size = L;
    row.tau_hold = p.tau_hold;
    row.fraction_integral = depletion_integral(p);
    row.fraction_sum = with_sum ? depletion_sum(p).fraction : std::numeric_limits<double>::quiet_NaN();
    row.validity_metric = validity_metric(p);
    result.rows.push_back(row);
    log_measure.push_back(std::log(p.measure()));
    log_integral.push_back(std::log(row.fraction_integral));
    log_sum.push_back(std::log(row.fraction_sum));
  }
  result.slope_integral = fit_slope(log_measure, log_integral);
  result.slope_sum = with_sum ? fit_slope(log_measure, log_sum) : std::numeric_limits<double>::quiet_NaN();
  return result;
}

}  // namespace becsq::bogoliubov
