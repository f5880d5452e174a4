#include "becsq/two_mode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>

#include "becsq/constants.hpp"
#include "becsq/error.hpp"

namespace becsq::two_mode {

namespace {

constexpr complex I{0.0, 1.0};

// exp[n (e^{-i delta} - 1)], with the real part of the exponent formed as
// -2 n sin^2(delta/2) so small phases keep full precision.
complex kerr_overlap(double n, double delta) {
  const double half = std::sin(0.5 * delta);
  return std::exp(complex{-2.0 * n * half * half, -n * std::sin(delta)});
}

double residue(complex value) {
  return std::abs(value.imag()) / std::max(std::abs(value.real()), 1.0);
}

double ratio_for(const SqueezingResult& r, Metric metric) {
  switch (metric) {
    case Metric::Na:
      return r.var_Na / r.N_a;
    case Metric::Nb:
      return r.var_Nb / r.N_b;
    case Metric::Difference:
      return r.var_diff / (r.N_a + r.N_b);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double db_for(const SqueezingResult& r, Metric metric) {
  switch (metric) {
    case Metric::Na:
      return r.db_Na;
    case Metric::Nb:
      return r.db_Nb;
    case Metric::Difference:
      return r.db_diff;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Strictly-better comparison with NaN treated as worst.
bool better(double candidate, double incumbent) {
  if (std::isnan(candidate)) return false;
  if (std::isnan(incumbent)) return true;
  return candidate < incumbent;
}

}  // namespace

void TwoModeParams::validate() const {
  if (!(n_a >= 0.0) || !(n_b >= 0.0)) throw std::invalid_argument("two_mode: populations must be >= 0");
  if (!(tau_hold >= 0.0)) throw std::invalid_argument("two_mode: tau_hold must be >= 0");
  for (double v : {chi_aa, chi_ab, chi_bb, theta, phi}) {
    if (!std::isfinite(v)) throw std::invalid_argument("two_mode: non-finite parameter");
  }
}

double squeezing_db(double variance, double reference) {
  if (reference == 0.0 || !std::isfinite(reference)) return std::numeric_limits<double>::quiet_NaN();
  const double ratio = variance / reference;
  if (ratio <= 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(ratio);
}

CoherentFactors coherent_factors(const TwoModeParams& p) {
  p.validate();
  const double d_a = p.lambda_aa() - p.lambda_ab();
  const double d_b = p.lambda_bb() - p.lambda_ab();
  const complex phase = std::polar(1.0, p.phi);

  CoherentFactors f;
  f.A = std::sqrt(p.n_a) * kerr_overlap(p.n_a, d_a);
  f.A2 = p.n_a * kerr_overlap(p.n_a, 2.0 * d_a);
  f.B = -I * phase * std::sqrt(p.n_b) * kerr_overlap(p.n_b, d_b);
  f.B2 = -p.n_b * phase * phase * kerr_overlap(p.n_b, 2.0 * d_b);
  f.D = f.A * std::conj(f.B) - std::conj(f.A) * f.B;
  return f;
}

SqueezingResult evaluate(const TwoModeParams& p) {
  const CoherentFactors f = coherent_factors(p);
  const double na = p.n_a;
  const double nb = p.n_b;
  const double s = std::sin(p.theta);
  const double c = std::cos(p.theta);
  const double c2 = c * c;
  const double s2 = s * s;
  const complex D = f.D;

  // Conjugate pairs are formed as X -/+ conj(X) so they cancel exactly.
  const complex AB = f.A * std::conj(f.B);
  const complex Qa = std::polar(1.0, -(p.lambda_aa() - p.lambda_ab())) * AB;
  const complex Rb = std::polar(1.0, p.lambda_bb() - p.lambda_ab()) * AB;
  const complex P = std::polar(1.0, p.lambda_aa() - p.lambda_bb()) * f.B2 * std::conj(f.A2);
  const complex cross = D * D - P - std::conj(P);

  const complex mean_a = na * c2 + nb * s2 + I * c * s * D;
  const complex mean_b = na * s2 + nb * c2 - I * c * s * D;

  const complex var_a = na * c2 + nb * s2 + 2.0 * na * nb * c2 * s2 + c2 * s2 * cross +
                        I * c * s * D * (1.0 - 2.0 * na * c2 - 2.0 * nb * s2) +
                        2.0 * I * c2 * c * s * na * (Qa - std::conj(Qa)) +
                        2.0 * I * c * s2 * s * nb * (Rb - std::conj(Rb));

  const complex var_b = na * s2 + nb * c2 + 2.0 * na * nb * c2 * s2 + c2 * s2 * cross +
                        I * c * s * D * (-1.0 + 2.0 * na * s2 + 2.0 * nb * c2) +
                        2.0 * I * c2 * c * s * nb * (std::conj(Rb) - Rb) +
                        2.0 * I * c * s2 * s * na * (std::conj(Qa) - Qa);

  const complex var_d = na + nb + 4.0 * I * c * s * D * (na - nb) * (s2 - c2) +
                        4.0 * c2 * s2 * (2.0 * na * nb + cross) +
                        4.0 * I * c * s * (c2 - s2) *
                            (na * (Qa - std::conj(Qa)) + nb * (std::conj(Rb) - Rb));

  SqueezingResult r;
  r.N_a = mean_a.real();
  r.N_b = mean_b.real();
  r.var_Na = var_a.real();
  r.var_Nb = var_b.real();
  r.var_diff = var_d.real();
  r.imag_residue = std::max({residue(mean_a), residue(mean_b), residue(var_a), residue(var_b),
                             residue(var_d)});
  if (r.imag_residue > 1e-9) {
    std::ostringstream msg;
    msg << "two_mode::evaluate: imaginary residue " << r.imag_residue << " exceeds 1e-9";
    throw std::logic_error(msg.str());
  }
  r.db_Na = squeezing_db(r.var_Na, r.N_a);
  r.db_Nb = squeezing_db(r.var_Nb, r.N_b);
  r.db_diff = squeezing_db(r.var_diff, r.N_a + r.N_b);
  r.degenerate = r.N_a == 0.0 || r.N_b == 0.0 || (r.N_a + r.N_b) == 0.0;
  return r;
}

std::size_t ScanTable::best(Metric metric) const {
  switch (metric) {
    case Metric::Na:
      return best_Na;
    case Metric::Nb:
      return best_Nb;
    case Metric::Difference:
      return best_diff;
  }
  return 0;
}

ScanTable scan_recombination(const TwoModeParams& base, std::span<const double> theta_grid,
                             std::span<const double> phi_grid) {
  if (theta_grid.empty() || phi_grid.empty()) {
    throw std::invalid_argument("scan_recombination: grids must be nonempty");
  }
  ScanTable table;
  table.rows.reserve(theta_grid.size() * phi_grid.size());
  for (double phi : phi_grid) {
    for (double theta : theta_grid) {
      TwoModeParams p = base;
      p.theta = theta;
      p.phi = phi;
      table.rows.push_back({theta, phi, evaluate(p)});
    }
  }

  const auto pick = [&](Metric metric) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
      const auto& cand = table.rows[i];
      const auto& inc = table.rows[best];
      const double rc = ratio_for(cand.result, metric);
      const double ri = ratio_for(inc.result, metric);
      // Values within 1e-12 relative count as ties.
      const bool tie = std::abs(rc - ri) <= 1e-12 * std::max(std::abs(rc), std::abs(ri));
      if (!tie && better(rc, ri)) {
        best = i;
      } else if (tie) {
        if (cand.theta < inc.theta || (cand.theta == inc.theta && cand.phi < inc.phi)) best = i;
      }
    }
    return best;
  };
  table.best_Na = pick(Metric::Na);
  table.best_Nb = pick(Metric::Nb);
  table.best_diff = pick(Metric::Difference);
  return table;
}

Optimum optimize_theta(const TwoModeParams& base, Metric metric, std::size_t coarse_points) {
  coarse_points = std::max<std::size_t>(coarse_points, 8);
  const double step = constants::pi / static_cast<double>(coarse_points);
  const auto objective = [&](double theta) {
    TwoModeParams p = base;
    p.theta = theta;
    return ratio_for(evaluate(p), metric);
  };

  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < coarse_points; ++i) {
    const double v = objective(step * static_cast<double>(i));
    if (better(v, best_value)) {
      best_value = v;
      best = i;
    }
  }

  const double center = step * static_cast<double>(best);
  auto [theta, value] = boost::math::tools::brent_find_minima(objective, center - step, center + step, 50);
  if (!better(value, best_value)) theta = center;

  TwoModeParams p = base;
  p.theta = theta;
  Optimum opt;
  opt.theta = theta;
  opt.result = evaluate(p);
  opt.db = db_for(opt.result, metric);
  return opt;
}

std::size_t fock_cutoff_for(const TwoModeParams& params, double tail) {
  const double total = params.n_a + params.n_b;
  if (total == 0.0) return 0;
  std::size_t k = static_cast<std::size_t>(total);
  // P(X > k) = P(k + 1, total) for a Poisson variate of mean `total`.
  while (boost::math::gamma_p(static_cast<double>(k + 1), total) > tail) ++k;
  return k;
}

SqueezingResult fock_oracle(const TwoModeParams& p, std::size_t cutoff) {
  p.validate();
  const std::size_t dim = cutoff + 1;

  // Initial product coherent state |alpha, beta>, alpha = sqrt(n_a),
  // beta = -i sqrt(n_b), stored block-wise by total number N with index m.
  const double log_alpha = p.n_a > 0.0 ? 0.5 * std::log(p.n_a) : 0.0;
  const double log_beta = p.n_b > 0.0 ? 0.5 * std::log(p.n_b) : 0.0;
  const auto amplitude = [&](std::size_t m, std::size_t n) -> complex {
    if ((p.n_a == 0.0 && m > 0) || (p.n_b == 0.0 && n > 0)) return {0.0, 0.0};
    const double log_mag = -0.5 * (p.n_a + p.n_b) + static_cast<double>(m) * log_alpha +
                           static_cast<double>(n) * log_beta -
                           0.5 * (std::lgamma(m + 1.0) + std::lgamma(n + 1.0));
    static constexpr complex minus_i_pow[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return std::exp(log_mag) * minus_i_pow[n % 4];
  };

  double norm = 0.0;
  std::vector<std::vector<complex>> held(dim);
  for (std::size_t N = 0; N < dim; ++N) {
    held[N].resize(N + 1);
    for (std::size_t m = 0; m <= N; ++m) {
      const std::size_t n = N - m;
      const complex c = amplitude(m, n);
      norm += std::norm(c);
      const double dm = static_cast<double>(m);
      const double dn = static_cast<double>(n);
      const double hold_phase =
          p.lambda_aa() * dm * (dm - 1.0) / 2.0 + p.lambda_bb() * dn * (dn - 1.0) / 2.0 + p.lambda_ab() * dm * dn;
      held[N][m] = c * std::polar(1.0, -hold_phase);
    }
  }
  if (norm < 1.0 - 1e-10) {
    std::ostringstream msg;
    msg << "fock_oracle: cutoff " << cutoff << " keeps norm " << norm << " < 1 - 1e-10";
    throw TruncationError(msg.str());
  }

  // Recombination U = exp(-i H3 t / hbar) with U a^dag U^dag = c a^dag - i e^{-i phi} s b^dag and
  // U b^dag U^dag = c b^dag - i e^{i phi} s a^dag. Columns U|m, N-m> are built from the previous
  // block by one rotated creation operator, which keeps every step norm-preserving.
  const double c = std::cos(p.theta);
  const double s = std::sin(p.theta);
  const complex to_b_from_a = -I * std::polar(1.0, -p.phi) * s;  // b^dag weight in rotated a^dag
  const complex to_a_from_b = -I * std::polar(1.0, p.phi) * s;   // a^dag weight in rotated b^dag

  double sum_w = 0.0, sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_dd = 0.0;
  std::vector<std::vector<complex>> prev{{complex{1.0, 0.0}}};
  std::vector<std::vector<complex>> cols;
  for (std::size_t N = 0; N < dim; ++N) {
    if (N > 0) {
      cols.assign(N + 1, std::vector<complex>(N + 1));
      const double rootN = std::sqrt(static_cast<double>(N));
      for (std::size_t m = 0; m <= N; ++m) {
        const auto& v = m == 0 ? prev[0] : prev[m - 1];
        auto& w = cols[m];
        if (m == 0) {
          for (std::size_t q = 0; q < N; ++q) {
            w[q] += c * std::sqrt(static_cast<double>(N - q)) * v[q];
            w[q + 1] += to_a_from_b * std::sqrt(static_cast<double>(q + 1)) * v[q];
          }
          for (auto& x : w) x /= rootN;
        } else {
          for (std::size_t q = 0; q < N; ++q) {
            w[q + 1] += c * std::sqrt(static_cast<double>(q + 1)) * v[q];
            w[q] += to_b_from_a * std::sqrt(static_cast<double>(N - q)) * v[q];
          }
          const double rootm = std::sqrt(static_cast<double>(m));
          for (auto& x : w) x /= rootm;
        }
      }
      prev.swap(cols);
    }
    // prev now holds the columns of block N.
    std::vector<complex> out(N + 1);
    for (std::size_t m = 0; m <= N; ++m) {
      const complex coeff = held[N][m];
      if (coeff == complex{}) continue;
      for (std::size_t q = 0; q <= N; ++q) out[q] += prev[m][q] * coeff;
    }
    for (std::size_t q = 0; q <= N; ++q) {
      const double w = std::norm(out[q]);
      const double ma = static_cast<double>(q);
      const double mb = static_cast<double>(N - q);
      sum_w += w;
      sum_a += w * ma;
      sum_b += w * mb;
      sum_aa += w * ma * ma;
      sum_bb += w * mb * mb;
      sum_dd += w * (ma - mb) * (ma - mb);
    }
  }

  SqueezingResult r;
  r.N_a = sum_a / sum_w;
  r.N_b = sum_b / sum_w;
  r.var_Na = sum_aa / sum_w - r.N_a * r.N_a;
  r.var_Nb = sum_bb / sum_w - r.N_b * r.N_b;
  r.var_diff = sum_dd / sum_w - (r.N_a - r.N_b) * (r.N_a - r.N_b);
  r.db_Na = squeezing_db(r.var_Na, r.N_a);
  r.db_Nb = squeezing_db(r.var_Nb, r.N_b);
  r.db_diff = squeezing_db(r.var_diff, r.N_a + r.N_b);
  r.degenerate = r.N_a == 0.0 || r.N_b == 0.0;
  return r;
}

}  // namespace becsq::two_mode
