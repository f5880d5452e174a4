#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "becsq/bogoliubov.hpp"

using namespace becsq::bogoliubov;

namespace {

BogoliubovParams fig5(double tau) {
  BogoliubovParams p;
  p.chi_aa = 2.67e-2;
  p.n_a = 2e5;
  p.n_total = 4e5;
  p.tau_hold = tau;
  p.dim = 1;
  p.extents = {600e-6, 1.0, 1.0};
  return p;
}

}  // namespace

TEST_CASE("free-particle limit") {
  BogoliubovParams p = fig5(1e-3);
  p.chi_aa = 0.0;
  for (const auto& m : spectrum(p, 8).modes) {
    CHECK(m.omega == doctest::Approx(m.omega0).epsilon(1e-15));
    CHECK(m.u == doctest::Approx(1.0));
    CHECK(m.v == doctest::Approx(0.0));
  }
}

TEST_CASE("symplectic normalization and omega >= omega0") {
  BogoliubovParams p = fig5(1e-3);
  p.dim = 3;
  p.extents = {20e-6, 30e-6, 40e-6};
  const auto s = spectrum(p, 4);
  CHECK(s.modes.size() == 9 * 9 * 9 - 1);
  for (const auto& m : s.modes) {
    CHECK(std::abs(m.u * m.u - m.v * m.v - 1.0) < 1e-12);
    CHECK(m.omega >= m.omega0);
  }
}

TEST_CASE("phonon slope at the smallest lattice k") {
  BogoliubovParams p = fig5(1e-3);
  p.extents[0] = 0.1;  // long box so the smallest k is deep in the phonon regime
  const double k = 2.0 * std::numbers::pi / p.extents[0];
  const double c = std::sqrt(becsq::constants::hbar * p.chi_aa * p.n_a / p.mass);
  const double w = bogoliubov_frequency(p, k * k);
  // w = c k sqrt(1 + w0/(2 chi n)); the relative correction is w0/(4 chi n).
  const double w0 = free_frequency(p, k * k);
  CHECK(std::abs(w / (c * k) - 1.0) < 1.01 * w0 / (4.0 * p.chi_aa * p.n_a));
  CHECK(std::abs(w / (c * k) - 1.0) < 1e-3);
}

TEST_CASE("occupation: cos factor, small-time limit, parity, permutation") {
  BogoliubovParams p = fig5(5e-3);
  const std::array<double, 3> k{2e4, 0, 0};
  p.theta = std::numbers::pi / 2;
  CHECK(occupation_k(p, k) < 1e-25);
  p.theta = 0.0;
  CHECK(occupation_k(p, k) == occupation_k(p, {-2e4, 0, 0}));

  // n ~ tau^2 at small tau: doubling a tiny tau multiplies n by 4.
  p.tau_hold = 1e-8;
  const double n1 = occupation_k(p, k);
  p.tau_hold = 2e-8;
  const double n2 = occupation_k(p, k);
  CHECK(n2 / n1 == doctest::Approx(4.0).epsilon(1e-6));

  BogoliubovParams c = fig5(1e-3);
  c.dim = 3;
  c.extents = {50e-6, 50e-6, 50e-6};
  CHECK(occupation_k(c, {1e5, 2e5, 3e5}) == doctest::Approx(occupation_k(c, {3e5, 1e5, 2e5})).epsilon(1e-14));
  CHECK_THROWS_AS(occupation_k(c, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("continuum integrals against closed forms and an independent Fourier-weighted oracle") {
  CHECK(f_integral(2, 0.0) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-6));
  CHECK(f_integral(3, 0.0) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-6));
  CHECK(f_integral(1, 0.0) == doctest::Approx(4.0 / 3.0 * std::sqrt(std::numbers::pi)).epsilon(1e-6));
  // Reference values: finite part by high-precision quadrature split at the
  // zeros, remainder by an adaptive cosine-weighted (QAWF) Fourier integral.
  struct Ref {
    int d;
    double Lambda;
    double value;
  };
  const Ref refs[] = {
      {1, 0.5, 1.9757606423258511}, {1, 7.5, 0.7841172129572536},  {1, 53.4, 0.3025702737444983},
      {2, 0.5, 1.1781733790487376}, {2, 7.5, 0.26507615125063677}, {2, 53.4, 0.05562993369862612},
      {3, 0.5, 1.3237113101525584}, {3, 7.5, 0.40557785007451874}, {3, 53.4, 0.15199673205979372},
  };
  for (const auto& r : refs) {
    CAPTURE(r.d);
    CAPTURE(r.Lambda);
    CHECK(f_integral(r.d, r.Lambda) == doctest::Approx(r.value).epsilon(1e-6));
  }
}

TEST_CASE("depletion sum: zero coupling, monotone bounds, lowest mode") {
  BogoliubovParams p = fig5(1e-2);
  BogoliubovParams z = p;
  z.chi_aa = 0.0;
  CHECK(depletion_sum(z).fraction == 0.0);

  const double dk = 2.0 * std::numbers::pi / p.extents[0];
  const double lowest = 2.0 * occupation_k(p, {dk, 0, 0}) / p.n_total;
  const auto s = depletion_sum(p);
  CHECK(s.fraction >= lowest);
  // Explicit partial sums grow with the bound.
  double prev = 0.0;
  for (int n = 1; n <= 64; n *= 2) {
    double partial = 0.0;
    for (int j = 1; j <= n; ++j) partial += 2.0 * occupation_k(p, {j * dk, 0, 0});
    CHECK(partial >= prev);
    prev = partial;
  }
}

TEST_CASE("cos^2 factorization is exact") {
  BogoliubovParams p = fig5(4e-3);
  const double f0 = depletion_integral(p);
  const double s0 = depletion_sum(p).fraction;
  p.theta = 0.7;
  const double c2 = std::cos(0.7) * std::cos(0.7);
  CHECK(depletion_integral(p) == doctest::Approx(f0 * c2).epsilon(1e-13));
  CHECK(depletion_sum(p).fraction == doctest::Approx(s0 * c2).epsilon(1e-12));
}

TEST_CASE("sum and integral at L = 600 um: gap is the k = 0 term of the continuum") {
  for (double tau : {1e-3, 2e-3, 3e-3, 5e-3, 1e-2, 1.3e-2}) {
    const BogoliubovParams p = fig5(tau);
    const double s = depletion_sum(p).fraction;
    const double i = depletion_integral(p);
    const double Lambda = p.Lambda();
    const double k0 = Lambda * Lambda / p.n_total;  // continuum integrand at k = 0, theta = 0
    CAPTURE(tau);
    CHECK((i - s) / s == doctest::Approx(k0 / s).epsilon(0.03));
    if (validity_metric(p) < 0.1) CHECK(std::abs(i - s) / s < 0.05);
  }
  const BogoliubovParams p = fig5(1e-2);
  const double s = depletion_sum(p).fraction;
  CHECK(s > 0.05);
  CHECK(s < 0.3);
}

TEST_CASE("integral/sum ratio approaches one in the validity limit") {
  for (int dim = 1; dim <= 3; ++dim) {
    BogoliubovParams p;
    p.dim = dim;
    p.n_a = 1e4;
    p.chi_aa = 1.0;
    p.tau_hold = 1e-3;  // Lambda = 10
    for (double L : {20e-6, 80e-6, 320e-6}) {
      p.extents = {L, L, L};
      const double metric = validity_metric(p);
      if (metric >= 0.1) continue;
      const double ratio = depletion_integral(p) / depletion_sum(p).fraction;
      CAPTURE(dim);
      CAPTURE(L);
      CHECK(std::abs(ratio - 1.0) < 0.05);
    }
  }
}

TEST_CASE("size scaling exponents") {
  BogoliubovParams p;
  p.n_a = 5e4;
  p.n_total = 1e5;
  p.dim = 1;
  p.extents = {50e-6, 1, 1};
  p.chi_aa = 8.9e-40 / (becsq::constants::hbar * 50e-6);
  p.tau_hold = 10.0 * 50e-6;
  std::vector<double> sizes;
  for (double L = 50e-6; L <= 3200e-6 * 1.0001; L *= 2) sizes.push_back(L);
  const auto r1 = scaling_prediction(p, sizes);
  CHECK(r1.slope_integral == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(std::abs(r1.slope_sum - 0.5) < 0.05);

  p.dim = 2;
  p.extents = {20e-6, 20e-6, 1};
  const auto r2 = scaling_prediction(p, std::vector<double>{10e-6, 20e-6, 40e-6, 80e-6}, false);
  CHECK(std::abs(r2.slope_integral) < 1e-6);

  p.dim = 3;
  p.extents = {20e-6, 20e-6, 20e-6};
  const auto r3 = scaling_prediction(p, std::vector<double>{10e-6, 20e-6, 40e-6, 80e-6}, false);
  CHECK(r3.slope_integral == doctest::Approx(-0.5).epsilon(1e-6));
}

TEST_CASE("invalid inputs") {
  BogoliubovParams p = fig5(1e-3);
  p.dim = 4;
  CHECK_THROWS_AS(depletion_integral(p), std::invalid_argument);
  p = fig5(1e-3);
  p.n_a = 0;
  CHECK_THROWS_AS(depletion_sum(p), std::invalid_argument);
  CHECK_THROWS_AS(spectrum(fig5(1e-3), 0), std::invalid_argument);
}
