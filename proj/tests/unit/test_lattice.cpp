#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "becsq/lattice.hpp"
#include "becsq/rng.hpp"

using namespace becsq;

TEST_CASE("Philox4x32-10 known-answer vectors") {
  // Counter and key laid out as (index, stream, traj lo, traj hi) and (seed lo, seed hi).
  const Philox zero(0, 0, 0);
  const Philox::Block expect0{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
  CHECK(zero.block(0) == expect0);

  const Philox ones(~0ull, ~0ull, 0xffffffffu);
  const Philox::Block expect1{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu};
  CHECK(ones.block(0xffffffffu) == expect1);
}

TEST_CASE("Philox normals: moments and stream independence") {
  const Philox a(42, 7, 0);
  const Philox b(42, 7, 1);
  const int n = 200000;
  double s = 0, ss = 0, cross = 0;
  for (int i = 0; i < n / 2; ++i) {
    const auto x = a.normal_pair(i);
    const auto y = b.normal_pair(i);
    for (int j = 0; j < 2; ++j) {
      s += x[j];
      ss += x[j] * x[j];
      cross += x[j] * y[j];
    }
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(ss / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cross / n) < 4.0 / std::sqrt(n));
  CHECK(a.normal_pair(5) == Philox(42, 7, 0).normal_pair(5));
  CHECK(a.normal_pair(5) != Philox(43, 7, 0).normal_pair(5));
}

TEST_CASE("lattice geometry and FFT ordering") {
  const auto l = FieldLattice::make(2, {4, 8, 1}, {2.0, 4.0, 1.0});
  CHECK(l.size() == 32);
  CHECK(l.dV() == doctest::Approx(0.25));
  CHECK(l.volume() == doctest::Approx(8.0));
  const auto kx = l.k_axis(0);
  const double dk = 2.0 * std::numbers::pi / 2.0;
  REQUIRE(kx.size() == 4);
  CHECK(kx[0] == 0.0);
  CHECK(kx[1] == doctest::Approx(dk));
  CHECK(kx[2] == doctest::Approx(-2 * dk));
  CHECK(kx[3] == doctest::Approx(-dk));
  const auto k2 = l.k_squared();
  const auto ky = l.k_axis(1);
  // Row-major, last axis fastest.
  CHECK(k2[1 * 8 + 3] == doctest::Approx(kx[1] * kx[1] + ky[3] * ky[3]));
  const auto x = l.x_axis(0);
  CHECK(x[0] == doctest::Approx(-0.75));
  CHECK(x[3] == doctest::Approx(0.75));

  CHECK_THROWS_AS(FieldLattice::make(1, {6, 1, 1}, {1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(FieldLattice::make(1, {8, 1, 1}, {-1, 1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(FieldLattice::make(4, {8, 1, 1}, {1, 1, 1}), std::invalid_argument);
}

TEST_CASE("FFT round trip and plane-wave bin") {
  const auto l = FieldLattice::make(3, {8, 4, 16}, {1.0, 2.0, 3.0});
  const SpectralPlan plan(l);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> g;
  std::vector<cplx> f(l.size()), orig;
  for (auto& z : f) z = {g(gen), g(gen)};
  orig = f;
  plan.forward(f.data());
  plan.backward(f.data());
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(f[i] / static_cast<double>(l.size()) - orig[i]) < 1e-13);

  // exp(i k x) along the last axis lands in the FFT bin of that k.
  const auto l1 = FieldLattice::make(1, {32, 1, 1}, {5.0, 1, 1});
  const SpectralPlan p1(l1);
  const auto k = l1.k_axis(0);
  const auto x = l1.x_axis(0);
  std::vector<cplx> w(32);
  for (std::size_t i = 0; i < 32; ++i) w[i] = std::polar(1.0, k[29] * x[i]);
  p1.forward(w.data());
  for (std::size_t i = 0; i < 32; ++i) CHECK(std::abs(w[i]) == doctest::Approx(i == 29 ? 32.0 : 0.0).epsilon(1e-12));
}
