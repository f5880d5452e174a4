#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "becsq/constants.hpp"
#include "becsq/error.hpp"
#include "becsq/mode_reduction.hpp"

using namespace becsq::mode_reduction;
using becsq::constants::hbar;
using becsq::constants::rb87_mass;

namespace {

constexpr double pi = std::numbers::pi;

// Cell-centred samples of rho(x, y, z) on [-h_i, h_i]^3, n points per axis.
struct Sampled {
  std::vector<double> rho;
  double dV = 0.0;
};

Sampled sample(const std::function<double(double, double, double)>& rho, std::array<double, 3> half, std::size_t n) {
  Sampled s;
  s.rho.resize(n * n * n);
  std::array<double, 3> d{};
  for (int i = 0; i < 3; ++i) d[i] = 2.0 * half[i] / static_cast<double>(n);
  s.dV = d[0] * d[1] * d[2];
  auto at = [&](int axis, std::size_t i) { return -half[axis] + (static_cast<double>(i) + 0.5) * d[axis]; };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) s.rho[(i * n + j) * n + k] = rho(at(0, i), at(1, j), at(2, k));
  return s;
}

void normalize(Sampled& s) {
  double norm = 0.0;
  for (double r : s.rho) norm += r;
  norm *= s.dV;
  for (double& r : s.rho) r /= norm;
}

TrapSpec harmonic(double wx, double wy, double wz) {
  TrapSpec t;
  t.kind = TrapKind::harmonic;
  t.omegas = {wx, wy, wz};
  return t;
}

double osc(double w) { return std::sqrt(hbar / (rb87_mass * w)); }

const double U_rb = 4.0 * pi * hbar * hbar * 5.3e-9 / rb87_mass;

}  // namespace

TEST_CASE("U from scattering lengths") {
  InteractionSpec s;
  CHECK(u_from_scattering(s).U_aa == 0.0);
  s.a_aa = 5e-9;
  s.a_ab = 1e-8;
  const auto c = u_from_scattering(s);
  CHECK(c.U_aa == doctest::Approx(4.0 * pi * hbar * hbar * 5e-9 / rb87_mass).epsilon(1e-15));
  CHECK(c.U_ab == doctest::Approx(2.0 * c.U_aa).epsilon(1e-15));
  s.a_bb = -1e-9;
  CHECK_THROWS_AS(u_from_scattering(s), std::invalid_argument);
  s.a_bb = 0.0;
  s.mass = 0.0;
  CHECK_THROWS_AS(u_from_scattering(s), std::invalid_argument);
}

TEST_CASE("uniform profile on a grid equals U/(hbar V)") {
  TrapSpec box;
  box.kind = TrapKind::box;
  box.extents = {10e-6, 20e-6, 5e-6};
  const double V = 10e-6 * 20e-6 * 5e-6;
  const std::size_t n = 17;
  std::vector<double> rho(n * n * n, 1.0 / V);
  const double dV = V / static_cast<double>(rho.size());
  CHECK(chi_overlap(rho, dV, U_rb) == doctest::Approx(chi_uniform(box, U_rb)).epsilon(1e-12));
  CHECK(chi_uniform(box, U_rb) == doctest::Approx(U_rb / (hbar * V)).epsilon(1e-15));
}

TEST_CASE("chi_overlap rejects unnormalized profiles") {
  std::vector<double> rho(8, 1.0);
  CHECK_THROWS_AS(chi_overlap(rho, 0.1, 1.0), becsq::NormalizationError);
  CHECK_NOTHROW(chi_overlap(rho, 0.125, 1.0));
}

TEST_CASE("Cauchy-Schwarz: perturbed uniform profiles exceed the uniform value") {
  const std::size_t n = 64;
  const double L = 1.0;
  const double dV = L / n;
  std::vector<double> uniform(n, 1.0 / L);
  const double base = chi_overlap(uniform, dV, hbar);
  for (double eps : {1e-3, 0.1, 0.5}) {
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = (1.0 + eps * std::cos(2.0 * pi * (i + 0.5) / n)) / L;
    CHECK(chi_overlap(rho, dV, hbar) > base);
  }
}

TEST_CASE("Gaussian closed form against grid quadrature") {
  const auto trap = harmonic(2 * pi * 50, 2 * pi * 80, 2 * pi * 120);
  std::array<double, 3> a{}, half{};
  for (int i = 0; i < 3; ++i) {
    a[i] = osc(trap.omegas[i]);
    half[i] = 6.0 * a[i] / std::sqrt(2.0);  // six density standard deviations
  }
  auto rho = [&](double x, double y, double z) {
    const double norm = std::pow(pi, 1.5) * a[0] * a[1] * a[2];
    return std::exp(-x * x / (a[0] * a[0]) - y * y / (a[1] * a[1]) - z * z / (a[2] * a[2])) / norm;
  };
  auto s = sample(rho, half, 96);
  normalize(s);
  CHECK(chi_overlap(s.rho, s.dV, U_rb) == doctest::Approx(chi_gaussian(trap, U_rb, rb87_mass)).epsilon(1e-6));
}

TEST_CASE("Gaussian scaling and homogeneity") {
  const auto t1 = harmonic(100, 100, 100);
  const auto t2 = harmonic(200, 200, 200);
  CHECK(chi_gaussian(t2, U_rb, rb87_mass) / chi_gaussian(t1, U_rb, rb87_mass) ==
        doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-14));
  CHECK(chi_gaussian(t1, 0.0, rb87_mass) == 0.0);
  CHECK(chi_gaussian(t1, 3.0 * U_rb, rb87_mass) == doctest::Approx(3.0 * chi_gaussian(t1, U_rb, rb87_mass)));
  TrapSpec box;
  box.kind = TrapKind::box;
  box.extents = {1, 1, 1};
  CHECK_THROWS_AS(chi_gaussian(box, U_rb, rb87_mass), std::invalid_argument);
}

TEST_CASE("Thomas-Fermi closed form against grid quadrature, converging with resolution") {
  const auto trap = harmonic(2 * pi * 30, 2 * pi * 30, 2 * pi * 60);
  const double N = 1e5;
  const double m = rb87_mass;
  const double w3 = trap.omegas[0] * trap.omegas[1] * trap.omegas[2];
  const double mu = std::pow(15.0 * N * U_rb * w3 * std::pow(m, 1.5) / (16.0 * std::sqrt(2.0) * pi), 0.4);
  std::array<double, 3> R{};
  for (int i = 0; i < 3; ++i) R[i] = std::sqrt(2.0 * mu / (m * trap.omegas[i] * trap.omegas[i]));
  auto rho = [&](double x, double y, double z) {
    const double q = 1.0 - x * x / (R[0] * R[0]) - y * y / (R[1] * R[1]) - z * z / (R[2] * R[2]);
    return q > 0.0 ? q : 0.0;
  };
  const double exact = chi_thomas_fermi(trap, U_rb, m, N);
  double prev_err = 1.0;
  for (std::size_t n : {64u, 128u, 256u}) {
    auto s = sample(rho, {R[0], R[1], R[2]}, n);
    normalize(s);
    const double err = std::abs(chi_overlap(s.rho, s.dV, U_rb) / exact - 1.0);
    CAPTURE(n);
    CHECK(err < prev_err);
    prev_err = err;
  }
  CHECK(prev_err < 1e-4);
}

TEST_CASE("Thomas-Fermi N and U scaling") {
  const auto trap = harmonic(100, 120, 140);
  const double c1 = chi_thomas_fermi(trap, U_rb, rb87_mass, 1e4);
  CHECK(chi_thomas_fermi(trap, U_rb, rb87_mass, 32e4) == doctest::Approx(c1 / 8.0).epsilon(1e-13));
  CHECK(chi_thomas_fermi(trap, U_rb * 1e-12, rb87_mass, 1e4) < 1e-4 * c1);
  CHECK(chi_thomas_fermi(trap, 0.0, rb87_mass, 1e4) == 0.0);
  CHECK_THROWS_AS(chi_thomas_fermi(trap, U_rb, rb87_mass, 0.0), std::invalid_argument);
}

TEST_CASE("filtered Gaussian: large-p limit and truncated quadrature") {
  auto trap = harmonic(2 * pi * 40, 2 * pi * 40, 2 * pi * 90);
  trap.filter_p = 8.0;
  CHECK(chi_filtered_gaussian(trap, U_rb, rb87_mass) ==
        doctest::Approx(chi_gaussian(trap, U_rb, rb87_mass)).epsilon(1e-10));

  trap.filter_p = 0.5;
  std::array<double, 3> a{}, half{};
  for (int i = 0; i < 3; ++i) {
    a[i] = osc(trap.omegas[i]);
    half[i] = 0.5 * a[i];
  }
  auto rho = [&](double x, double y, double z) {
    return std::exp(-x * x / (a[0] * a[0]) - y * y / (a[1] * a[1]) - z * z / (a[2] * a[2]));
  };
  auto s = sample(rho, half, 128);
  normalize(s);
  const double quad = chi_overlap(s.rho, s.dV, U_rb);
  const double filtered = chi_filtered_gaussian(trap, U_rb, rb87_mass);
  CHECK(filtered == doctest::Approx(quad).epsilon(1e-4));
  // Truncation to the flatter core raises the peak density after renormalization.
  CHECK(filtered > chi_gaussian(trap, U_rb, rb87_mass));

  CHECK(chi_filtered_gaussian(trap, 0.0, rb87_mass) == 0.0);
  TrapSpec bad = trap;
  bad.filter_p = -1.0;
  CHECK_THROWS_AS(chi_filtered_gaussian(bad, U_rb, rb87_mass), std::invalid_argument);
}

TEST_CASE("reduced interactions") {
  TransverseProfile box{TransverseKind::uniform, {2e-6, 3e-6}};
  CHECK(reduced_interaction(U_rb, 1, box) == doctest::Approx(U_rb / 6e-12).epsilon(1e-15));
  CHECK(reduced_interaction(U_rb, 2, {TransverseKind::uniform, {4e-6, 0}}) == doctest::Approx(U_rb / 4e-6));

  // Gaussian transverse density of standard deviations sy, sz, by quadrature.
  const double sy = 1.5e-6, sz = 0.8e-6;
  const std::size_t n = 400;
  const double hy = 12.0 * sy / n, hz = 12.0 * sz / n;
  double overlap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = -6.0 * sy + (i + 0.5) * hy;
    for (std::size_t j = 0; j < n; ++j) {
      const double z = -6.0 * sz + (j + 0.5) * hz;
      const double r = std::exp(-y * y / (2 * sy * sy) - z * z / (2 * sz * sz)) / (2 * pi * sy * sz);
      overlap += r * r;
    }
  }
  overlap *= hy * hz;
  const TransverseProfile g{TransverseKind::gaussian, {sy, sz}};
  CHECK(reduced_interaction(U_rb, 1, g) == doctest::Approx(U_rb * overlap).epsilon(1e-8));
  CHECK(reduced_interaction(U_rb, 1, g) == doctest::Approx(U_rb / (4 * pi * sy * sz)).epsilon(1e-14));
  CHECK_THROWS_AS(reduced_interaction(U_rb, 3, g), std::invalid_argument);
}

TEST_CASE("trap validation") {
  TrapSpec box;
  box.kind = TrapKind::box;
  box.extents = {1, 1, 1};
  box.filter_p = 1.0;
  CHECK_THROWS_AS(box.validate(), std::invalid_argument);
  TrapSpec h = harmonic(1, 0, 1);
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}
