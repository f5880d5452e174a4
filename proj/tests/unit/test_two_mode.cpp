#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "becsq/error.hpp"
#include "becsq/two_mode.hpp"

using namespace becsq::two_mode;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1.0}); }

void check_close(const SqueezingResult& x, const SqueezingResult& y, double tol) {
  CHECK(rel(x.N_a, y.N_a) < tol);
  CHECK(rel(x.N_b, y.N_b) < tol);
  CHECK(rel(x.var_Na, y.var_Na) < tol);
  CHECK(rel(x.var_Nb, y.var_Nb) < tol);
  CHECK(rel(x.var_diff, y.var_diff) < tol);
}

TwoModeParams fig2() {
  TwoModeParams p;
  p.n_a = p.n_b = 5e5;
  p.chi_aa = 0.04;
  p.chi_bb = 0.01;
  p.tau_hold = 4e-4;
  return p;
}

}  // namespace

TEST_CASE("coherent factors at zero hold") {
  TwoModeParams p;
  p.n_a = 4;
  p.n_b = 9;
  const auto f = coherent_factors(p);
  CHECK(std::abs(f.A - complex(2, 0)) < 1e-14);
  CHECK(std::abs(f.A2 - complex(4, 0)) < 1e-14);
  CHECK(std::abs(f.B - complex(0, -3)) < 1e-14);
  CHECK(std::abs(f.B2 - complex(-9, 0)) < 1e-14);
  // D = A B* - A* B = 2 (3i) - 2 (-3i).
  CHECK(std::abs(f.D - complex(0, 12)) < 1e-13);
}

TEST_CASE("equal nonlinearities cancel in the factors") {
  TwoModeParams p;
  p.n_a = p.n_b = 100;
  p.chi_aa = p.chi_ab = p.chi_bb = 0.05;
  p.tau_hold = 1e-3;
  const auto f = coherent_factors(p);
  CHECK(std::abs(f.A - complex(10, 0)) < 1e-12);
  CHECK(std::abs(f.A2 - complex(100, 0)) < 1e-12);
  CHECK(std::abs(f.B - complex(0, -10)) < 1e-12);
  CHECK(std::abs(f.B2 - complex(-100, 0)) < 1e-12);
}

TEST_CASE("D is purely imaginary") {
  TwoModeParams p = fig2();
  p.phi = 0.7;
  const auto f = coherent_factors(p);
  CHECK(std::abs(f.D.real()) <= 1e-12 * std::abs(f.D));
}

TEST_CASE("no evolution gives coherent statistics") {
  TwoModeParams p;
  p.n_a = 30;
  p.n_b = 70;
  p.chi_aa = 0.3;
  const auto r = evaluate(p);
  CHECK(r.N_a == doctest::Approx(30).epsilon(1e-14));
  CHECK(r.N_b == doctest::Approx(70).epsilon(1e-14));
  CHECK(r.var_Na == doctest::Approx(30).epsilon(1e-12));
  CHECK(r.var_Nb == doctest::Approx(70).epsilon(1e-12));
  CHECK(r.var_diff == doctest::Approx(100).epsilon(1e-12));
  CHECK(r.db_Na == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("degenerate dB reference") {
  TwoModeParams p;
  p.n_a = 10;
  const auto r = evaluate(p);
  CHECK(r.degenerate);
  CHECK(std::isnan(r.db_Nb));
  CHECK(r.var_Nb == doctest::Approx(0.0));
  CHECK(squeezing_db(1.0, 0.0) != squeezing_db(1.0, 0.0));
  CHECK(std::isinf(squeezing_db(-1.0, 2.0)));
}

TEST_CASE("invalid params rejected") {
  TwoModeParams p;
  p.n_a = -1;
  CHECK_THROWS_AS(evaluate(p), std::invalid_argument);
  p.n_a = 1;
  p.tau_hold = -1;
  CHECK_THROWS_AS(evaluate(p), std::invalid_argument);
}

TEST_CASE("coherent collapse for equal nonlinearities") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    TwoModeParams p;
    p.n_a = 1 + 1e4 * U(gen);
    p.n_b = 1 + 1e4 * U(gen);
    p.chi_aa = p.chi_ab = p.chi_bb = U(gen);
    p.tau_hold = U(gen);
    p.theta = 6.3 * U(gen);
    p.phi = 6.3 * U(gen);
    const auto r = evaluate(p);
    CHECK(rel(r.var_Na, r.N_a) < 1e-10);
    CHECK(rel(r.var_Nb, r.N_b) < 1e-10);
  }
}

TEST_CASE("outputs depend only on nonlinearity differences") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    TwoModeParams p;
    p.n_a = 1 + 1e3 * U(gen);
    p.n_b = 1 + 1e3 * U(gen);
    p.chi_aa = 0.05 * U(gen);
    p.chi_ab = 0.05 * U(gen);
    p.chi_bb = 0.05 * U(gen);
    p.tau_hold = 0.01 * U(gen);
    p.theta = 6.3 * U(gen);
    p.phi = 6.3 * U(gen);
    TwoModeParams q = p;
    const double shift = 0.1 * U(gen);
    q.chi_aa += shift;
    q.chi_ab += shift;
    q.chi_bb += shift;
    const auto a = evaluate(p);
    const auto b = evaluate(q);
    // Relative to the shot-noise scale, which is the magnitude of each term.
    const double scale = p.n_a + p.n_b;
    CHECK(std::abs(a.var_Na - b.var_Na) < 1e-10 * scale * scale);
    CHECK(std::abs(a.var_diff - b.var_diff) < 1e-10 * scale * scale);
    CHECK(std::abs(a.N_a - b.N_a) < 1e-10 * scale);
  }
}

TEST_CASE("theta periodicity, number conservation, realness") {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    TwoModeParams p;
    p.n_a = 1e5 * U(gen);
    p.n_b = 1e5 * U(gen);
    p.chi_aa = 0.05 * U(gen);
    p.chi_ab = 0.05 * U(gen);
    p.chi_bb = 0.05 * U(gen);
    p.tau_hold = 1e-3 * U(gen);
    p.theta = 6.3 * U(gen);
    p.phi = 6.3 * U(gen);
    TwoModeParams q = p;
    q.theta += std::numbers::pi;
    const auto a = evaluate(p);
    const auto b = evaluate(q);
    const double n = p.n_a + p.n_b;
    CHECK(std::abs(a.var_Na - b.var_Na) <= 1e-10 * std::max(1.0, n * n));
    CHECK(std::abs(a.var_diff - b.var_diff) <= 1e-10 * std::max(1.0, n * n));
    CHECK(std::abs(a.N_a - b.N_a) <= 1e-10 * std::max(1.0, n));
    CHECK(std::abs(a.N_a + a.N_b - n) <= 1e-12 * std::max(1.0, n));
    CHECK(a.imag_residue < 1e-9);
    CHECK(a.var_Na >= -1e-9 * n);
    CHECK(a.var_diff >= -1e-9 * n);
  }
}

TEST_CASE("fock oracle: coherent case and theta = 0") {
  TwoModeParams p;
  p.n_a = p.n_b = 4;
  p.chi_aa = p.chi_ab = p.chi_bb = 0.2;
  p.tau_hold = 1;
  p.theta = 0.9;
  p.phi = 0.4;
  check_close(fock_oracle(p, 40), evaluate(p), 1e-8);

  TwoModeParams h;
  h.n_a = 6;
  h.n_b = 3;
  h.chi_aa = 0.3;
  h.tau_hold = 1;
  const auto r = fock_oracle(h, fock_cutoff_for(h));
  CHECK(r.N_a == doctest::Approx(6).epsilon(1e-10));
  CHECK(r.var_Na == doctest::Approx(6).epsilon(1e-10));
}

TEST_CASE("fock oracle: specified agreement case") {
  TwoModeParams p;
  p.n_a = p.n_b = 8;
  p.chi_aa = 0.04;
  p.chi_bb = 0.01;
  p.tau_hold = 0.016 / 0.04;
  p.theta = std::numbers::pi / 4;
  p.phi = 0.1;
  check_close(fock_oracle(p, fock_cutoff_for(p)), evaluate(p), 1e-6);
}

TEST_CASE("fock oracle rejects a short cutoff") {
  TwoModeParams p;
  p.n_a = p.n_b = 10;
  CHECK_THROWS_AS(fock_oracle(p, 10), becsq::TruncationError);
}

TEST_CASE("scan: single point equals evaluate, tie-breaking, pi periodic curves") {
  TwoModeParams p = fig2();
  const std::vector<double> t{0.3}, f{0.1};
  const auto s = scan_recombination(p, t, f);
  REQUIRE(s.rows.size() == 1);
  p.theta = 0.3;
  p.phi = 0.1;
  CHECK(s.rows[0].result.var_Na == evaluate(p).var_Na);

  // Zero hold: every point is shot-noise limited for N_a, so the tie goes to
  // the smallest theta and phi.
  TwoModeParams z;
  z.n_a = z.n_b = 100;
  const std::vector<double> tg{0.5, 0.1, 0.9}, pg{2.0, 1.0};
  const auto zs = scan_recombination(z, tg, pg);
  const auto& best = zs.rows[zs.best(Metric::Difference)];
  CHECK(best.theta == 0.1);
  CHECK(best.phi == 1.0);

  CHECK_THROWS_AS(scan_recombination(z, std::vector<double>{}, pg), std::invalid_argument);
}

TEST_CASE("optimize_theta finds the dense-scan minimum") {
  TwoModeParams p;
  p.n_a = p.n_b = 2e5;
  p.chi_aa = 0.03;
  p.chi_ab = 0.02;
  p.chi_bb = 0.01;
  p.tau_hold = 2e-3;
  p.phi = 1.67;
  const auto opt = optimize_theta(p, Metric::Na);
  double best = -1e9;
  for (int i = 0; i < 200000; ++i) {
    TwoModeParams q = p;
    q.theta = std::numbers::pi * i / 200000.0;
    best = std::max(best, evaluate(q).db_Na);
  }
  CHECK(opt.db >= best - 1e-6);
  CHECK(opt.db > 3.0);
}

TEST_CASE("fock oracle agrees with the closed form on randomized parameters") {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    TwoModeParams p;
    p.n_a = 1 + 11 * U(gen);
    p.n_b = 1 + 11 * U(gen);
    p.tau_hold = 1.0;
    p.chi_aa = 0.3 * U(gen);
    p.chi_ab = 0.3 * U(gen);
    p.chi_bb = 0.3 * U(gen);
    p.theta = 2 * std::numbers::pi * U(gen);
    p.phi = 2 * std::numbers::pi * U(gen);
    CAPTURE(i);
    check_close(fock_oracle(p, fock_cutoff_for(p)), evaluate(p), 1e-6);
  }
}
