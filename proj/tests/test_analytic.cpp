#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qfip/analytic.hpp"
#include "qfip/brute_force.hpp"
#include "test_util.hpp"

using namespace qfip;
using testutil::random_density;
using testutil::random_hermitian;

namespace {

// rates reproducing given flip probabilities at t = 1
double rate_for(double p) { return -std::log(1.0 - 2.0 * p); }

}  // namespace

TEST_CASE("binomial") {
  CHECK(binomial(5, 2) == 10.0);
  CHECK(binomial(40, 20) == Catch::Approx(137846528820.0).margin(0.5));
  CHECK(binomial(150, 75) ==
        Catch::Approx(std::exp(std::lgamma(151.0) - 2 * std::lgamma(76.0)))
            .epsilon(1e-12));
  CHECK(binomial(3, 5) == 0.0);
  CHECK(binomial(3, -1) == 0.0);
}

TEST_CASE("block_coefficients") {
  const auto clean = block_coefficients(3, 0, 0.0, 0.0);
  CHECK(clean.a_k == 1.0);
  CHECK(clean.x_k == 1.0);
  CHECK(clean.y_k == 1.0);
  CHECK(block_coefficients(3, 1, 0.0, 0.0).a_k == 0.0);

  CHECK(block_coefficients(5, 1, 0.2, 0.0).x_k == 1.0);

  const auto c = block_coefficients(3, 1, 0.1, 0.05);
  CHECK(c.a_k == Catch::Approx(0.09).margin(1e-15));
  CHECK(c.x_k == Catch::Approx(0.729).margin(1e-15));
  CHECK(c.y_k == Catch::Approx(0.5832).margin(1e-12));

  // sector-sum identity and contrast ordering
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_choices[3] = {3, 5, 9};
    const int N = n_choices[trial % 3];
    const double px = u(rng), pz = u(rng);
    double total = 0.0;
    for (int k = 0; k <= (N - 1) / 2; ++k) {
      const auto b = block_coefficients(N, k, px, pz);
      total += binomial(N, k) * b.a_k;
      CHECK(std::abs(b.y_k) <= std::abs(b.x_k) + 1e-15);
      CHECK(b.a_k >= 0.0);
      CHECK(b.a_k <= 1.0);
    }
    CHECK(total == Catch::Approx(1.0).margin(1e-12));
  }

  CHECK_THROWS(block_coefficients(4, 0, 0.1, 0.1));
  CHECK_THROWS(block_coefficients(3, 2, 0.1, 0.1));
}

TEST_CASE("two_level_qfi") {
  CHECK(two_level_qfi(Matrix(identity(2) / 2.0),
                      Matrix(0.5 * pauli_matrix('Z'))) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(two_level_qfi(Matrix(identity(2) / 2.0), Matrix(Matrix::Zero(2, 2))) ==
        0.0);

  // dual-route agreement on random mixed qubits
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const DensityMatrix rho = random_density(1, rng);
    const Matrix h = random_hermitian(2, rng);
    const Matrix drho = cx(0, -1) * (h * rho.entries - rho.entries * h);
    CHECK(two_level_qfi(rho.entries, drho) ==
          Catch::Approx(qfi(rho, drho)).margin(1e-9));
  }
}

TEST_CASE("ghz_qfi_exact limits") {
  // parallel dephasing only: F = exp(-2 N gamma_z t) N^2 t^2
  {
    const int N = 5;
    const double gz = 0.3, t = 1.0;
    const double pz = flip_probability(gz, t);
    const double want = std::exp(-2.0 * N * gz * t) * N * N * t * t;
    CHECK(ghz_qfi_exact(N, t, 0.1, 0.0, pz) ==
          Catch::Approx(want).epsilon(1e-12));
  }
  // transverse only: no loss at all
  for (int N : {3, 5, 15})
    for (double t : {0.5, 1.0, 2.0})
      CHECK(ghz_qfi_exact(N, t, 0.1, 0.3, 0.0) ==
            Catch::Approx(double(N) * N * t * t).epsilon(1e-12));

  CHECK_THROWS(ghz_qfi_exact(4, 1.0, 0.1, 0.1, 0.1));
}

TEST_CASE("ghz_qfi_exact vs dense oracle") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> uw(0.05, 1.0), ut(0.2, 2.0),
      up(0.01, 0.4);
  for (int N : {1, 3, 5}) {
    for (int trial = 0; trial < 4; ++trial) {
      const double w = uw(rng), t = ut(rng), px = up(rng), pz = up(rng);
      const DephasingScenario sc(N, 1, rate_for(px) / t, rate_for(pz) / t, w,
                                 t);
      const double dense = ghz_qfi_brute_force(sc, SchemeKind::raw);
      const double closed = ghz_qfi_exact(N, t, w, px, pz);
      CHECK(std::abs(closed - dense) / std::max(dense, 1e-12) < 1e-7);
    }
  }
}

TEST_CASE("ghz_qfi_exact shape properties") {
  // monotone nonincreasing in p_z; bounded by the noiseless value
  for (int N : {3, 5, 7}) {
    for (int i = 0; i < 20; ++i) {
      const double px = 0.49 * i / 19.0;
      double prev = std::numeric_limits<double>::infinity();
      for (int j = 0; j < 20; ++j) {
        const double pz = 0.49 * j / 19.0;
        const double f = ghz_qfi_exact(N, 1.0, 0.2, px, pz);
        CHECK(f <= prev + 1e-10);
        CHECK(f <= double(N) * N + 1e-12);
        if (pz == 0.0) CHECK(f == Catch::Approx(double(N) * N).margin(1e-12));
        prev = f;
      }
    }
  }

  // main-text assembly equals the sector-by-sector form
  const int N = 7;
  const double t = 1.3, w = 0.4, px = 0.12, pz = 0.07;
  double assembled = 0.0;
  for (int k = 0; k <= (N - 1) / 2; ++k) {
    const auto c = block_coefficients(N, k, px, pz);
    const double num = (1.0 - c.x_k * c.x_k) * (1.0 - c.y_k * c.y_k);
    const double den = 2.0 - c.x_k * c.x_k - c.y_k * c.y_k +
                       (c.y_k * c.y_k - c.x_k * c.x_k) *
                           std::cos(2.0 * N * w * t);
    assembled += binomial(N, k) * c.a_k * double(N) * N * t * t *
                 (1.0 - (num < 1e-14 ? 0.0 : 2.0 * num / den));
  }
  CHECK(ghz_qfi_exact(N, t, w, px, pz) ==
        Catch::Approx(assembled).margin(1e-12));
}

TEST_CASE("logical_ghz_qfi_exact") {
  // block size one is the raw formula
  const DephasingScenario raw(5, 1, 0.2, 0.3, 0.4, 1.0);
  CHECK(logical_ghz_qfi_exact(raw) ==
        Catch::Approx(ghz_qfi_exact(5, 1.0, 0.4, raw.p_x(), raw.p_z()))
            .margin(1e-12));

  // N=9, n=3 against the dense 512-dim construction
  const DephasingScenario sc(9, 3, 0.15, 0.25, 0.3, 1.0);
  const double dense = ghz_qfi_brute_force(sc, SchemeKind::logical);
  CHECK(std::abs(logical_ghz_qfi_exact(sc) - dense) /
            std::max(dense, 1e-12) < 1e-6);

  // figure-3 operating point: blocking helps
  const DephasingScenario one(15, 1, 0.001, 0.5, 0.001, 1.0);
  const DephasingScenario five(15, 5, 0.001, 0.5, 0.001, 1.0);
  CHECK(crb(logical_ghz_qfi_exact(five), 1) <
        crb(logical_ghz_qfi_exact(one), 1));

  // even block count has no closed form
  const DephasingScenario even(6, 3, 0.1, 0.1, 0.1, 1.0);
  CHECK_THROWS_AS(logical_ghz_qfi_exact(even), std::invalid_argument);
}

TEST_CASE("crb") {
  CHECK(crb(1.0, 1) == 1.0);
  CHECK(crb(4.0, 100) == Catch::Approx(0.05).margin(1e-15));
  const double f = 25.0 * 1.21;  // N=5, t=1.1
  CHECK(crb(f, 1) == Catch::Approx(1.0 / (5.0 * 1.1)).margin(1e-15));
  CHECK_THROWS_AS(crb(0.0, 1), std::domain_error);
  CHECK_THROWS_AS(crb(1.0, 0), std::invalid_argument);
}
