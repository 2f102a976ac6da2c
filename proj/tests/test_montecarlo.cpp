#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "qfip/montecarlo.hpp"
#include "qfip/noise.hpp"
#include "qfip/pauli.hpp"

using namespace qfip;

namespace {

ParametricFamily single_qubit_family() {
  Vector plus = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
  return ParametricFamily(PureState(std::move(plus)),
                          HermitianObservable(0.5 * pauli_matrix('Z')));
}

Povm sld_basis_povm(const ParametricFamily& family, double theta) {
  const Matrix l =
      sld(evolve(family, theta), state_derivative(family, theta)).sld.entries;
  Eigen::SelfAdjointEigenSolver<Matrix> es(l);
  std::vector<Matrix> proj;
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    proj.push_back(es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint());
  return Povm(std::move(proj));
}

struct Theorem3Setup {
  ParametricFamily family;
  Povm povm;
  KrausChannel channel;
};

Theorem3Setup theorem3_setup(double z_mix) {
  Vector plus = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
  Vector probe = Vector::Ones(1);
  for (int i = 0; i < 3; ++i) probe = tensor_product(probe, plus);
  const StabilizerCode code = phase_flip_code(3);
  ParametricFamily family(
      PureState(std::move(probe)),
      HermitianObservable(Matrix(code.logical_z.dense())));
  Povm povm = optimal_measurement_povm(code, code.logical_x);
  std::vector<Matrix> kraus = {std::sqrt(1.0 - 3.0 * z_mix) * identity(8)};
  for (int i = 0; i < 3; ++i)
    kraus.push_back(std::sqrt(z_mix) * embed_pauli('Z', i, 3));
  return {std::move(family), std::move(povm), KrausChannel(std::move(kraus))};
}

}  // namespace

TEST_CASE("sample_outcomes") {
  // deterministic outcome
  const Povm sure({Matrix(basis_state(1, 0) * basis_state(1, 0).adjoint()),
                   Matrix(basis_state(1, 1) * basis_state(1, 1).adjoint())});
  const DensityMatrix ground(
      Matrix(basis_state(1, 0) * basis_state(1, 0).adjoint()));
  for (int x : sample_outcomes(sure, ground, 200, 7)) CHECK(x == 0);

  // |+> in the Z basis: binomial(1/2)
  Vector plus = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
  const DensityMatrix rho(Matrix(plus * plus.adjoint()));
  const auto draws = sample_outcomes(sure, rho, 100000, 42);
  int zeros = 0;
  for (int x : draws) zeros += (x == 0);
  const double sigma = std::sqrt(100000 * 0.25);
  CHECK(std::abs(zeros - 50000.0) < 3.0 * sigma);

  // reproducibility
  CHECK(sample_outcomes(sure, rho, 1000, 5) ==
        sample_outcomes(sure, rho, 1000, 5));

  // goodness of fit on the noisy theorem-3 state in the X basis
  const Theorem3Setup setup = theorem3_setup(0.1);
  Matrix noisy =
      apply_channel(setup.channel, evolve(setup.family, 0.3).entries);
  const DensityMatrix state((noisy + Matrix(noisy.adjoint())) / 2.0);
  const int nu = 50000;
  const auto xs = sample_outcomes(setup.povm, state, nu, 99);
  std::vector<double> counts(setup.povm.elements.size(), 0.0);
  for (int x : xs) counts[std::size_t(x)] += 1.0;
  double chi2 = 0.0;
  int dof = -1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double p =
        (setup.povm.elements[i] * state.entries).trace().real();
    if (p < 1e-12) continue;
    chi2 += std::pow(counts[i] - nu * p, 2) / (nu * p);
    ++dof;
  }
  // 1% critical value for chi-squared with 7 degrees of freedom
  REQUIRE(dof == 7);
  CHECK(chi2 < 18.48);
}

TEST_CASE("mle_estimate") {
  const ProbabilityModel cosine = [](double theta) {
    Eigen::VectorXd p(2);
    p << std::cos(theta) * std::cos(theta), std::sin(theta) * std::sin(theta);
    return p;
  };
  const std::vector<int> zeros(500, 0);
  CHECK(mle_estimate(zeros, cosine, 0.0, M_PI / 2.0) < 1e-4);

  // symmetric likelihood with balanced counts peaks at the midpoint
  const ProbabilityModel tilt = [](double theta) {
    Eigen::VectorXd p(2);
    p << (1.0 + std::sin(theta)) / 2.0, (1.0 - std::sin(theta)) / 2.0;
    return p;
  };
  std::vector<int> balanced;
  for (int i = 0; i < 200; ++i) balanced.push_back(i % 2);
  CHECK(std::abs(mle_estimate(balanced, tilt, -0.7, 0.7)) < 1e-6);

  // statistical consistency at theta = 0.3 on the three-qubit scheme
  const Theorem3Setup setup = theorem3_setup(0.08);
  const double theta = 0.3;
  Matrix noisy =
      apply_channel(setup.channel, evolve(setup.family, theta).entries);
  const DensityMatrix state((noisy + Matrix(noisy.adjoint())) / 2.0);
  const auto outcomes = sample_outcomes(setup.povm, state, 10000, 12345);
  const ProbabilityModel model =
      povm_model(setup.povm, setup.family, &setup.channel);
  const double est = mle_estimate(outcomes, model, theta - 0.4, theta + 0.4);
  const double fisher =
      classical_fisher(setup.povm, setup.family, theta, &setup.channel);
  const double se = 1.0 / std::sqrt(10000.0 * fisher);
  CHECK(std::abs(est - theta) < 5.0 * se);

  // flat likelihood is rejected
  const ProbabilityModel flat = [](double) {
    Eigen::VectorXd p(2);
    p << 0.5, 0.5;
    return p;
  };
  CHECK_THROWS_AS(mle_estimate(balanced, flat, -0.5, 0.5),
                  std::domain_error);
}

TEST_CASE("crb_attainment_report") {
  const ParametricFamily family = single_qubit_family();
  const double theta = 0.4;
  const Povm povm = sld_basis_povm(family, theta);
  const AttainmentReport rep = crb_attainment_report(
      family, povm, nullptr, theta, M_PI / 2.0, 10000, 200, 2024);
  CHECK(rep.ratio > 0.9);
  CHECK(rep.ratio < 1.15);
  CHECK(rep.empirical_std >= (1.0 - 4.0 / std::sqrt(200.0)) * rep.crb);
  CHECK(std::abs(rep.empirical_bias) <
        3.0 * rep.empirical_std / std::sqrt(200.0));

  // bit-reproducible
  const AttainmentReport again = crb_attainment_report(
      family, povm, nullptr, theta, M_PI / 2.0, 10000, 200, 2024);
  CHECK(rep.empirical_std == again.empirical_std);
  CHECK(rep.empirical_bias == again.empirical_bias);

  // non-asymptotic regime still reports the bound direction
  const AttainmentReport coarse = crb_attainment_report(
      family, povm, nullptr, theta, M_PI / 2.0, 10, 100, 7);
  CHECK(coarse.crb > 0.0);
  CHECK(coarse.empirical_std >= 0.0);

  CHECK_THROWS(crb_attainment_report(family, povm, nullptr, theta, 1.0,
                                     10000, 0, 1));
}

TEST_CASE("crb attainment for the protected three-qubit scheme") {
  // the X-basis fringes are even in theta, so the search window must stay
  // inside one monotonic branch (0, pi/2) to keep the model identifiable
  const Theorem3Setup setup = theorem3_setup(0.1);
  const AttainmentReport rep =
      crb_attainment_report(setup.family, setup.povm, &setup.channel, 0.3,
                            0.25, 10000, 100, 31337);
  CHECK(rep.ratio > 0.9);
  CHECK(rep.ratio < 1.15);
}
