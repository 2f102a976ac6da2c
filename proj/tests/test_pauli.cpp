#include <catch2/catch_amalgamated.hpp>

#include "qfip/noise.hpp"
#include "qfip/pauli.hpp"
#include "qfip/preserve.hpp"
#include "qfip/qfi.hpp"

using namespace qfip;

namespace {

// every phase-0 operator on n qubits, enumerated by (x, z) bit masks
std::vector<PauliOperator> all_paulis(int n) {
  std::vector<PauliOperator> out;
  for (std::uint64_t x = 0; x < (std::uint64_t(1) << n); ++x)
    for (std::uint64_t z = 0; z < (std::uint64_t(1) << n); ++z) {
      PauliOperator p = PauliOperator::identity(n);
      for (int i = 0; i < n; ++i) {
        p.x_bits[std::size_t(i)] = (x >> i) & 1;
        p.z_bits[std::size_t(i)] = (z >> i) & 1;
      }
      out.push_back(std::move(p));
    }
  return out;
}

}  // namespace

TEST_CASE("pauli_multiply") {
  const PauliOperator x = PauliOperator::single('X', 0, 1);
  const PauliOperator z = PauliOperator::single('Z', 0, 1);
  const PauliOperator y = PauliOperator::single('Y', 0, 1);

  // X Z = -i Y
  const PauliOperator xz = pauli_multiply(x, z);
  CHECK((xz.dense() + cx(0, 1) * y.dense()).norm() < 1e-14);

  // Hermitian Paulis square to the identity
  for (const auto& p : {x, z, y})
    CHECK((pauli_multiply(p, p).dense() - identity(2)).norm() < 1e-14);

  // phase bookkeeping against the dense product at n = 3
  const PauliOperator a = PauliOperator::parse("iYXX");  // Z1 X1 X2 X3
  const PauliOperator b = PauliOperator::parse("IXX");
  const PauliOperator ab = pauli_multiply(a, b);
  CHECK((ab.dense() - Matrix(a.dense() * b.dense())).norm() < 1e-13);
}

TEST_CASE("pauli_multiply exhaustive dense oracle at two qubits") {
  const auto ops = all_paulis(2);
  for (const auto& a : ops)
    for (const auto& b : ops) {
      const Matrix want = a.dense() * b.dense();
      CHECK((pauli_multiply(a, b).dense() - want).norm() < 1e-13);
    }
  // spot-check associativity with phases at three qubits
  const PauliOperator p = PauliOperator::parse("YZX");
  const PauliOperator q = PauliOperator::parse("-iXXI");
  const PauliOperator r = PauliOperator::parse("ZYZ");
  CHECK(pauli_multiply(pauli_multiply(p, q), r) ==
        pauli_multiply(p, pauli_multiply(q, r)));
}

TEST_CASE("pauli_commutes") {
  const PauliOperator x = PauliOperator::single('X', 0, 1);
  const PauliOperator z = PauliOperator::single('Z', 0, 1);
  CHECK_FALSE(pauli_commutes(x, z));
  CHECK(pauli_commutes(PauliOperator::parse("XXI"),
                       PauliOperator::parse("ZZI")));
  CHECK_FALSE(pauli_commutes(PauliOperator::parse("XXX"),
                             PauliOperator::parse("ZZZ")));

  // exhaustive agreement with the dense commutator at two qubits
  for (const auto& a : all_paulis(2))
    for (const auto& b : all_paulis(2)) {
      const Matrix comm = a.dense() * b.dense() - b.dense() * a.dense();
      CHECK(pauli_commutes(a, b) == (comm.cwiseAbs().maxCoeff() < 1e-12));
    }
}

TEST_CASE("pauli text format") {
  for (const char* text : {"XYZ", "-iYXX", "IZI", "-ZZ", "iY", "X"}) {
    const PauliOperator p = PauliOperator::parse(text);
    CHECK(p.str() == text);
    CHECK((PauliOperator::parse(p.str()).dense() - p.dense()).norm() < 1e-14);
  }
  CHECK_THROWS_AS(PauliOperator::parse("XQZ"), std::invalid_argument);
  CHECK_THROWS_AS(PauliOperator::parse(""), std::invalid_argument);
}

TEST_CASE("phase_flip_code") {
  const StabilizerCode one = phase_flip_code(1);
  CHECK(one.generators.empty());
  CHECK((one.logical_z.dense() - pauli_matrix('Z')).norm() < 1e-14);
  CHECK((one.logical_x.dense() - pauli_matrix('X')).norm() < 1e-14);

  const StabilizerCode three = phase_flip_code(3);
  REQUIRE(three.generators.size() == 2);
  CHECK(three.generators[0].str() == "XXI");
  CHECK(three.generators[1].str() == "IXX");
  CHECK(std::abs(three.projector().trace().real() - 2.0) < 1e-10);

  // codewords match (|+>^n +/- |->^n)/sqrt(2)
  for (int n : {1, 3, 5}) {
    const auto words = phase_flip_code(n).codewords();
    Vector plus = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
    Vector minus = (Vector(2) << 1, -1).finished() / std::sqrt(2.0);
    Vector ap = Vector::Ones(1), am = Vector::Ones(1);
    for (int i = 0; i < n; ++i) {
      ap = tensor_product(ap, plus);
      am = tensor_product(am, minus);
    }
    const Vector zero = (ap + am) / std::sqrt(2.0);
    const Vector oneb = (ap - am) / std::sqrt(2.0);
    CHECK(equal_up_to_phase(words[0].amplitudes, zero));
    CHECK(equal_up_to_phase(words[1].amplitudes, oneb));
  }

  // weight-2 phase flips are correctable by the five-qubit code
  const auto words5 = phase_flip_code(5).codewords();
  std::vector<Matrix> z2;
  for (const auto& p : z_errors_up_to_weight(5, 2)) z2.push_back(p.dense());
  CHECK(knill_laflamme_check(words5, z2).correctable);

  CHECK_THROWS_AS(phase_flip_code(4), std::invalid_argument);
  CHECK_THROWS_AS(phase_flip_code(0), std::invalid_argument);
}

TEST_CASE("is_detectable") {
  const StabilizerCode code = phase_flip_code(3);
  CHECK(is_detectable(PauliOperator::parse("ZII"), code));
  CHECK_FALSE(is_detectable(PauliOperator::parse("XII"), code));
  CHECK(is_detectable(PauliOperator::parse("ZZI"), code));
}

TEST_CASE("immune_error_set") {
  const StabilizerCode code = phase_flip_code(3);
  const auto set =
      immune_error_set(code, z_errors_up_to_weight(3, 1), code.logical_x);
  REQUIRE(set.size() == 8);
  std::vector<std::string> names;
  for (const auto& p : set) names.push_back(p.str());
  // Z_a Xbar picks up a Y (with phase) on the overlapping site
  const std::vector<std::string> want = {"III",  "ZII",  "IZI",  "IIZ",
                                         "XXX", "iYXX", "iXYX", "iXXY"};
  for (const auto& w : want)
    CHECK(std::find(names.begin(), names.end(), w) != names.end());

  // t = 0: only the identity and the logical X
  const auto tiny =
      immune_error_set(code, z_errors_up_to_weight(3, 0), code.logical_x);
  REQUIRE(tiny.size() == 2);
  CHECK(tiny[0].str() == "III");
  CHECK(tiny[1].str() == "XXX");

  // n = 5, t = 2: all 32 immune errors pass the unitary testable conditions
  const StabilizerCode five = phase_flip_code(5);
  const auto big =
      immune_error_set(five, z_errors_up_to_weight(5, 2), five.logical_x);
  REQUIRE(big.size() == 32);
  // probe at a generic accumulated phase (at the fringe extremum the
  // logical-flip branches collide and the joint conditions fail)
  Vector plus = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
  Vector probe = Vector::Ones(1);
  for (int i = 0; i < 5; ++i) probe = tensor_product(probe, plus);
  const HermitianObservable h(Matrix(five.logical_z.dense()));
  const ParametricFamily fam(PureState(std::move(probe)), h);
  std::vector<Matrix> dense;
  for (const auto& p : big) dense.push_back(p.dense());
  CHECK(check_testable_unitary(PureState(evolve_pure(fam, 0.3)), h, dense)
            .preserved());
}

TEST_CASE("optimal_measurement_povm") {
  const Povm one = optimal_measurement_povm(phase_flip_code(1),
                                            PauliOperator::single('X', 0, 1));
  REQUIRE(one.elements.size() == 2);
  Vector plus = (Vector(2) << 1, 1).finished() / std::sqrt(2.0);
  CHECK((one.elements[0] - Matrix(plus * plus.adjoint())).norm() < 1e-12);

  const StabilizerCode code = phase_flip_code(3);
  const Povm three = optimal_measurement_povm(code, code.logical_x);
  REQUIRE(three.elements.size() == 8);
  for (const auto& m : three.elements) {
    CHECK(std::abs(m.trace().real() - 1.0) < 1e-10);  // rank one
    // diagonal in the X basis: commutes with every X_i
    for (int i = 0; i < 3; ++i) {
      const Matrix xi = embed_pauli('X', i, 3);
      CHECK((m * xi - xi * m).cwiseAbs().maxCoeff() < 1e-10);
    }
  }

  // the measurement extracts the full preserved QFI from the noisy state
  Vector probe = Vector::Ones(1);
  for (int i = 0; i < 3; ++i) probe = tensor_product(probe, plus);
  const ParametricFamily fam(
      PureState(std::move(probe)),
      HermitianObservable(Matrix(code.logical_z.dense())));
  std::vector<Matrix> kraus = {std::sqrt(0.55) * identity(8)};
  const double w[3] = {0.2, 0.15, 0.1};
  for (int i = 0; i < 3; ++i)
    kraus.push_back(std::sqrt(w[i]) * embed_pauli('Z', i, 3));
  const KrausChannel channel(std::move(kraus));
  const double preserved = qfi_pure(fam, 0.3);
  CHECK(classical_fisher(three, fam, 0.3, &channel) ==
        Catch::Approx(preserved).margin(1e-8));
}

TEST_CASE("code-space structure") {
  const StabilizerCode code = phase_flip_code(3);
  const Matrix p = code.projector();
  const Matrix zl = code.logical_z.dense();
  CHECK((p * zl - zl * p).cwiseAbs().maxCoeff() < 1e-12);

  const auto words = code.codewords();
  CHECK(cx(words[0].amplitudes.adjoint() * (zl * words[0].amplitudes)).real() ==
        Catch::Approx(1.0).margin(1e-10));
  CHECK(cx(words[1].amplitudes.adjoint() * (zl * words[1].amplitudes)).real() ==
        Catch::Approx(-1.0).margin(1e-10));
}

TEST_CASE("stabilizer code validation") {
  // anticommuting generators are rejected
  CHECK_THROWS_AS(
      StabilizerCode({PauliOperator::parse("XI"), PauliOperator::parse("ZI")},
                     PauliOperator::parse("IX"), PauliOperator::parse("IZ"), 2),
      std::invalid_argument);
  // redundant generators are rejected
  CHECK_THROWS_AS(
      StabilizerCode({PauliOperator::parse("XX"), PauliOperator::parse("XX")},
                     PauliOperator::parse("XI"), PauliOperator::parse("ZZ"), 2),
      std::invalid_argument);
}
