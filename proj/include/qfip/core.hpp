// Dense complex-matrix substrate: states, observables, channels, tensor
// composition, and parametric-family evaluation.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qfip {

using cx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Dense representation ceiling (2^12 = 4096 amplitudes).
inline constexpr int kDenseQubitCap = 12;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

namespace detail {

inline int qubit_count_for_dim(Eigen::Index dim) {
  int n = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d <<= 1;
    ++n;
  }
  if (d != dim)
    throw std::invalid_argument("dimension is not a power of two");
  return n;
}

inline double herm_deviation(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace detail

inline Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

inline const Matrix& pauli_matrix(char label) {
  static const Matrix X = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  static const Matrix Y = (Matrix(2, 2) << 0, cx(0, -1), cx(0, 1), 0).finished();
  static const Matrix Z = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  switch (label) {
    case 'X': return X;
    case 'Y': return Y;
    case 'Z': return Z;
  }
  throw std::invalid_argument("pauli label must be X, Y or Z");
}

inline Matrix tensor_product(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vector tensor_product(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

// Pauli on `site`, identity elsewhere. Site 0 is the leftmost tensor factor.
inline Matrix embed_pauli(char label, int site, int n) {
  if (site < 0 || site >= n)
    throw std::out_of_range("embed_pauli: site out of range");
  Matrix out = Matrix::Identity(1, 1);
  for (int i = 0; i < n; ++i)
    out = tensor_product(out, i == site ? pauli_matrix(label) : identity(2));
  return out;
}

struct PureState {
  Vector amplitudes;
  int n_qubits;

  explicit PureState(Vector amps) : amplitudes(std::move(amps)) {
    n_qubits = detail::qubit_count_for_dim(amplitudes.size());
    if (std::abs(amplitudes.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("pure state is not normalized");
  }

  Eigen::Index dim() const { return amplitudes.size(); }
  Matrix density() const { return amplitudes * amplitudes.adjoint(); }
};

// Phases are unphysical; compare through the overlap modulus.
inline bool equal_up_to_phase(const Vector& a, const Vector& b,
                              double tol = 1e-10) {
  return std::abs(std::abs(cx(a.adjoint() * b)) - 1.0) <= tol;
}

struct DensityMatrix {
  Matrix entries;
  int n_qubits;

  explicit DensityMatrix(Matrix m) : entries(std::move(m)) {
    if (entries.rows() != entries.cols())
      throw std::invalid_argument("density matrix must be square");
    n_qubits = detail::qubit_count_for_dim(entries.rows());
    if (detail::herm_deviation(entries) > kHermTol)
      throw std::invalid_argument("density matrix is not Hermitian");
    if (std::abs(entries.trace().real() - 1.0) > kTraceTol ||
        std::abs(entries.trace().imag()) > kTraceTol)
      throw std::invalid_argument("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(entries,
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
      throw std::invalid_argument("density matrix has negative eigenvalues");
  }

  Eigen::Index dim() const { return entries.rows(); }
};

struct HermitianObservable {
  Matrix entries;

  explicit HermitianObservable(Matrix m) : entries(std::move(m)) {
    if (entries.rows() != entries.cols())
      throw std::invalid_argument("observable must be square");
    if (detail::herm_deviation(entries) > kHermTol)
      throw std::invalid_argument("observable is not Hermitian");
  }

  Eigen::Index dim() const { return entries.rows(); }
};

struct KrausChannel {
  std::vector<Matrix> kraus_ops;

  explicit KrausChannel(std::vector<Matrix> ops, bool trace_preserving = true)
      : kraus_ops(std::move(ops)) {
    if (kraus_ops.empty())
      throw std::invalid_argument("channel needs at least one Kraus operator");
    for (const auto& e : kraus_ops)
      if (e.rows() != kraus_ops.front().rows() ||
          e.cols() != kraus_ops.front().cols())
        throw std::invalid_argument("Kraus operators differ in shape");
    if (trace_preserving) {
      Matrix sum = Matrix::Zero(in_dim(), in_dim());
      for (const auto& e : kraus_ops) sum += e.adjoint() * e;
      if ((sum - identity(in_dim())).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("channel is not trace-preserving");
    }
  }

  Eigen::Index in_dim() const { return kraus_ops.front().cols(); }
  Eigen::Index out_dim() const { return kraus_ops.front().rows(); }

  static KrausChannel identity_channel(Eigen::Index dim) {
    return KrausChannel({qfip::identity(dim)});
  }
};

inline Matrix apply_channel(const KrausChannel& channel, const Matrix& rho) {
  if (rho.rows() != channel.in_dim() || rho.cols() != channel.in_dim())
    throw std::invalid_argument("apply_channel: dimension mismatch");
  Matrix out = Matrix::Zero(channel.out_dim(), channel.out_dim());
  for (const auto& e : channel.kraus_ops) out += e * rho * e.adjoint();
  return out;
}

inline DensityMatrix apply_channel(const KrausChannel& channel,
                                   const DensityMatrix& rho) {
  return DensityMatrix(apply_channel(channel, rho.entries));
}

struct Povm {
  std::vector<Matrix> elements;

  explicit Povm(std::vector<Matrix> els) : elements(std::move(els)) {
    if (elements.empty()) throw std::invalid_argument("empty POVM");
    const Eigen::Index d = elements.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& m : elements) {
      if (m.rows() != d || m.cols() != d)
        throw std::invalid_argument("POVM elements differ in dimension");
      Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("POVM element is not PSD");
      sum += m;
    }
    if ((sum - identity(d)).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("POVM does not resolve the identity");
  }

  Eigen::Index dim() const { return elements.front().rows(); }
};

// Probe state (pure or mixed) plus the Hermitian generator G of
// rho_theta = exp(-i theta G) rho exp(i theta G).
struct ParametricFamily {
  std::optional<PureState> pure_probe;
  DensityMatrix probe;
  HermitianObservable generator;

  ParametricFamily(PureState psi, HermitianObservable g)
      : pure_probe(psi), probe(psi.density()), generator(std::move(g)) {
    if (probe.dim() != generator.dim())
      throw std::invalid_argument("probe and generator dimensions differ");
  }

  ParametricFamily(DensityMatrix rho, HermitianObservable g)
      : probe(std::move(rho)), generator(std::move(g)) {
    if (probe.dim() != generator.dim())
      throw std::invalid_argument("probe and generator dimensions differ");
  }

  Eigen::Index dim() const { return probe.dim(); }
  bool is_pure() const { return pure_probe.has_value(); }
};

// exp(-i theta G) through the Hermitian eigendecomposition; exact for
// Hermitian generators, no series truncation.
inline Matrix evolution_unitary(const HermitianObservable& g, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(g.entries);
  Vector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(cx(0, -theta * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

inline Vector evolve_pure(const ParametricFamily& family, double theta) {
  if (!family.is_pure())
    throw std::invalid_argument("evolve_pure needs a pure probe");
  return evolution_unitary(family.generator, theta) *
         family.pure_probe->amplitudes;
}

inline DensityMatrix evolve(const ParametricFamily& family, double theta) {
  const Matrix u = evolution_unitary(family.generator, theta);
  Matrix rho = u * family.probe.entries * u.adjoint();
  rho = (rho + Matrix(rho.adjoint())) / 2.0;  // scrub roundoff
  return DensityMatrix(std::move(rho));
}

using SuperOperator = std::function<Matrix(const Matrix&)>;

inline SuperOperator channel_superoperator(KrausChannel channel) {
  return [channel = std::move(channel)](const Matrix& rho) {
    return apply_channel(channel, rho);
  };
}

// rho -> -i[H, rho]
inline SuperOperator commutator_generator(Matrix h) {
  return [h = std::move(h)](const Matrix& rho) {
    return cx(0, -1) * (h * rho - rho * h);
  };
}

// rho -> rate * (L rho L^dag - {L^dag L, rho}/2)
inline SuperOperator lindblad_dissipator(Matrix l, double rate) {
  return [l = std::move(l), rate](const Matrix& rho) {
    const Matrix ll = l.adjoint() * l;
    return rate * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
  };
}

// Tests a.b = b.a on every matrix-unit basis element.
inline bool superoperators_commute(const SuperOperator& a,
                                   const SuperOperator& b, Eigen::Index dim,
                                   double tol = 1e-10) {
  Matrix unit = Matrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index s = 0; s < dim; ++s) {
      unit(r, s) = 1.0;
      const Matrix ab = a(b(unit));
      const Matrix ba = b(a(unit));
      unit(r, s) = 0.0;
      if ((ab - ba).cwiseAbs().maxCoeff() > tol) return false;
    }
  return true;
}

// PSD square root; small negative eigenvalues are clamped to zero.
inline Matrix matrix_sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector roots(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < roots.size(); ++i)
    roots(i) = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}

inline double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline Vector basis_state(int n_qubits, Eigen::Index index) {
  Vector v = Vector::Zero(Eigen::Index(1) << n_qubits);
  v(index) = 1.0;
  return v;
}

}  // namespace qfip
