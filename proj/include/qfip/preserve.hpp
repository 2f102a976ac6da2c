// Decision procedures for QFI preservation: the known-channel criterion, the
// testable conditions, the constructive Hermitian extension, and the
// Knill-Laflamme correctability check.
#pragma once

#include <random>
#include <vector>

#include "qfip/core.hpp"
#include "qfip/qfi.hpp"

namespace qfip {

struct PreservationReport {
  bool preserved;
  double max_residual;       // worst per-operator HS residual
  double reference_scale;    // max_j ||E_j L sqrt(rho)||_HS
};

// Preserved iff (L' E_j - E_j L) sqrt(rho) vanishes for every Kraus
// operator, relative to the scale ||E_j L sqrt(rho)||.  The residuals enter
// the loss identity squared, so their numerical floor is sqrt(eps * F)
// (~1e-7 for unit-scale problems); the default tolerance sits above that
// floor while staying far below the O(0.01..1) residuals of broken channels.
inline PreservationReport check_preservation_known_channel(
    const ParametricFamily& family, double theta, const KrausChannel& channel,
    double tol = 1e-6) {
  const DensityMatrix rho = evolve(family, theta);
  const Matrix drho = state_derivative(family, theta);
  const DensityMatrix nrho = apply_channel(channel, rho);
  const Matrix ndrho = apply_channel(channel, drho);
  const Matrix l = sld(rho, drho).sld.entries;
  const Matrix lc = sld(nrho, ndrho).sld.entries;
  const Matrix root = matrix_sqrt_psd(rho.entries);

  double worst = 0.0, scale = 0.0;
  for (const auto& e : channel.kraus_ops) {
    worst = std::max(worst, ((lc * e - e * l) * root).norm());
    scale = std::max(scale, ((e * l) * root).norm());
  }
  return {worst <= tol * std::max(scale, 1.0), worst, scale};
}

struct TestableReport {
  bool cond_i;
  bool cond_ii;
  double max_ci_violation;
  double max_cii_violation;
  bool preserved() const { return cond_i && cond_ii; }
};

namespace detail {

// Columns of S are the erroneous states, columns of D the erroneous
// SLD-mapped states. Condition (i) is Hermiticity of S^dag D; condition (ii)
// is null(S) contained in null(D), decided by SVD.
inline TestableReport testable_from_columns(const Matrix& s, const Matrix& d) {
  TestableReport rep{};
  const Matrix g = s.adjoint() * d;
  rep.max_ci_violation = (g - g.adjoint()).cwiseAbs().maxCoeff();
  rep.cond_i = rep.max_ci_violation <= 1e-9;

  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size()
                          ? svd.singularValues()(0)
                          : 0.0;
  const double rank_tol = 1e-10 * std::max(smax, 1.0);
  const double dscale = std::max(d.norm(), 1.0);
  rep.max_cii_violation = 0.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > rank_tol) continue;
    const double res = (d * svd.matrixV().col(i)).norm() / dscale;
    rep.max_cii_violation = std::max(rep.max_cii_violation, res);
  }
  for (Eigen::Index i = svd.singularValues().size(); i < s.cols(); ++i) {
    const double res = (d * svd.matrixV().col(i)).norm() / dscale;
    rep.max_cii_violation = std::max(rep.max_cii_violation, res);
  }
  rep.cond_ii = rep.max_cii_violation <= 1e-8;
  return rep;
}

}  // namespace detail

// Theorem-style testable conditions. A mixed probe is handled by running the
// check over every eigenvector of rho_theta with nonzero eigenvalue.
inline TestableReport check_testable_conditions(
    const ParametricFamily& family, double theta,
    const std::vector<Matrix>& errors) {
  const DensityMatrix rho = evolve(family, theta);
  const Matrix drho = state_derivative(family, theta);
  const Matrix l = sld(rho, drho).sld.entries;

  std::vector<Vector> range_vectors;
  if (family.is_pure()) {
    range_vectors.push_back(evolve_pure(family, theta));
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (es.eigenvalues()(i) > 1e-12)
        range_vectors.push_back(es.eigenvectors().col(i));
  }

  const Eigen::Index dim = rho.dim();
  const Eigen::Index cols =
      Eigen::Index(errors.size()) * Eigen::Index(range_vectors.size());
  Matrix s(dim, cols), d(dim, cols);
  Eigen::Index c = 0;
  for (const auto& e : errors)
    for (const auto& psi : range_vectors) {
      s.col(c) = e * psi;
      d.col(c) = e * (l * psi);
      ++c;
    }
  return detail::testable_from_columns(s, d);
}

// Unitary-family simplification: condition (i) through the anticommutator
// with Delta H, condition (ii) with H |psi> in place of L |psi>.
inline TestableReport check_testable_unitary(const PureState& probe,
                                             const HermitianObservable& h,
                                             const std::vector<Matrix>& errors) {
  const Vector& psi = probe.amplitudes;
  const Matrix& hm = h.entries;
  const double mean = cx(psi.adjoint() * (hm * psi)).real();
  const Matrix dh = hm - mean * identity(h.dim());

  TestableReport rep{};
  rep.max_ci_violation = 0.0;
  for (const auto& ej : errors)
    for (const auto& ek : errors) {
      const Matrix ee = ej.adjoint() * ek;
      const cx val = cx(psi.adjoint() * ((ee * dh + dh * ee) * psi));
      rep.max_ci_violation = std::max(rep.max_ci_violation, std::abs(val));
    }
  rep.cond_i = rep.max_ci_violation <= 1e-9;

  Matrix s(probe.dim(), Eigen::Index(errors.size()));
  Matrix d(probe.dim(), Eigen::Index(errors.size()));
  for (std::size_t j = 0; j < errors.size(); ++j) {
    s.col(Eigen::Index(j)) = errors[j] * psi;
    d.col(Eigen::Index(j)) = errors[j] * (hm * psi);
  }
  const TestableReport nullrep = detail::testable_from_columns(s, d);
  rep.cond_ii = nullrep.cond_ii;
  rep.max_cii_violation = nullrep.max_cii_violation;
  return rep;
}

enum class ExtensionFailure { none, condition_i, condition_ii };

struct ExtensionResult {
  bool success;
  ExtensionFailure failure;
  std::optional<HermitianObservable> q;
};

// Constructive Hermitian extension: finds Q with Q|s_j> = |d_j> whenever the
// Gram-style matrix <s_j|d_k> is Hermitian and null(S) is contained in
// null(D).
inline ExtensionResult hermitian_extension(const std::vector<Vector>& s_vectors,
                                           const std::vector<Vector>& d_vectors) {
  if (s_vectors.size() != d_vectors.size() || s_vectors.empty())
    throw std::invalid_argument("hermitian_extension: list size mismatch");
  const Eigen::Index dim = s_vectors.front().size();
  const Eigen::Index cols = Eigen::Index(s_vectors.size());
  Matrix s(dim, cols), d(dim, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (s_vectors[j].size() != dim || d_vectors[j].size() != dim)
      throw std::invalid_argument("hermitian_extension: vector size mismatch");
    s.col(j) = s_vectors[j];
    d.col(j) = d_vectors[j];
  }

  const TestableReport rep = detail::testable_from_columns(s, d);
  if (!rep.cond_i) return {false, ExtensionFailure::condition_i, std::nullopt};
  if (!rep.cond_ii) return {false, ExtensionFailure::condition_ii, std::nullopt};

  // Maximal linearly independent subset of the s vectors.
  Eigen::ColPivHouseholderQR<Matrix> qr(s);
  qr.setThreshold(1e-10);
  const Eigen::Index rank = qr.rank();
  Matrix sj(dim, rank), dj(dim, rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    const Eigen::Index col = qr.colsPermutation().indices()(i);
    sj.col(i) = s.col(col);
    dj.col(i) = d.col(col);
  }

  Matrix g = sj.adjoint() * dj;
  g = (g + Matrix(g.adjoint())) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(g);
  const Matrix st = sj * es.eigenvectors();
  const Matrix dt = dj * es.eigenvectors();
  const auto& c = es.eigenvalues();
  const double ctol =
      1e-10 * std::max(1.0, c.size() ? c.cwiseAbs().maxCoeff() : 0.0);

  // Dual basis <s~perp_j | s~_k> = delta_jk on the independent subset.
  const Matrix sperp = st * (st.adjoint() * st).inverse();

  Matrix q = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < rank; ++j) {
    if (std::abs(c(j)) > ctol) {
      q += (1.0 / c(j)) * dt.col(j) * dt.col(j).adjoint();
    } else {
      q += dt.col(j) * sperp.col(j).adjoint() +
           sperp.col(j) * dt.col(j).adjoint();
    }
  }
  q = (q + Matrix(q.adjoint())) / 2.0;
  return {true, ExtensionFailure::none, HermitianObservable(std::move(q))};
}

struct KnillLaflammeReport {
  bool correctable;
  double max_violation;
};

// <phi|E_j^dag E_k|phi'> = delta_{phi phi'} c_jk on the code basis.
inline KnillLaflammeReport knill_laflamme_check(
    const std::vector<PureState>& code_basis,
    const std::vector<Matrix>& errors, double tol = 1e-9) {
  if (code_basis.empty()) throw std::invalid_argument("empty code basis");
  for (std::size_t a = 0; a < code_basis.size(); ++a)
    for (std::size_t b = 0; b < code_basis.size(); ++b) {
      const cx ov = cx(code_basis[a].amplitudes.adjoint() *
                       code_basis[b].amplitudes);
      if (std::abs(ov - (a == b ? cx(1) : cx(0))) > 1e-10)
        throw std::invalid_argument("code basis is not orthonormal");
    }

  double worst = 0.0;
  for (const auto& ej : errors)
    for (const auto& ek : errors) {
      const Matrix ee = ej.adjoint() * ek;
      const cx diag0 = cx(code_basis[0].amplitudes.adjoint() *
                          (ee * code_basis[0].amplitudes));
      for (std::size_t a = 0; a < code_basis.size(); ++a)
        for (std::size_t b = 0; b < code_basis.size(); ++b) {
          const cx val = cx(code_basis[a].amplitudes.adjoint() *
                            (ee * code_basis[b].amplitudes));
          const cx want = (a == b) ? diag0 : cx(0);
          worst = std::max(worst, std::abs(val - want));
        }
    }
  return {worst <= tol, worst};
}

// Haar-ish random unitary from a QR of a seeded complex Ginibre matrix.
inline Matrix random_unitary(Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix ginibre(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j)
      ginibre(i, j) = cx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(ginibre);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i)
    q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

// K_i = sum_j u_ij E_j for a seeded random unitary u; same channel action.
inline KrausChannel random_kraus_recombination(const KrausChannel& channel,
                                               std::uint64_t seed) {
  const Eigen::Index j = Eigen::Index(channel.kraus_ops.size());
  const Matrix u = random_unitary(j, seed);
  std::vector<Matrix> out(static_cast<std::size_t>(j));
  for (Eigen::Index i = 0; i < j; ++i) {
    Matrix k = Matrix::Zero(channel.out_dim(), channel.in_dim());
    for (Eigen::Index l = 0; l < j; ++l)
      k += u(i, l) * channel.kraus_ops[std::size_t(l)];
    out[std::size_t(i)] = std::move(k);
  }
  return KrausChannel(std::move(out));
}

}  // namespace qfip
