// SLD operators, quantum and classical Fisher information, QFI loss, and the
// Ozawa measurement-error functional.
#pragma once

#include <cmath>
#include <stdexcept>

#include "qfip/core.hpp"

namespace qfip {

struct SldResult {
  HermitianObservable sld;
  int support_dimension;
  double eigen_cutoff_used;
};

// d rho_theta / d theta = -i [G, rho_theta], optionally pushed through a
// theta-independent channel.
inline Matrix state_derivative(const ParametricFamily& family, double theta,
                               const KrausChannel* channel = nullptr) {
  const Matrix rho = evolve(family, theta).entries;
  const Matrix& g = family.generator.entries;
  Matrix drho = cx(0, -1) * (g * rho - rho * g);
  if (channel) drho = apply_channel(*channel, drho);
  drho = (drho + Matrix(drho.adjoint())) / 2.0;
  return drho;
}

// L = sum_{p_i + p_j > cutoff} 2 <i|drho|j> / (p_i + p_j) |i><j| in the
// eigenbasis of rho. Throws if drho carries weight between two
// zero-eigenvalue subspaces (family not differentiable in the SLD sense).
inline SldResult sld(const DensityMatrix& rho, const Matrix& drho) {
  if (drho.rows() != rho.dim() || drho.cols() != rho.dim())
    throw std::invalid_argument("sld: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries);
  const auto& p = es.eigenvalues();
  const Matrix& u = es.eigenvectors();
  const double cutoff = 1e-12 * rho.entries.trace().real();
  const Matrix d = u.adjoint() * drho * u;

  Matrix l = Matrix::Zero(rho.dim(), rho.dim());
  int support = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > cutoff) ++support;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
      const double denom = std::max(p(i), 0.0) + std::max(p(j), 0.0);
      if (denom > cutoff) {
        l(i, j) = 2.0 * d(i, j) / denom;
      } else if (std::abs(d(i, j)) > 1e-9) {
        throw std::domain_error(
            "sld: derivative connects zero-eigenvalue subspaces");
      }
    }
  }
  Matrix dense = u * l * u.adjoint();
  dense = (dense + Matrix(dense.adjoint())) / 2.0;
  return {HermitianObservable(std::move(dense)), support, cutoff};
}

inline double qfi(const DensityMatrix& rho, const Matrix& drho) {
  const Matrix l = sld(rho, drho).sld.entries;
  return (rho.entries * l * l).trace().real();
}

// |D_theta psi> = (1 - |psi><psi|) d/dtheta |psi_theta> = -i (G - <G>) |psi>.
inline Vector covariant_derivative(const ParametricFamily& family,
                                   double theta) {
  if (!family.is_pure())
    throw std::invalid_argument("covariant_derivative needs a pure probe");
  const Vector psi = evolve_pure(family, theta);
  const Vector dpsi = cx(0, -1) * (family.generator.entries * psi);
  return dpsi - psi * cx(psi.adjoint() * dpsi);
}

// 4 Var_psi(G); theta-independent for unitary families.
inline double qfi_pure(const ParametricFamily& family, double theta) {
  if (!family.is_pure())
    throw std::invalid_argument("qfi_pure needs a pure probe");
  const Vector psi = evolve_pure(family, theta);
  const Matrix& g = family.generator.entries;
  const double g2 = cx(psi.adjoint() * (g * (g * psi))).real();
  const double g1 = cx(psi.adjoint() * (g * psi)).real();
  return 4.0 * (g2 - g1 * g1);
}

// Probability floor below which an outcome with a live derivative is a
// genuinely singular measurement choice.
inline constexpr double kProbabilityFloor = 1e-14;

inline double classical_fisher(const Povm& povm,
                               const ParametricFamily& family, double theta,
                               const KrausChannel* channel = nullptr) {
  Matrix rho = evolve(family, theta).entries;
  Matrix drho = state_derivative(family, theta);
  if (channel) {
    rho = apply_channel(*channel, rho);
    drho = apply_channel(*channel, drho);
  }
  double fisher = 0.0;
  for (const auto& m : povm.elements) {
    const double p = (m * rho).trace().real();
    const double dp = (m * drho).trace().real();
    if (p > kProbabilityFloor) {
      fisher += dp * dp / p;
    } else if (std::abs(dp) > 1e-9) {
      throw std::domain_error("classical_fisher: singular outcome");
    }
  }
  return fisher;
}

// Both sides of the QFI-loss identity: the direct difference
// F(rho) - F(N(rho)) and the Kraus-residual sum
// sum_j ||(L' E_j - E_j L) sqrt(rho)||_HS^2. They agree within numerics,
// and tests assert it.
struct QfiLossResult {
  double direct;
  double kraus_sum;
};

inline QfiLossResult qfi_loss(const ParametricFamily& family, double theta,
                              const KrausChannel& channel) {
  const DensityMatrix rho = evolve(family, theta);
  const Matrix drho = state_derivative(family, theta);
  const DensityMatrix nrho = apply_channel(channel, rho);
  const Matrix ndrho = apply_channel(channel, drho);

  const Matrix l = sld(rho, drho).sld.entries;
  const Matrix lc = sld(nrho, ndrho).sld.entries;
  const double direct = (rho.entries * l * l).trace().real() -
                        (nrho.entries * lc * lc).trace().real();

  const Matrix root = matrix_sqrt_psd(rho.entries);
  double sum = 0.0;
  for (const auto& e : channel.kraus_ops)
    sum += ((lc * e - e * l) * root).squaredNorm();
  return {direct, sum};
}

// sum_j ||(Q E_j - E_j L) sqrt(rho)||_HS^2; lower-bounded by the QFI loss,
// with equality at Q = SLD of the noisy state.
inline double ozawa_error(const ParametricFamily& family, double theta,
                          const KrausChannel& channel,
                          const HermitianObservable& q) {
  if (q.dim() != channel.out_dim())
    throw std::invalid_argument("ozawa_error: dimension mismatch");
  const DensityMatrix rho = evolve(family, theta);
  const Matrix drho = state_derivative(family, theta);
  const Matrix l = sld(rho, drho).sld.entries;
  const Matrix root = matrix_sqrt_psd(rho.entries);
  double sum = 0.0;
  for (const auto& e : channel.kraus_ops)
    sum += ((q.entries * e - e * l) * root).squaredNorm();
  return sum;
}

}  // namespace qfip
