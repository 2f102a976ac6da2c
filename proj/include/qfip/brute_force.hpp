// Dense density-matrix route for the GHZ dephasing schemes; the ground
// truth the closed-form module is checked against at desk scale.
#pragma once

#include <bit>

#include "qfip/noise.hpp"
#include "qfip/qfi.hpp"

namespace qfip {

// Builds an explicit channel from a raw error list: operators rescaled by
// the operator norm of sum E^dag E, with a completion Kraus operator
// appended when the rescaled sum falls short of the identity.
inline KrausChannel channel_from_errors(const std::vector<Matrix>& errors) {
  if (errors.empty()) throw std::invalid_argument("empty error list");
  const Eigen::Index dim = errors.front().rows();
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& e : errors) sum += e.adjoint() * e;
  Eigen::SelfAdjointEigenSolver<Matrix> es(sum, Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().maxCoeff();
  if (scale <= 0) throw std::invalid_argument("error list is all zero");
  std::vector<Matrix> ops;
  for (const auto& e : errors) ops.push_back(e / std::sqrt(scale));
  const Matrix deficit = identity(dim) - sum / scale;
  if (deficit.cwiseAbs().maxCoeff() > 1e-12)
    ops.push_back(matrix_sqrt_psd(deficit));
  return KrausChannel(std::move(ops));
}

// Syndrome measurement plus majority-vote correction for one phase-flip
// block: Kraus operators Z_corr(s) P_s over the 2^(n-1) syndromes of the
// X_i X_{i+1} stabilizers, with the minimal-weight consistent correction.
inline KrausChannel block_recovery_channel(int block, int n, int n_total) {
  const int syndromes = 1 << (n - 1);
  std::vector<int> best(std::size_t(syndromes), -1);
  for (int pat = 0; pat < (1 << n); ++pat) {
    int s = 0;
    for (int i = 0; i + 1 < n; ++i)
      s |= (((pat >> i) ^ (pat >> (i + 1))) & 1) << i;
    auto& slot = best[std::size_t(s)];
    if (slot < 0 || std::popcount(unsigned(pat)) < std::popcount(unsigned(slot)))
      slot = pat;
  }
  const Eigen::Index dim = Eigen::Index(1) << n_total;
  std::vector<Matrix> ops;
  for (int s = 0; s < syndromes; ++s) {
    Matrix proj = identity(dim);
    for (int i = 0; i + 1 < n; ++i) {
      const Matrix xx = embed_pauli('X', block * n + i, n_total) *
                        embed_pauli('X', block * n + i + 1, n_total);
      const double sign = ((s >> i) & 1) ? -1.0 : 1.0;
      proj = proj * ((identity(dim) + sign * xx) / 2.0);
    }
    Matrix corr = identity(dim);
    for (int i = 0; i < n; ++i)
      if ((best[std::size_t(s)] >> i) & 1)
        corr = corr * embed_pauli('Z', block * n + i, n_total);
    ops.push_back(corr * proj);
  }
  return KrausChannel(std::move(ops));
}

// Applies the per-qubit transverse then parallel dephasing maps to both the
// evolved state and its derivative (followed, for the logical scheme, by
// block-wise syndrome recovery) and reads the QFI off the SLD route.
inline double ghz_qfi_brute_force(const DephasingScenario& sc,
                                  SchemeKind kind) {
  const int N = (kind == SchemeKind::raw) ? sc.n_total
                                          : sc.blocks() * sc.block_size;
  if (N > kKrausProductCap)
    throw std::invalid_argument("ghz_qfi_brute_force: above dense cap");
  const PureState probe = (kind == SchemeKind::raw)
                              ? ghz_probe(N)
                              : logical_ghz_probe(sc.blocks(), sc.block_size);
  const ParametricFamily family(probe, sensing_generator(kind, sc));
  Matrix rho = evolve(family, sc.omega).entries;
  Matrix drho = state_derivative(family, sc.omega);
  const double px = sc.p_x(), pz = sc.p_z();
  for (int i = 0; i < N; ++i) {
    const KrausChannel vx = pauli_mixing_channel(embed_pauli('X', i, N), px);
    rho = apply_channel(vx, rho);
    drho = apply_channel(vx, drho);
  }
  for (int i = 0; i < N; ++i) {
    const KrausChannel vz = pauli_mixing_channel(embed_pauli('Z', i, N), pz);
    rho = apply_channel(vz, rho);
    drho = apply_channel(vz, drho);
  }
  if (kind == SchemeKind::logical && sc.block_size > 1) {
    for (int b = 0; b < sc.blocks(); ++b) {
      const KrausChannel rec = block_recovery_channel(b, sc.block_size, N);
      rho = apply_channel(rec, rho);
      drho = apply_channel(rec, drho);
    }
  }
  rho = (rho + Matrix(rho.adjoint())) / 2.0;
  drho = (drho + Matrix(drho.adjoint())) / 2.0;
  return qfi(DensityMatrix(std::move(rho)), drho);
}

}  // namespace qfip
