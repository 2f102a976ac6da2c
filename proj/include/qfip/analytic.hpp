// Closed-form QFI of the (logical-)GHZ scheme under parallel + transverse
// dephasing, the 2x2 QFI formula, and the Cramer-Rao bound.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "qfip/noise.hpp"
#include "qfip/qfi.hpp"

namespace qfip {

// Exact integer products up to n = 40, log-gamma above (large-N sweeps).
inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n <= 40) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * double(n - k + i) / double(i);
    return std::round(out);
  }
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

struct BlockCoefficients {
  int k;
  double a_k;  // probability weight of the k-flip sector
  double x_k;  // parallel-dephasing contrast
  double y_k;  // transverse-corrected contrast
};

inline BlockCoefficients block_coefficients(int N, int k, double p_x,
                                            double p_z) {
  if (N < 1 || N % 2 == 0)
    throw std::invalid_argument("block_coefficients: N must be odd");
  if (k < 0 || k > (N - 1) / 2)
    throw std::invalid_argument("block_coefficients: sector out of range");
  if (p_x < 0 || p_x > 0.5 || p_z < 0 || p_z > 0.5)
    throw std::invalid_argument("block_coefficients: probability out of range");
  const double a = std::pow(p_x, k) * std::pow(1.0 - p_x, N - k) +
                   std::pow(p_x, N - k) * std::pow(1.0 - p_x, k);
  const double x = std::pow(1.0 - 2.0 * p_z, N);
  const double hi = std::pow(1.0 - p_x, N - 2 * k);
  const double lo = std::pow(p_x, N - 2 * k);
  const double y = x * (hi - lo) / (hi + lo);
  return {k, a, x, y};
}

// tr[(drho)^2 + (1/det rho)(1-rho) drho (1-rho) drho]; pure branch falls
// back to 2 tr[(drho)^2].
inline double two_level_qfi(const Matrix& rho, const Matrix& drho) {
  if (rho.rows() != 2 || rho.cols() != 2 || drho.rows() != 2 ||
      drho.cols() != 2)
    throw std::invalid_argument("two_level_qfi: need 2x2 inputs");
  const double det = rho.determinant().real();
  if (det > 1e-12) {
    const Matrix one_minus = identity(2) - rho;
    return (drho * drho +
            (1.0 / det) * one_minus * drho * one_minus * drho)
        .trace()
        .real();
  }
  // Rank-1 branch: the derivative must live on the support.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const Eigen::Index kernel = es.eigenvalues()(0) < es.eigenvalues()(1) ? 0 : 1;
  const Vector v = es.eigenvectors().col(kernel);
  if (std::abs(cx(v.adjoint() * (drho * v))) > 1e-9)
    throw std::domain_error("two_level_qfi: derivative leaves the support");
  return 2.0 * (drho * drho).trace().real();
}

// Closed form, evaluated as the retained fraction per flip sector.  The
// textbook arrangement F = N^2 t^2 (1 - sum_k loss_k) cancels
// catastrophically when the loss approaches one (large N or strong
// dephasing).  Using sum_k C(N,k) a_k = 1 and writing everything through the
// complementary quantities A = 1 - x^2, D = x^2 - y^2 and B = A + D, the
// same expression becomes a quotient of sums of non-negative terms,
//   retained_k = (x^2 B + y^2 A - D cos) / (A (1 + cos) + B (1 - cos)),
// where A and x^2 come straight from expm1/exp of the same log1p argument
// and D = x^2 * 4 hi lo / (hi + lo)^2, so it stays accurate to a few ulp in
// both the small-loss and the small-retention regime.  A noiseless sector
// (zero denominator) retains x^2 = 1 by continuity.
inline double ghz_qfi_exact(int N, double t, double omega, double p_x,
                            double p_z) {
  if (N < 1 || N % 2 == 0)
    throw std::invalid_argument("ghz_qfi_exact: N must be odd");
  if (p_x < 0 || p_x > 0.5 || p_z < 0 || p_z > 0.5)
    throw std::invalid_argument("ghz_qfi_exact: probability out of range");
  const double full = double(N) * N * t * t;
  const double c = std::cos(2.0 * N * omega * t);
  const double log_contrast =
      p_z < 0.5 ? 2.0 * N * std::log1p(-2.0 * p_z)
                : -std::numeric_limits<double>::infinity();
  const double x2 = std::exp(log_contrast);
  const double a_comp = -std::expm1(log_contrast);  // A = 1 - x^2
  double retained = 0.0;
  for (int k = 0; k <= (N - 1) / 2; ++k) {
    const double a = std::pow(p_x, k) * std::pow(1.0 - p_x, N - k) +
                     std::pow(p_x, N - k) * std::pow(1.0 - p_x, k);
    const double hi = std::pow(1.0 - p_x, N - 2 * k);
    const double lo = std::pow(p_x, N - 2 * k);
    const double s = hi + lo;
    const double d = x2 * 4.0 * hi * lo / (s * s);  // D = x^2 - y^2
    const double b = a_comp + d;                    // B = 1 - y^2
    const double r = (hi - lo) / s;
    const double y2 = x2 * r * r;
    const double num = x2 * b + y2 * a_comp - d * c;
    const double den = a_comp * (1.0 + c) + b * (1.0 - c);
    const double ratio =
        den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : x2;
    retained += binomial(N, k) * a * ratio;
  }
  const double f = full * retained;
  return std::max(0.0, std::min(f, full));
}

// Logical scheme: same formula with N -> floor(N/n) blocks and the logical
// flip probabilities. The block count must be odd (the closed form is
// derived for odd N).
inline double logical_ghz_qfi_exact(const DephasingScenario& sc) {
  const int m = sc.blocks();
  if (m % 2 == 0)
    throw std::invalid_argument(
        "logical_ghz_qfi_exact: formula derived for odd block count");
  const LogicalErrorProbs p = logical_error_probabilities(sc);
  return ghz_qfi_exact(m, sc.time, sc.omega, p.p_bar_x, p.p_bar_z);
}

inline double crb(double fisher, long nu) {
  if (nu <= 0) throw std::invalid_argument("crb: nu must be positive");
  if (fisher <= 0.0) throw std::domain_error("crb: unidentifiable (F <= 0)");
  return 1.0 / std::sqrt(double(nu) * fisher);
}

}  // namespace qfip
