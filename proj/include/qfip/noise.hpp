// Concrete noise channels and metrological scheme builders: dephasing maps,
// spontaneous emission, GHZ and logical-GHZ probes, sensing generators, and
// logical error-probability maps.
#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <string>

#include "qfip/core.hpp"
#include "qfip/pauli.hpp"

namespace qfip {

// Channels materializing all 2^n Kraus products are capped here; larger
// systems go through the analytic module or per-qubit composition.
inline constexpr int kKrausProductCap = 9;

struct DephasingScenario {
  int n_total;      // N
  int block_size;   // n, odd
  double gamma_x;   // 1/time
  double gamma_z;   // 1/time
  double omega;     // rad/time
  double time;      // t

  DephasingScenario(int N, int n, double gx, double gz, double w, double t)
      : n_total(N), block_size(n), gamma_x(gx), gamma_z(gz), omega(w),
        time(t) {
    if (n <= 0 || n % 2 == 0)
      throw std::invalid_argument("block_size must be odd and positive");
    if (N < n) throw std::invalid_argument("need at least one block");
    if (gx < 0 || gz < 0 || t < 0)
      throw std::invalid_argument("rates and time must be nonnegative");
  }

  int blocks() const { return n_total / block_size; }
  double p_x() const;
  double p_z() const;
};

// p = (1 - exp(-gamma t)) / 2
inline double flip_probability(double gamma, double t) {
  if (gamma < 0 || t < 0)
    throw std::invalid_argument("flip_probability: negative input");
  return (1.0 - std::exp(-gamma * t)) / 2.0;
}

inline double DephasingScenario::p_x() const {
  return flip_probability(gamma_x, time);
}
inline double DephasingScenario::p_z() const {
  return flip_probability(gamma_z, time);
}

// {sqrt(1-p) I, sqrt(p) P} for a single dense Pauli P.
inline KrausChannel pauli_mixing_channel(const Matrix& pauli, double p) {
  if (p < 0 || p > 1) throw std::invalid_argument("probability out of range");
  return KrausChannel({std::sqrt(1.0 - p) * identity(pauli.rows()),
                       std::sqrt(p) * pauli});
}

// Product over all qubits of the single-qubit mixing map; 2^n Kraus
// operators sqrt(weight) * Pauli product.
inline KrausChannel dephasing_channel(char axis, double p, int n) {
  if (axis != 'X' && axis != 'Z')
    throw std::invalid_argument("dephasing axis must be X or Z");
  if (p < 0 || p > 1) throw std::invalid_argument("probability out of range");
  if (n < 1 || n > kKrausProductCap)
    throw std::invalid_argument("dephasing_channel: qubit count above cap");
  std::vector<Matrix> ops;
  ops.reserve(std::size_t(1) << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    int w = 0;
    PauliOperator op = PauliOperator::identity(n);
    for (int i = 0; i < n; ++i) {
      if (!((mask >> i) & 1)) continue;
      ++w;
      if (axis == 'X') op.x_bits[std::size_t(i)] = 1;
      else op.z_bits[std::size_t(i)] = 1;
    }
    const double weight = std::pow(p, w) * std::pow(1.0 - p, n - w);
    ops.push_back(std::sqrt(weight) * op.dense());
  }
  return KrausChannel(std::move(ops));
}

// Amplitude damping toward |0> with eta = exp(-gamma t); the excited state
// is |1>. E1 = ((sqrt(eta)+1)/2) I - ((sqrt(eta)-1)/2) Z, E2 =
// sqrt(1-eta) |0><1|.
inline KrausChannel spontaneous_emission_channel(double gamma, double t) {
  if (gamma < 0 || t < 0)
    throw std::invalid_argument("negative rate or time");
  const double eta = std::exp(-gamma * t);
  const double root = std::sqrt(eta);
  Matrix e1 = ((root + 1.0) / 2.0) * identity(2) -
              ((root - 1.0) / 2.0) * pauli_matrix('Z');
  Matrix e2 = Matrix::Zero(2, 2);
  e2(0, 1) = std::sqrt(1.0 - eta);
  return KrausChannel({std::move(e1), std::move(e2)});
}

inline PureState ghz_probe(int N) {
  if (N < 1 || N > kDenseQubitCap)
    throw std::invalid_argument("ghz_probe: qubit count out of range");
  Vector v = Vector::Zero(Eigen::Index(1) << N);
  v(0) = v(v.size() - 1) = 1.0 / std::sqrt(2.0);
  return PureState(std::move(v));
}

// Phase-flip codewords of one block.
inline std::pair<Vector, Vector> phase_flip_codewords(int n) {
  const auto words = phase_flip_code(n).codewords();
  return {words[0].amplitudes, words[1].amplitudes};
}

// (|0bar>^m + |1bar>^m)/sqrt(2) over m blocks of n qubits.
inline PureState logical_ghz_probe(int m, int n) {
  if (n % 2 == 0) throw std::invalid_argument("block size must be odd");
  if (m < 1 || m * n > kDenseQubitCap)
    throw std::invalid_argument("logical_ghz_probe: dense cap exceeded");
  const auto [zero, one] = phase_flip_codewords(n);
  Vector all0 = Vector::Ones(1), all1 = Vector::Ones(1);
  for (int i = 0; i < m; ++i) {
    all0 = tensor_product(all0, zero);
    all1 = tensor_product(all1, one);
  }
  Vector v = (all0 + all1) / std::sqrt(2.0);
  return PureState(v / v.norm());
}

enum class SchemeKind { raw, logical };

// G = t H with H = (1/2) sum_i Z_i (raw) or (1/2) sum_i Zbar^[i] (logical),
// so the estimation parameter is omega.
inline HermitianObservable sensing_generator(SchemeKind kind,
                                             const DephasingScenario& sc) {
  const int N = (kind == SchemeKind::raw)
                    ? sc.n_total
                    : sc.blocks() * sc.block_size;
  if (N > kDenseQubitCap)
    throw std::invalid_argument("sensing_generator: dense cap exceeded");
  const Eigen::Index dim = Eigen::Index(1) << N;
  Matrix h = Matrix::Zero(dim, dim);
  if (kind == SchemeKind::raw) {
    for (int i = 0; i < N; ++i) h += embed_pauli('Z', i, N);
  } else {
    for (int b = 0; b < sc.blocks(); ++b) {
      PauliOperator zbar = PauliOperator::identity(N);
      for (int j = 0; j < sc.block_size; ++j)
        zbar.z_bits[std::size_t(b * sc.block_size + j)] = 1;
      h += zbar.dense();
    }
  }
  return HermitianObservable(0.5 * sc.time * h);
}

struct LogicalErrorProbs {
  double p_bar_x;
  double p_bar_z;
};

// pbar_z: majority-vote failure of the n-qubit phase-flip code; pbar_x:
// single bit flips amplified to logical flips.
inline LogicalErrorProbs logical_error_probabilities(
    const DephasingScenario& sc) {
  const int n = sc.block_size;
  const double px = sc.p_x(), pz = sc.p_z();
  if (n == 1) return {px, pz};
  double pbz = 0.0;
  double binom = 1.0;
  for (int k = 0; k <= (n - 1) / 2; ++k) {
    if (k > 0) binom = binom * double(n - k + 1) / double(k);
    pbz += binom * std::pow(pz, n - k) * std::pow(1.0 - pz, k);
  }
  const double pbx = (1.0 - std::pow(1.0 - 2.0 * px, n)) / 2.0;
  return {pbx, pbz};
}

struct TrotterValidity {
  bool valid;
  double n_gx2t2;  // N gamma_x^2 t^2
  double n_w2t2;   // N omega^2 t^2
};

inline TrotterValidity trotter_validity(const DephasingScenario& sc,
                                        double threshold = 0.01) {
  const double a = sc.n_total * sc.gamma_x * sc.gamma_x * sc.time * sc.time;
  const double b = sc.n_total * sc.omega * sc.omega * sc.time * sc.time;
  return {a < threshold && b < threshold, a, b};
}

// Flat key=value serialization consumed by the CLI.
inline std::map<std::string, std::string> parse_flat_config(
    std::istream& in) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

inline std::string scenario_to_config(const DephasingScenario& sc) {
  std::ostringstream os;
  os << "n_total=" << sc.n_total << "\n"
     << "block_size=" << sc.block_size << "\n"
     << "gamma_x=" << sc.gamma_x << "\n"
     << "gamma_z=" << sc.gamma_z << "\n"
     << "omega=" << sc.omega << "\n"
     << "time=" << sc.time << "\n";
  return os.str();
}

}  // namespace qfip
