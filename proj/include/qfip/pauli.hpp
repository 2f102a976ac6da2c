// Symplectic Pauli algebra, stabilizer codes, phase-flip code construction,
// and the immune-error-set machinery.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "qfip/core.hpp"

namespace qfip {

// i^phase_exp * prod_site X^x Z^z, with Y = i X Z stored as (x=1, z=1,
// phase_exp tracked separately). Site 0 is the leftmost tensor factor.
struct PauliOperator {
  int phase_exp = 0;  // power of i, 0..3
  std::vector<std::uint8_t> x_bits;
  std::vector<std::uint8_t> z_bits;
  int n = 0;

  static PauliOperator identity(int n) {
    PauliOperator p;
    p.n = n;
    p.x_bits.assign(std::size_t(n), 0);
    p.z_bits.assign(std::size_t(n), 0);
    return p;
  }

  static PauliOperator single(char label, int site, int n) {
    if (site < 0 || site >= n)
      throw std::out_of_range("PauliOperator::single: site out of range");
    PauliOperator p = identity(n);
    switch (label) {
      case 'X': p.x_bits[std::size_t(site)] = 1; break;
      case 'Z': p.z_bits[std::size_t(site)] = 1; break;
      case 'Y':
        p.x_bits[std::size_t(site)] = 1;
        p.z_bits[std::size_t(site)] = 1;
        p.phase_exp = 1;
        break;
      default: throw std::invalid_argument("pauli label must be X, Y or Z");
    }
    return p;
  }

  int weight() const {
    int w = 0;
    for (int i = 0; i < n; ++i)
      if (x_bits[std::size_t(i)] || z_bits[std::size_t(i)]) ++w;
    return w;
  }

  // i^(phase - y_count) must be real for a Hermitian Pauli.
  bool is_hermitian() const {
    int y = 0;
    for (int i = 0; i < n; ++i)
      if (x_bits[std::size_t(i)] && z_bits[std::size_t(i)]) ++y;
    return ((phase_exp - y) % 2 + 2) % 2 == 0;
  }

  bool same_bits(const PauliOperator& o) const {
    return n == o.n && x_bits == o.x_bits && z_bits == o.z_bits;
  }

  bool operator==(const PauliOperator& o) const {
    return same_bits(o) && phase_exp == o.phase_exp;
  }

  Matrix dense() const {
    Matrix out = Matrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
      Matrix site = qfip::identity(2);
      if (x_bits[std::size_t(i)]) site = pauli_matrix('X') * site;
      if (z_bits[std::size_t(i)]) site = site * pauli_matrix('Z');
      out = tensor_product(out, site);
    }
    static const cx iphase[4] = {cx(1, 0), cx(0, 1), cx(-1, 0), cx(0, -1)};
    return iphase[((phase_exp % 4) + 4) % 4] * out;
  }

  // Text format: optional leading +, -, +i, -i, i, followed by I/X/Y/Z per
  // qubit, e.g. "-iYXX".
  static PauliOperator parse(std::string_view text) {
    int phase = 0;
    if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
      if (text[0] == '-') phase = 2;
      text.remove_prefix(1);
    }
    if (!text.empty() && text[0] == 'i') {
      phase += 1;
      text.remove_prefix(1);
    }
    if (text.empty())
      throw std::invalid_argument("empty Pauli string");
    PauliOperator p = identity(int(text.size()));
    p.phase_exp = phase % 4;
    for (std::size_t i = 0; i < text.size(); ++i) {
      switch (text[i]) {
        case 'I': break;
        case 'X': p.x_bits[i] = 1; break;
        case 'Z': p.z_bits[i] = 1; break;
        case 'Y':
          p.x_bits[i] = 1;
          p.z_bits[i] = 1;
          p.phase_exp = (p.phase_exp + 1) % 4;
          break;
        default:
          throw std::invalid_argument(
              std::string("bad Pauli character '") + text[i] + "'");
      }
    }
    return p;
  }

  std::string str() const {
    int phase = ((phase_exp % 4) + 4) % 4;
    std::string body;
    for (int i = 0; i < n; ++i) {
      const bool x = x_bits[std::size_t(i)], z = z_bits[std::size_t(i)];
      if (x && z) {
        body += 'Y';
        phase = (phase + 3) % 4;  // Y carries one factor of i
      } else {
        body += x ? 'X' : (z ? 'Z' : 'I');
      }
    }
    static const char* prefix[4] = {"", "i", "-", "-i"};
    return prefix[phase] + body;
  }
};

inline PauliOperator pauli_multiply(const PauliOperator& a,
                                    const PauliOperator& b) {
  if (a.n != b.n) throw std::invalid_argument("pauli_multiply: size mismatch");
  PauliOperator out = PauliOperator::identity(a.n);
  int phase = a.phase_exp + b.phase_exp;
  for (int i = 0; i < a.n; ++i) {
    const std::size_t s = std::size_t(i);
    // Z^za X^xb = (-1)^(za xb) X^xb Z^za when commuting b's X past a's Z.
    if (a.z_bits[s] && b.x_bits[s]) phase += 2;
    out.x_bits[s] = a.x_bits[s] ^ b.x_bits[s];
    out.z_bits[s] = a.z_bits[s] ^ b.z_bits[s];
  }
  out.phase_exp = ((phase % 4) + 4) % 4;
  return out;
}

inline bool pauli_commutes(const PauliOperator& a, const PauliOperator& b) {
  if (a.n != b.n) throw std::invalid_argument("pauli_commutes: size mismatch");
  int sym = 0;
  for (int i = 0; i < a.n; ++i) {
    const std::size_t s = std::size_t(i);
    sym += int(a.x_bits[s] & b.z_bits[s]) + int(a.z_bits[s] & b.x_bits[s]);
  }
  return sym % 2 == 0;
}

namespace detail {

// Rank of the stacked (x|z) symplectic vectors over GF(2).
inline int symplectic_rank(const std::vector<PauliOperator>& ops) {
  if (ops.empty()) return 0;
  const int n = ops.front().n;
  std::vector<std::vector<std::uint8_t>> rows;
  for (const auto& op : ops) {
    std::vector<std::uint8_t> row(std::size_t(2 * n));
    for (int i = 0; i < n; ++i) {
      row[std::size_t(i)] = op.x_bits[std::size_t(i)];
      row[std::size_t(n + i)] = op.z_bits[std::size_t(i)];
    }
    rows.push_back(std::move(row));
  }
  int rank = 0;
  for (int col = 0; col < 2 * n && rank < int(rows.size()); ++col) {
    int pivot = -1;
    for (int r = rank; r < int(rows.size()); ++r)
      if (rows[std::size_t(r)][std::size_t(col)]) { pivot = r; break; }
    if (pivot < 0) continue;
    std::swap(rows[std::size_t(rank)], rows[std::size_t(pivot)]);
    for (int r = 0; r < int(rows.size()); ++r)
      if (r != rank && rows[std::size_t(r)][std::size_t(col)])
        for (int c = 0; c < 2 * n; ++c)
          rows[std::size_t(r)][std::size_t(c)] ^=
              rows[std::size_t(rank)][std::size_t(c)];
    ++rank;
  }
  return rank;
}

}  // namespace detail

struct StabilizerCode {
  std::vector<PauliOperator> generators;
  PauliOperator logical_x;
  PauliOperator logical_z;
  int n;
  int k;

  StabilizerCode(std::vector<PauliOperator> gens, PauliOperator lx,
                 PauliOperator lz, int n_qubits)
      : generators(std::move(gens)),
        logical_x(std::move(lx)),
        logical_z(std::move(lz)),
        n(n_qubits),
        k(n_qubits - int(generators.size())) {
    for (const auto& g : generators) {
      if (g.n != n) throw std::invalid_argument("generator size mismatch");
      if (!g.is_hermitian())
        throw std::invalid_argument("generator is not Hermitian");
    }
    for (std::size_t a = 0; a < generators.size(); ++a)
      for (std::size_t b = a + 1; b < generators.size(); ++b)
        if (!pauli_commutes(generators[a], generators[b]))
          throw std::invalid_argument("generators do not commute");
    if (detail::symplectic_rank(generators) != int(generators.size()))
      throw std::invalid_argument("generators are not independent");
    for (const auto& g : generators) {
      if (!pauli_commutes(logical_x, g) || !pauli_commutes(logical_z, g))
        throw std::invalid_argument("logical operator breaks the stabilizer");
    }
    if (pauli_commutes(logical_x, logical_z))
      throw std::invalid_argument("logical X and Z must anticommute");
  }

  Eigen::Index dim() const { return Eigen::Index(1) << n; }

  Matrix projector() const {
    Matrix p = identity(dim());
    for (const auto& g : generators)
      p = p * (identity(dim()) + g.dense()) / 2.0;
    return p;
  }

  // k = 1 codeword basis: |0bar> and |1bar> = eigenvectors of logical Z
  // inside the code space.
  std::vector<PureState> codewords() const {
    if (k != 1) throw std::invalid_argument("codewords need k = 1");
    const Matrix p = projector();
    const Matrix zc = p * logical_z.dense() * p;
    Eigen::SelfAdjointEigenSolver<Matrix> es(zc);
    std::vector<Vector> plus, minus;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      if (es.eigenvalues()(i) > 0.5)
        plus.push_back(es.eigenvectors().col(i));
      else if (es.eigenvalues()(i) < -0.5)
        minus.push_back(es.eigenvectors().col(i));
    }
    if (plus.size() != 1 || minus.size() != 1)
      throw std::runtime_error("code space is not two-dimensional");
    // Fix the relative phase through logical X: |1bar> = Xbar |0bar>.
    Vector zero = plus.front();
    Vector one = logical_x.dense() * zero;
    return {PureState(zero), PureState(one / one.norm())};
  }
};

// Generators {X1 X2, ..., X_{n-1} X_n}, logical Z = Z...Z, logical X = X...X.
inline StabilizerCode phase_flip_code(int n) {
  if (n <= 0 || n % 2 == 0)
    throw std::invalid_argument("phase_flip_code needs odd positive n");
  std::vector<PauliOperator> gens;
  for (int i = 0; i + 1 < n; ++i) {
    PauliOperator g = PauliOperator::identity(n);
    g.x_bits[std::size_t(i)] = 1;
    g.x_bits[std::size_t(i + 1)] = 1;
    gens.push_back(std::move(g));
  }
  PauliOperator lx = PauliOperator::identity(n);
  PauliOperator lz = PauliOperator::identity(n);
  for (int i = 0; i < n; ++i) {
    lx.x_bits[std::size_t(i)] = 1;
    lz.z_bits[std::size_t(i)] = 1;
  }
  return StabilizerCode(std::move(gens), std::move(lx), std::move(lz), n);
}

inline bool is_detectable(const PauliOperator& error,
                          const StabilizerCode& code) {
  if (error.n != code.n)
    throw std::invalid_argument("is_detectable: size mismatch");
  for (const auto& g : code.generators)
    if (!pauli_commutes(error, g)) return true;
  return false;
}

// {E_j} union {E_j Xbar}; Xbar must commute with every generator.
inline std::vector<PauliOperator> immune_error_set(
    const StabilizerCode& code, const std::vector<PauliOperator>& correctable,
    const PauliOperator& x_bar) {
  for (const auto& g : code.generators)
    if (!pauli_commutes(x_bar, g))
      throw std::invalid_argument("x_bar does not commute with the stabilizer");
  std::vector<PauliOperator> out = correctable;
  for (const auto& e : correctable)
    out.push_back(pauli_multiply(e, x_bar));
  return out;
}

// All weight <= t Z-type errors (including identity), in index order.
inline std::vector<PauliOperator> z_errors_up_to_weight(int n, int t) {
  std::vector<PauliOperator> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    int w = 0;
    for (int i = 0; i < n; ++i) w += int((mask >> i) & 1);
    if (w > t) continue;
    PauliOperator p = PauliOperator::identity(n);
    for (int i = 0; i < n; ++i) p.z_bits[std::size_t(i)] = (mask >> i) & 1;
    out.push_back(std::move(p));
  }
  return out;
}

// Projectors onto the joint eigenspaces of the stabilizer generators and
// Xbar; for the phase-flip family this is the full X basis.
inline Povm optimal_measurement_povm(const StabilizerCode& code,
                                     const PauliOperator& x_bar) {
  if (code.k != 1)
    throw std::invalid_argument("optimal_measurement_povm needs k = 1");
  std::vector<Matrix> projectors{identity(code.dim())};
  std::vector<PauliOperator> observables = code.generators;
  observables.push_back(x_bar);
  for (const auto& ob : observables) {
    const Matrix dense = ob.dense();
    std::vector<Matrix> next;
    for (const auto& p : projectors)
      for (const double sign : {+1.0, -1.0}) {
        Matrix half = p * (identity(code.dim()) + sign * dense) / 2.0;
        if (half.trace().real() > 1e-9) next.push_back(std::move(half));
      }
    projectors = std::move(next);
  }
  return Povm(std::move(projectors));
}

}  // namespace qfip
