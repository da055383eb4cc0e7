#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace phaseopt {

using Complex = std::complex<double>;

// Inputs exceeding a hard resource bound (dense transforms, shot sampling on
// wide registers).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numerically inconsistent intermediate (e.g. a Pauli expectation with a
// non-negligible imaginary part).
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bit convention used throughout: qubit index i (0-based) is the i-th
// character of the bitstring literal, i.e. bit (n-1-i) of the basis word, so
// the word's binary value reads exactly like the printed string.
inline std::uint64_t bit_of(std::uint64_t basis, int qubit, int n_qubits) {
  return (basis >> (n_qubits - 1 - qubit)) & 1ULL;
}

inline std::uint64_t mask_from_indices(std::span<const int> qubits, int n_qubits) {
  std::uint64_t mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= n_qubits) throw std::invalid_argument("qubit index out of range");
    mask |= 1ULL << (n_qubits - 1 - q);
  }
  return mask;
}

inline std::vector<int> indices_from_mask(std::uint64_t mask, int n_qubits) {
  std::vector<int> out;
  for (int q = 0; q < n_qubits; ++q)
    if (bit_of(mask, q, n_qubits)) out.push_back(q);
  return out;
}

inline std::uint64_t parse_bitstring(const std::string& s) {
  std::uint64_t v = 0;
  for (char c : s) {
    if (c != '0' && c != '1') throw std::invalid_argument("bitstring must be 0/1");
    v = (v << 1) | static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline std::string format_basis(std::uint64_t basis, int n_qubits) {
  std::string s(static_cast<std::size_t>(n_qubits), '0');
  for (int q = 0; q < n_qubits; ++q)
    if (bit_of(basis, q, n_qubits)) s[static_cast<std::size_t>(q)] = '1';
  return s;
}

// Product of Pauli X over a support of qubits; empty support is the identity.
struct XProduct {
  std::uint64_t mask = 0;

  static XProduct from_indices(std::span<const int> qubits, int n_qubits) {
    return XProduct{mask_from_indices(qubits, n_qubits)};
  }
  bool is_identity() const { return mask == 0; }
};

// Superposition of computational basis states as (basis word, amplitude)
// pairs. Immutable after construction; all operations below are pure.
class SparseState {
 public:
  struct Term {
    std::uint64_t basis;
    Complex amp;
  };

  SparseState(int n_qubits, std::vector<Term> terms) : n_qubits_(n_qubits), terms_(std::move(terms)) {
    if (n_qubits_ < 1 || n_qubits_ > 62) throw std::invalid_argument("qubit count out of range");
    if (n_qubits_ < 62 && terms_.size() > (1ULL << n_qubits_))
      throw std::invalid_argument("more terms than basis states");
    double norm2 = 0.0;
    index_.reserve(terms_.size() * 2);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      const Term& t = terms_[i];
      if (n_qubits_ < 62 && t.basis >= (1ULL << n_qubits_))
        throw std::invalid_argument("basis word wider than register");
      if (!index_.emplace(t.basis, static_cast<std::uint32_t>(i)).second)
        throw std::invalid_argument("duplicate basis state");
      norm2 += std::norm(t.amp);
    }
    if (std::abs(norm2 - 1.0) > 1e-12) throw std::invalid_argument("state not normalized");
  }

  int n_qubits() const { return n_qubits_; }
  const std::vector<Term>& terms() const { return terms_; }

  Complex amp_of(std::uint64_t basis) const {
    auto it = index_.find(basis);
    return it == index_.end() ? Complex(0.0, 0.0) : terms_[it->second].amp;
  }

 private:
  int n_qubits_;
  std::vector<Term> terms_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

// Applies exp(i * theta_j * Z_j) for each (qubit j, angle) entry.
//
// Phase convention: a term gains exp(+i*theta_j) where bit j is 1 and
// exp(-i*theta_j) where it is 0. Equivalently the relative phase of a basis
// word against |0...0> advances by +2*theta_j per set bit, which is the sign
// that makes the compensation angles of the closed-form expectations act
// additively on the encoded phases.
inline SparseState apply_z_rotations(const SparseState& state,
                                     std::span<const std::pair<int, double>> angles) {
  const int n = state.n_qubits();
  std::vector<SparseState::Term> out = state.terms();
  for (auto& [basis, amp] : out) {
    double phase = 0.0;
    for (const auto& [qubit, theta] : angles) {
      if (qubit < 0 || qubit >= n) throw std::invalid_argument("rotation qubit out of range");
      phase += bit_of(basis, qubit, n) ? theta : -theta;
    }
    amp *= std::polar(1.0, phase);
  }
  return SparseState(n, std::move(out));
}

inline SparseState apply_z_rotations(const SparseState& state,
                                     const std::vector<std::pair<int, double>>& angles) {
  return apply_z_rotations(state, std::span<const std::pair<int, double>>(angles));
}

// <psi| prod_{j in support} X_j |psi>. Real for any state (terms pair up into
// conjugates); the imaginary-part guard catches malformed inputs. The result
// is clamped to [-1, 1] so downstream comparisons never see 1 + 1e-16.
inline double x_expectation(const SparseState& state, const XProduct& op) {
  if (state.n_qubits() < 62 && op.mask >= (1ULL << state.n_qubits()))
    throw std::invalid_argument("operator support outside register");
  Complex acc(0.0, 0.0);
  for (const auto& t : state.terms()) acc += std::conj(state.amp_of(t.basis ^ op.mask)) * t.amp;
  if (std::abs(acc.imag()) >= 1e-9)
    throw NumericError("X-product expectation has imaginary part " + std::to_string(acc.imag()));
  return std::clamp(acc.real(), -1.0, 1.0);
}

// Expectation of a Z-type parity (diagonal): sum |amp|^2 * (-1)^{|basis & mask|}.
inline double z_parity_expectation(const SparseState& state, std::uint64_t mask) {
  double acc = 0.0;
  for (const auto& t : state.terms())
    acc += (std::popcount(t.basis & mask) & 1) ? -std::norm(t.amp) : std::norm(t.amp);
  return acc;
}

inline constexpr int kDenseQubitLimit = 20;

// Probabilities of every X-basis outcome string. Outcome bit j = 1 means the
// "minus" result on qubit j, so outcome words print with the same convention
// as basis words. Dense 2^n table; refuses registers wider than 20 qubits.
inline std::vector<double> x_basis_distribution(const SparseState& state) {
  const int n = state.n_qubits();
  if (n > kDenseQubitLimit) throw CapacityError("x_basis_distribution limited to 20 qubits");
  const std::size_t dim = 1ULL << n;
  std::vector<Complex> vec(dim, Complex(0.0, 0.0));
  for (const auto& t : state.terms()) vec[t.basis] = t.amp;
  // In-place Walsh-Hadamard butterflies.
  for (std::size_t h = 1; h < dim; h <<= 1) {
    for (std::size_t i = 0; i < dim; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        Complex a = vec[j], b = vec[j + h];
        vec[j] = a + b;
        vec[j + h] = a - b;
      }
    }
  }
  std::vector<double> prob(dim);
  const double scale = 1.0 / static_cast<double>(dim);
  double total = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    prob[i] = std::norm(vec[i]) * scale;
    total += prob[i];
  }
  if (std::abs(total - 1.0) > 1e-10)
    throw NumericError("X-basis probabilities sum to " + std::to_string(total));
  return prob;
}

// Expectation of an X-product evaluated from the X-basis outcome
// distribution: the mean of the support-parity sign. Agrees with
// x_expectation analytically; used as an independent route in tests.
inline double x_expectation_from_distribution(std::span<const double> prob, const XProduct& op) {
  double acc = 0.0;
  for (std::size_t outcome = 0; outcome < prob.size(); ++outcome)
    acc += (std::popcount(outcome & op.mask) & 1) ? -prob[outcome] : prob[outcome];
  return acc;
}

}  // namespace phaseopt
