#pragma once

#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaseopt/rng.hpp"
#include "phaseopt/sparse_state.hpp"

namespace phaseopt {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double reduce_mod(double x, double period) {
  double r = std::fmod(x, period);
  return r < 0.0 ? r + period : r;
}

// Relative phases phi_1 .. phi_{2^P-1} on the logical basis components,
// reduced to [0, 2pi). Index k addresses the phase of basis component k+1
// (component 0 carries no phase).
class PhaseVector {
 public:
  PhaseVector() = default;
  explicit PhaseVector(std::vector<double> values) : values_(std::move(values)) {
    for (double& v : values_) v = reduce_mod(v, kTwoPi);
  }

  static PhaseVector zeros(std::size_t count) { return PhaseVector(std::vector<double>(count, 0.0)); }

  static PhaseVector random(std::size_t count, SplitMix64& rng) {
    std::vector<double> v(count);
    for (double& x : v) x = kTwoPi * rng.next_double();
    return PhaseVector(std::move(v));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Compensation angles, one per assigned control qubit, reduced to [0, pi)
// (every expectation has period pi in each angle).
class ControlVector {
 public:
  ControlVector() = default;
  explicit ControlVector(std::vector<std::pair<int, double>> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end());
    for (std::size_t i = 1; i < entries_.size(); ++i)
      if (entries_[i].first == entries_[i - 1].first)
        throw std::invalid_argument("duplicate control qubit");
    for (auto& [q, v] : entries_) v = reduce_mod(v, std::numbers::pi);
  }

  static ControlVector zeros(std::span<const int> qubits) {
    std::vector<std::pair<int, double>> e;
    e.reserve(qubits.size());
    for (int q : qubits) e.emplace_back(q, 0.0);
    return ControlVector(std::move(e));
  }

  double angle(int qubit) const {
    for (const auto& [q, v] : entries_)
      if (q == qubit) return v;
    throw std::invalid_argument("unknown control qubit " + std::to_string(qubit));
  }

  void set(int qubit, double value) {
    for (auto& [q, v] : entries_) {
      if (q == qubit) {
        v = reduce_mod(value, std::numbers::pi);
        return;
      }
    }
    throw std::invalid_argument("unknown control qubit " + std::to_string(qubit));
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::pair<int, double>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<int, double>> entries_;
};

enum class Generation { d3, d5, d7 };

// Code geometry: plaquettes, the logical |0> basis (the orbit of the all-zeros
// string under X-plaquette flips), the canonical stabilizer-product order, and
// the phase-to-stabilizer assignment of control qubits.
//
// Products are ordered singles first, then pairs, then higher; within the
// 3-plaquette code the pair order is (1,2), (2,3), (1,3), giving
// S1, S2, S3, S1S2, S2S3, S1S3, S1S2S3.
struct CodeSpec {
  std::string name;
  int n_qubits = 0;
  std::vector<std::vector<int>> plaquettes;          // 0-based qubit indices
  std::vector<std::uint64_t> plaquette_masks;
  std::vector<std::uint64_t> logical_basis;          // 2^P basis words
  std::vector<std::vector<int>> product_sets;        // plaquette-index subsets
  std::vector<std::uint64_t> product_masks;          // 2^P - 1 supports
  std::vector<std::pair<int, int>> assignment;       // (product id, control qubit)

  std::size_t plaquette_count() const { return plaquettes.size(); }
  std::size_t phase_count() const { return product_masks.size(); }

  std::vector<int> control_qubits() const {
    std::vector<int> out;
    out.reserve(assignment.size());
    for (const auto& [pid, q] : assignment) out.push_back(q);
    return out;
  }

  std::string product_label(std::size_t product_id) const {
    std::string s;
    for (int p : product_sets[product_id]) s += "S" + std::to_string(p + 1);
    return s;
  }
};

namespace detail {

// Subset order for stabilizer products: by size, then the published order for
// three plaquettes, lexicographic otherwise.
inline std::vector<std::vector<int>> product_subset_order(int plaquette_count) {
  if (plaquette_count == 2) return {{0}, {1}, {0, 1}};
  if (plaquette_count == 3) return {{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}, {0, 1, 2}};
  std::vector<std::vector<int>> out;
  for (int size = 1; size <= plaquette_count; ++size) {
    std::vector<int> pick(size);
    // lexicographic k-subsets
    for (int i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      out.push_back(pick);
      int i = size - 1;
      while (i >= 0 && pick[i] == plaquette_count - size + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

// basis_generator_order: plaquette indices used as binary-counter generators
// for the logical basis. The 3-plaquette codes list the second plaquette
// first so that the basis matches the published expansion of |0>_L.
inline CodeSpec assemble(std::string name, int n_qubits, std::vector<std::vector<int>> plaquettes,
                         std::vector<int> basis_generator_order,
                         std::vector<std::pair<int, int>> assignment) {
  CodeSpec code;
  code.name = std::move(name);
  code.n_qubits = n_qubits;
  code.plaquettes = std::move(plaquettes);
  for (const auto& p : code.plaquettes)
    code.plaquette_masks.push_back(mask_from_indices(p, n_qubits));

  const std::size_t P = code.plaquettes.size();
  code.logical_basis.resize(1ULL << P);
  for (std::uint64_t k = 0; k < code.logical_basis.size(); ++k) {
    std::uint64_t b = 0;
    for (std::size_t j = 0; j < P; ++j)
      if (k & (1ULL << j)) b ^= code.plaquette_masks[basis_generator_order[j]];
    code.logical_basis[k] = b;
  }

  code.product_sets = product_subset_order(static_cast<int>(P));
  for (const auto& subset : code.product_sets) {
    std::uint64_t m = 0;
    for (int p : subset) m ^= code.plaquette_masks[p];
    code.product_masks.push_back(m);
  }

  code.assignment = std::move(assignment);
  for (const auto& [pid, q] : code.assignment) {
    if (pid < 0 || static_cast<std::size_t>(pid) >= code.product_masks.size())
      throw std::invalid_argument("assignment product id out of range");
    if (!bit_of(code.product_masks[pid], q, n_qubits))
      throw std::invalid_argument("control qubit outside stabilizer support");
  }
  return code;
}

}  // namespace detail

// The 7-qubit, 3-plaquette code. Plaquettes {1,2,3,4}, {2,3,5,6}, {3,4,6,7}
// in 1-based labels. Default assignment: S1->2, S2->5, S3->7, S1S2->1,
// S2S3->4, S1S3->6, S1S2S3->3 (1-based; one valid injective choice).
inline CodeSpec build_d3() {
  return detail::assemble(
      "d3", 7, {{0, 1, 2, 3}, {1, 2, 4, 5}, {2, 3, 5, 6}}, {1, 0, 2},
      {{0, 1}, {1, 4}, {2, 6}, {3, 0}, {4, 3}, {5, 5}, {6, 2}});
}

// The two-plaquette intermediate of the 7-qubit code: plaquettes 1 and 2,
// compensation on qubits 2, 5, 1 (1-based).
inline CodeSpec two_plaquette_subcode() {
  return detail::assemble("sub2", 7, {{0, 1, 2, 3}, {1, 2, 4, 5}}, {1, 0},
                          {{0, 1}, {1, 4}, {2, 0}});
}

// 17-qubit code: seven squares and one octagon. The top three squares are the
// 7-qubit code; the octagon hangs below them and a strip of four squares
// closes the bottom. Square-square and octagon-square side sharing is 6 + 6.
inline CodeSpec build_d5() {
  std::vector<std::vector<int>> plaquettes = {
      {0, 1, 2, 3},
      {1, 2, 4, 5},
      {2, 3, 5, 6},
      {4, 5, 6, 7, 8, 9, 10, 11},
      {7, 8, 12, 13},
      {8, 9, 13, 14},
      {9, 10, 14, 15},
      {10, 11, 15, 16},
  };
  std::vector<std::pair<int, int>> assignment;
  // one control qubit per plaquette generator, greedily distinct
  assignment = {{0, 0}, {1, 1}, {2, 2}, {3, 4}, {4, 7}, {5, 8}, {6, 9}, {7, 10}};
  return detail::assemble("d5", 17, std::move(plaquettes), {0, 1, 2, 3, 4, 5, 6, 7},
                          std::move(assignment));
}

// 31-qubit code: twelve squares and three octagons. Reconstructed to
// reproduce the published quasi-local degree-of-freedom table exactly; the
// published counts admit no hole-free planar square/octagon drawing (Euler
// counting caps the shared-subset corrections at 27, the table needs 29), so
// this layout is a combinatorial representative: pairwise-even overlaps,
// independent generators, every qubit on at most three plaquettes.
inline CodeSpec build_d7() {
  std::vector<std::vector<int>> plaquettes = {
      {0, 1, 2, 3, 4, 5, 6, 7},        // octagons around qubit 0
      {0, 1, 8, 9, 10, 11, 12, 13},
      {0, 7, 13, 14, 15, 16, 17, 18},
      {19, 20, 21, 22},                // square laddered to the first octagon
      {2, 3, 19, 20},
      {3, 4, 20, 21},
      {4, 5, 21, 22},
      {8, 9, 23, 24},                  // second-octagon cluster
      {10, 11, 25, 26},
      {9, 10, 24, 25},
      {8, 11, 24, 25},
      {14, 15, 27, 28},                // third-octagon cluster
      {16, 17, 29, 30},
      {15, 16, 28, 29},
      {14, 17, 28, 29},
  };
  std::vector<std::pair<int, int>> assignment = {
      {0, 0}, {1, 1}, {2, 7}, {3, 19}, {4, 2}, {5, 3}, {6, 4}, {7, 8},
      {8, 10}, {9, 9}, {10, 11}, {11, 14}, {12, 16}, {13, 15}, {14, 17}};
  std::vector<int> gen_order(15);
  for (int i = 0; i < 15; ++i) gen_order[static_cast<std::size_t>(i)] = i;
  return detail::assemble("d7", 31, std::move(plaquettes), std::move(gen_order),
                          std::move(assignment));
}

inline CodeSpec build_code(Generation g) {
  switch (g) {
    case Generation::d3: return build_d3();
    case Generation::d5: return build_d5();
    case Generation::d7: return build_d7();
  }
  throw std::invalid_argument("unknown generation");
}

inline CodeSpec build_code(const std::string& name) {
  if (name == "d3") return build_d3();
  if (name == "d5") return build_d5();
  if (name == "d7") return build_d7();
  if (name == "sub2") return two_plaquette_subcode();
  throw std::invalid_argument("unknown code '" + name + "' (expected d3, d5, d7 or sub2)");
}

// Ordered stabilizer products as X-operators.
inline std::vector<XProduct> stabilizer_products(const CodeSpec& code) {
  std::vector<XProduct> out;
  out.reserve(code.product_masks.size());
  for (std::uint64_t m : code.product_masks) out.push_back(XProduct{m});
  return out;
}

// (1/sqrt(2^P)) sum_k exp(i phi_k) |b_k>, phi_0 = 0.
inline SparseState logical_state(const CodeSpec& code, const PhaseVector& phases) {
  if (phases.size() != code.phase_count())
    throw std::invalid_argument("phase vector length does not match code");
  const double amp = 1.0 / std::sqrt(static_cast<double>(code.logical_basis.size()));
  std::vector<SparseState::Term> terms;
  terms.reserve(code.logical_basis.size());
  terms.push_back({code.logical_basis[0], Complex(amp, 0.0)});
  for (std::size_t k = 1; k < code.logical_basis.size(); ++k)
    terms.push_back({code.logical_basis[k], std::polar(amp, phases[k - 1])});
  return SparseState(code.n_qubits, std::move(terms));
}

}  // namespace phaseopt
