#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "phaseopt/rng.hpp"
#include "phaseopt/sparse_state.hpp"

namespace phaseopt {

// Noise and statistics settings. `shots` empty means analytic estimation;
// p is the white-noise weight of the Werner mixture.
struct NoiseParams {
  double p = 0.0;
  std::optional<int> shots;
  std::uint64_t seed = 0;

  bool analytic() const { return !shots.has_value(); }

  void validate() const {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise weight p must lie in [0, 1]");
    if (shots && *shots < 1) throw std::invalid_argument("shot count must be positive");
  }
};

// Expectation of a traceless observable under the Werner mixture:
// the fully mixed component contributes zero.
inline double werner_expectation(double ideal, double p) {
  if (ideal < -1.0 || ideal > 1.0) throw std::invalid_argument("ideal expectation outside [-1, 1]");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("noise weight p must lie in [0, 1]");
  return (1.0 - p) * ideal;
}

// Estimates all product expectations from one X-basis shot set (every parity
// is read from the same outcomes, as a single measurement round provides).
// Werner mixing is applied per shot: with probability p the outcome is
// replaced by a uniform random string, which reproduces the mixture's
// statistics for every parity observable. Deterministic given (state,
// products, noise).
inline std::vector<double> sample_estimates(const SparseState& state,
                                            std::span<const XProduct> products,
                                            const NoiseParams& noise) {
  noise.validate();
  if (noise.analytic()) {
    std::vector<double> out;
    out.reserve(products.size());
    for (const XProduct& op : products) out.push_back(werner_expectation(x_expectation(state, op), noise.p));
    return out;
  }

  const std::vector<double> prob = x_basis_distribution(state);  // throws CapacityError > 20 qubits
  std::vector<double> cdf(prob.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    acc += prob[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  SplitMix64 rng(noise.seed);
  std::vector<std::int64_t> parity_sums(products.size(), 0);
  const std::uint64_t dim = prob.size();
  for (int s = 0; s < *noise.shots; ++s) {
    const bool mixed = rng.next_double() < noise.p;
    std::uint64_t outcome;
    if (mixed) {
      outcome = rng.next_below(dim);
    } else {
      const double u = rng.next_double();
      outcome = static_cast<std::uint64_t>(
          std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      if (outcome >= dim) outcome = dim - 1;
    }
    for (std::size_t k = 0; k < products.size(); ++k)
      parity_sums[k] += (std::popcount(outcome & products[k].mask) & 1) ? -1 : 1;
  }

  std::vector<double> out(products.size());
  for (std::size_t k = 0; k < products.size(); ++k)
    out[k] = static_cast<double>(parity_sums[k]) / static_cast<double>(*noise.shots);
  return out;
}

}  // namespace phaseopt
