#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "phaseopt/codes.hpp"
#include "phaseopt/measurement.hpp"
#include "phaseopt/rng.hpp"

using namespace phaseopt;

TEST_CASE("werner_expectation arithmetic") {
  CHECK(werner_expectation(1.0, 0.0) == 1.0);
  CHECK(werner_expectation(0.3, 1.0) == 0.0);
  CHECK(werner_expectation(-0.7, 1.0) == 0.0);
  CHECK(werner_expectation(0.8, 0.25) == Catch::Approx(0.6));
  CHECK_THROWS_AS(werner_expectation(1.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(werner_expectation(0.5, -0.1), std::invalid_argument);
}

TEST_CASE("analytic estimates scale the ideal values") {
  const CodeSpec d3 = build_d3();
  SparseState ideal = logical_state(d3, PhaseVector::zeros(7));
  const auto products = stabilizer_products(d3);

  NoiseParams clean;
  for (double e : sample_estimates(ideal, products, clean)) CHECK(e == Catch::Approx(1.0));

  NoiseParams mixed{1.0, std::nullopt, 0};
  for (double e : sample_estimates(ideal, products, mixed)) CHECK(e == Catch::Approx(0.0));

  NoiseParams partial{0.25, std::nullopt, 0};
  for (double e : sample_estimates(ideal, products, partial)) CHECK(e == Catch::Approx(0.75));
}

TEST_CASE("shot estimates on a stabilizer eigenstate") {
  const CodeSpec d3 = build_d3();
  SparseState ideal = logical_state(d3, PhaseVector::zeros(7));
  const auto products = stabilizer_products(d3);

  // noiseless: every shot has even parity on every support, estimates exact
  NoiseParams shots200{0.0, 200, 42};
  for (double e : sample_estimates(ideal, products, shots200)) CHECK(e == 1.0);

  // all estimates bounded by construction
  NoiseParams noisy{0.5, 100, 9};
  for (double e : sample_estimates(ideal, products, noisy)) {
    CHECK(e <= 1.0);
    CHECK(e >= -1.0);
  }
}

TEST_CASE("seed determinism") {
  const CodeSpec d3 = build_d3();
  SplitMix64 rng(5);
  SparseState s = logical_state(d3, PhaseVector::random(7, rng));
  const auto products = stabilizer_products(d3);
  NoiseParams noise{0.2, 150, 777};
  CHECK(sample_estimates(s, products, noise) == sample_estimates(s, products, noise));
  NoiseParams other = noise;
  other.seed = 778;
  CHECK(sample_estimates(s, products, noise) != sample_estimates(s, products, other));
}

TEST_CASE("shot sampling is unbiased for the Werner expectation") {
  const CodeSpec sub = two_plaquette_subcode();
  SplitMix64 rng(101);
  PhaseVector phases = PhaseVector::random(3, rng);
  SparseState s = logical_state(sub, phases);
  const auto products = stabilizer_products(sub);
  const double p = 0.3;

  std::vector<double> ideal;
  for (const auto& op : products) ideal.push_back(werner_expectation(x_expectation(s, op), p));

  const int seeds = 1000, shots = 50;
  std::vector<double> mean(products.size(), 0.0);
  for (int k = 0; k < seeds; ++k) {
    NoiseParams noise{p, shots, static_cast<std::uint64_t>(k)};
    const auto est = sample_estimates(s, products, noise);
    for (std::size_t i = 0; i < est.size(); ++i) mean[i] += est[i];
  }
  for (std::size_t i = 0; i < mean.size(); ++i) {
    mean[i] /= seeds;
    const double se = 1.0 / std::sqrt(static_cast<double>(seeds * shots));
    CHECK(std::abs(mean[i] - ideal[i]) < 3.5 * se);
  }
}

TEST_CASE("products with equal support give identical estimates from one shot set") {
  const CodeSpec d3 = build_d3();
  SplitMix64 rng(55);
  SparseState s = logical_state(d3, PhaseVector::random(7, rng));
  std::vector<XProduct> twice = {stabilizer_products(d3)[2], stabilizer_products(d3)[2]};
  NoiseParams noise{0.1, 64, 3};
  const auto est = sample_estimates(s, twice, noise);
  CHECK(est[0] == est[1]);
}

TEST_CASE("wide registers are refused in shot mode") {
  const CodeSpec d7 = build_d7();
  SparseState s = logical_state(d7, PhaseVector::zeros(d7.phase_count()));
  NoiseParams noise{0.0, 10, 1};
  CHECK_THROWS_AS(sample_estimates(s, stabilizer_products(d7), noise), CapacityError);
}
