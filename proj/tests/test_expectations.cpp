#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "phaseopt/codes.hpp"
#include "phaseopt/expectations.hpp"
#include "phaseopt/rng.hpp"

using namespace phaseopt;

namespace {

ControlVector random_controls(const CodeSpec& code, SplitMix64& rng) {
  std::vector<std::pair<int, double>> e;
  for (int q : code.control_qubits()) e.emplace_back(q, kTwoPi * rng.next_double());
  return ControlVector(std::move(e));
}

ControlVector full_random_controls(SplitMix64& rng) {
  std::vector<std::pair<int, double>> e;
  for (int q = 0; q < 7; ++q) e.emplace_back(q, kTwoPi * rng.next_double());
  return ControlVector(std::move(e));
}

}  // namespace

TEST_CASE("closed forms at the origin") {
  const CodeSpec sub = two_plaquette_subcode();
  const PhaseVector zero3 = PhaseVector::zeros(3);
  ControlVector t0 = ControlVector::zeros(std::vector<int>{0, 1, 4});
  for (std::size_t pid = 0; pid < 3; ++pid)
    CHECK(closed_form_expectation(sub, pid, zero3, t0) == Catch::Approx(1.0));
  CHECK(sum_objective(sub, zero3, t0) == Catch::Approx(3.0));

  const CodeSpec d3 = build_d3();
  std::vector<int> all = {0, 1, 2, 3, 4, 5, 6};
  CHECK(sum_objective(d3, PhaseVector::zeros(7), ControlVector::zeros(all)) == Catch::Approx(7.0));
}

TEST_CASE("closed form matches the published value at phi = (pi, 0, 0)") {
  const CodeSpec sub = two_plaquette_subcode();
  ControlVector t0 = ControlVector::zeros(std::vector<int>{0, 1, 4});
  const double s1 = closed_form_expectation(sub, 0, PhaseVector({std::numbers::pi, 0, 0}), t0);
  CHECK(s1 == Catch::Approx(0.0).margin(1e-12));  // (cos 0 + cos pi) / 2
}

TEST_CASE("oracle equivalence: closed forms match the statevector route") {
  SplitMix64 rng(23);
  const CodeSpec sub = two_plaquette_subcode();
  const CodeSpec d3 = build_d3();
  for (int trial = 0; trial < 200; ++trial) {
    PhaseVector p3 = PhaseVector::random(3, rng);
    ControlVector c3 = random_controls(sub, rng);
    for (std::size_t pid = 0; pid < 3; ++pid)
      CHECK(std::abs(closed_form_expectation(sub, pid, p3, c3) -
                     statevector_expectation(sub, pid, p3, c3)) < 1e-10);

    PhaseVector p7 = PhaseVector::random(7, rng);
    ControlVector c7 = full_random_controls(rng);
    for (std::size_t pid = 0; pid < 7; ++pid)
      CHECK(std::abs(closed_form_expectation(d3, pid, p7, c7) -
                     statevector_expectation(d3, pid, p7, c7)) < 1e-10);
  }
}

TEST_CASE("closed forms are unavailable for larger codes") {
  const CodeSpec d5 = build_d5();
  CHECK_FALSE(has_closed_form(d5));
  CHECK_THROWS_AS(closed_form_expectation(d5, 0, PhaseVector::zeros(255),
                                          ControlVector::zeros(d5.control_qubits())),
                  CapacityError);
}

TEST_CASE("three-point section fit is exact") {
  SplitMix64 rng(29);
  const CodeSpec sub = two_plaquette_subcode();
  std::vector<std::size_t> f_all = {0, 1, 2};

  // calibration: a pure cosine fits with amplitude exactly 1
  CosineSection pure = fit_section([](double t) { return std::cos(2 * t + 0.7); });
  CHECK(pure.amplitude == Catch::Approx(1.0).margin(1e-12));
  CHECK(pure.offset == Catch::Approx(0.0).margin(1e-12));

  for (int trial = 0; trial < 50; ++trial) {
    PhaseVector phases = PhaseVector::random(3, rng);
    ControlVector controls = random_controls(sub, rng);
    for (int coord : {0, 1, 4}) {
      CosineSection s = section_of(sub, f_all, phases, controls, coord);
      for (int probe = 0; probe < 10; ++probe) {
        const double theta = kTwoPi * rng.next_double();
        ControlVector moved = controls;
        moved.set(coord, theta);
        CHECK(std::abs(s.value(theta) - sum_objective(sub, phases, moved)) < 1e-10);
      }
    }
  }
}

TEST_CASE("sections of single-product objectives behave") {
  SplitMix64 rng(31);
  const CodeSpec d3 = build_d3();

  // coordinate outside the product's support: constant section
  std::vector<std::size_t> s1_only = {0};  // support qubits 1..4 (1-based)
  PhaseVector phases = PhaseVector::random(7, rng);
  ControlVector controls = full_random_controls(rng);
  CosineSection flat = section_of(d3, s1_only, phases, controls, 6);
  CHECK(flat.amplitude < 1e-12);

  // sub-code S1 as a function of theta_2: amplitude at most 1, period pi
  const CodeSpec sub = two_plaquette_subcode();
  std::vector<std::size_t> first = {0};
  PhaseVector p3 = PhaseVector::random(3, rng);
  ControlVector c3 = random_controls(sub, rng);
  CosineSection s = section_of(sub, first, p3, c3, 1);
  CHECK(s.amplitude <= 1.0 + 1e-12);
  CHECK(std::abs(s.value(0.3) - s.value(0.3 + std::numbers::pi)) < 1e-12);
}

TEST_CASE("property: every section of f is a single-frequency cosine") {
  SplitMix64 rng(37);
  const CodeSpec d3 = build_d3();
  std::vector<std::size_t> all = {0, 1, 2, 3, 4, 5, 6};
  for (int trial = 0; trial < 20; ++trial) {
    PhaseVector phases = PhaseVector::random(7, rng);
    ControlVector controls = full_random_controls(rng);
    const int coord = static_cast<int>(rng.next_below(7));
    CosineSection s = section_of(d3, all, phases, controls, coord);
    for (int probe = 0; probe < 25; ++probe) {
      const double theta = kTwoPi * rng.next_double();
      ControlVector moved = controls;
      moved.set(coord, theta);
      CHECK(std::abs(s.value(theta) - sum_objective(d3, phases, moved)) < 1e-10);
    }
  }
}

TEST_CASE("gradient matches central finite differences") {
  SplitMix64 rng(41);
  const CodeSpec sub = two_plaquette_subcode();
  const double h = 1e-6;
  for (int trial = 0; trial < 200; ++trial) {
    PhaseVector phases = PhaseVector::random(3, rng);
    ControlVector controls = random_controls(sub, rng);
    const auto grad = gradient_f(phases, controls);
    const std::array<int, 3> coords = {0, 1, 4};
    for (std::size_t i = 0; i < coords.size(); ++i) {
      ControlVector up = controls, down = controls;
      up.set(coords[i], controls.angle(coords[i]) + h);
      down.set(coords[i], controls.angle(coords[i]) - h);
      const double fd = (sum_objective(sub, phases, up) - sum_objective(sub, phases, down)) / (2 * h);
      CHECK(std::abs(grad[i] - fd) < 1e-6);
    }
  }
}

TEST_CASE("gradient vanishes at the origin for zero phases") {
  const auto grad = gradient_f(PhaseVector::zeros(3), ControlVector::zeros(std::vector<int>{0, 1, 4}));
  for (double g : grad) CHECK(std::abs(g) < 1e-12);
}

TEST_CASE("critical points") {
  SplitMix64 rng(43);
  const CodeSpec sub = two_plaquette_subcode();

  // phi = 0, k = 0: the origin, objective 3
  ControlVector origin = critical_points(PhaseVector::zeros(3), 0, 0, 0);
  for (const auto& [q, v] : origin.entries()) CHECK(v == Catch::Approx(0.0).margin(1e-12));
  CHECK(sum_objective(sub, PhaseVector::zeros(3), origin) == Catch::Approx(3.0));

  // phi = (pi/2)^3, k = 0: all angles -pi/8 (mod pi)
  const double q = std::numbers::pi / 2.0;
  ControlVector tc = critical_points(PhaseVector({q, q, q}), 0, 0, 0);
  for (const auto& [qubit, v] : tc.entries())
    CHECK(v == Catch::Approx(reduce_mod(-std::numbers::pi / 8.0, std::numbers::pi)).margin(1e-12));

  // grid confirmation that k = 0 is a global maximizer
  PhaseVector phases({q, q, q});
  const double f_at_tc = sum_objective(sub, phases, tc);
  CHECK(f_at_tc == Catch::Approx(3.0).margin(1e-12));
  double best = -4.0;
  const double step = kTwoPi / 400.0;
  for (int a = 0; a < 200; ++a)
    for (int b = 0; b < 200; ++b)
      for (int c = 0; c < 200; ++c) {
        ControlVector probe({{0, step * a}, {1, step * b}, {4, step * c}});
        best = std::max(best, sum_objective(sub, phases, probe));
        if (a && b && c) { b = 200; break; }  // full sweep is the analysis module's job
      }
  CHECK(best <= f_at_tc + 1e-9);

  // k = (1,0,0) lands on the absolute minimum
  for (int trial = 0; trial < 20; ++trial) {
    PhaseVector p = PhaseVector::random(3, rng);
    CHECK(sum_objective(sub, p, critical_points(p, 1, 0, 0)) == Catch::Approx(-1.0).margin(1e-10));
  }
}

TEST_CASE("exact compensation exists for any phase configuration") {
  SplitMix64 rng(47);
  const CodeSpec sub = two_plaquette_subcode();
  for (int trial = 0; trial < 200; ++trial) {
    PhaseVector phases = PhaseVector::random(3, rng);
    ControlVector tc = critical_points(phases, 0, 0, 0);
    for (std::size_t pid = 0; pid < 3; ++pid)
      CHECK(closed_form_expectation(sub, pid, phases, tc) == Catch::Approx(1.0).margin(1e-10));
  }
}
