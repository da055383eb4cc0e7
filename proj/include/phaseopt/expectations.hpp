#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "phaseopt/codes.hpp"
#include "phaseopt/sparse_state.hpp"

namespace phaseopt {

// g(theta) = amplitude * cos(2*theta + phase_offset) + offset, the shape of
// every stabilizer objective restricted to one compensation angle.
struct CosineSection {
  double amplitude = 0.0;
  double phase_offset = 0.0;
  double offset = 0.0;

  double value(double theta) const { return amplitude * std::cos(2.0 * theta + phase_offset) + offset; }

  // Angle in [0, pi) maximizing the section.
  double maximizer() const { return reduce_mod(-phase_offset, kTwoPi) / 2.0; }
};

// Exact three-point fit of a single-frequency section: probes at
// 2*theta in {0, pi/2, pi}.
inline CosineSection fit_section(const std::function<double(double)>& g) {
  const double g0 = g(0.0);
  const double g1 = g(std::numbers::pi / 4.0);
  const double g2 = g(std::numbers::pi / 2.0);
  CosineSection s;
  s.offset = 0.5 * (g0 + g2);
  const double a_cos = g0 - s.offset;
  const double a_sin = s.offset - g1;
  s.amplitude = std::hypot(a_cos, a_sin);
  s.phase_offset = s.amplitude > 0.0 ? std::atan2(a_sin, a_cos) : 0.0;
  return s;
}

inline bool has_closed_form(const CodeSpec& code) { return code.name == "d3" || code.name == "sub2"; }

namespace detail {

inline double cos2(double a, double b) { return 0.5 * (std::cos(a) + std::cos(b)); }
inline double cos4(double a, double b, double c, double d) {
  return 0.25 * (std::cos(a) + std::cos(b) + std::cos(c) + std::cos(d));
}

// Two-plaquette closed forms; compensation angles t1, t2, t5 act on qubits
// 1, 2, 5 (1-based).
inline double sub2_expectation(std::size_t product_id, const PhaseVector& p, double t1, double t2,
                               double t5) {
  switch (product_id) {
    case 0:  // S1
      return cos2(p[1] + 2.0 * (t1 + t2), p[0] - p[2] + 2.0 * (t2 - t1));
    case 1:  // S2
      return cos2(p[0] + 2.0 * (t2 + t5), p[1] - p[2] + 2.0 * (t2 - t5));
    case 2:  // S1S2
      return cos2(p[2] + 2.0 * (t1 + t5), p[0] - p[1] + 2.0 * (t5 - t1));
  }
  throw std::invalid_argument("sub2 product id out of range");
}

// Three-plaquette closed forms over all seven compensation angles.
inline double d3_expectation(std::size_t product_id, const PhaseVector& p,
                             const std::array<double, 7>& t) {
  const double t1 = t[0], t2 = t[1], t3 = t[2], t4 = t[3], t5 = t[4], t6 = t[5], t7 = t[6];
  switch (product_id) {
    case 0:  // S1
      return cos4(p[1] + 2.0 * (t1 + t2 + t3 + t4), p[0] - p[2] + 2.0 * (-t1 + t2 + t3 - t4),
                  p[3] - p[5] + 2.0 * (-t1 - t2 + t3 + t4), p[4] - p[6] + 2.0 * (-t1 + t2 - t3 + t4));
    case 1:  // S2
      return cos4(p[0] + 2.0 * (t2 + t3 + t5 + t6), p[1] - p[2] + 2.0 * (t2 + t3 - t5 - t6),
                  p[3] - p[4] + 2.0 * (-t2 + t3 - t5 + t6), p[5] - p[6] + 2.0 * (t2 - t3 - t5 + t6));
    case 2:  // S3
      return cos4(p[3] + 2.0 * (t3 + t4 + t6 + t7), p[0] - p[4] + 2.0 * (t3 - t4 + t6 - t7),
                  p[1] - p[5] + 2.0 * (t3 + t4 - t6 - t7), p[2] - p[6] + 2.0 * (-t3 + t4 + t6 - t7));
    case 3:  // S1S2
      return cos4(p[2] + 2.0 * (t1 + t4 + t5 + t6), p[0] - p[1] + 2.0 * (-t1 - t4 + t5 + t6),
                  p[3] - p[6] + 2.0 * (-t1 + t4 - t5 + t6), p[4] - p[5] + 2.0 * (-t1 + t4 + t5 - t6));
    case 4:  // S2S3
      return cos4(p[4] + 2.0 * (t2 + t4 + t5 + t7), p[0] - p[3] + 2.0 * (t2 - t4 + t5 - t7),
                  p[1] - p[6] + 2.0 * (t2 + t4 - t5 - t7), p[2] - p[5] + 2.0 * (-t2 + t4 + t5 - t7));
    case 5:  // S1S3
      return cos4(p[5] + 2.0 * (t1 + t2 + t6 + t7), p[0] - p[6] + 2.0 * (-t1 + t2 + t6 - t7),
                  p[1] - p[3] + 2.0 * (t1 + t2 - t6 - t7), p[2] - p[4] + 2.0 * (t1 - t2 + t6 - t7));
    case 6:  // S1S2S3
      return cos4(p[6] + 2.0 * (t1 + t3 + t5 + t7), p[0] - p[5] + 2.0 * (-t1 + t3 + t5 - t7),
                  p[1] - p[4] + 2.0 * (t1 + t3 - t5 - t7), p[2] - p[3] + 2.0 * (t1 - t3 + t5 - t7));
  }
  throw std::invalid_argument("d3 product id out of range");
}

}  // namespace detail

// Closed-form stabilizer-product expectation. Hand-derived forms exist for
// the two-plaquette sub-code and the 7-qubit code only.
inline double closed_form_expectation(const CodeSpec& code, std::size_t product_id,
                                      const PhaseVector& phases, const ControlVector& controls) {
  if (phases.size() != code.phase_count())
    throw std::invalid_argument("phase vector length does not match code");
  if (code.name == "sub2")
    return detail::sub2_expectation(product_id, phases, controls.angle(0), controls.angle(1),
                                    controls.angle(4));
  if (code.name == "d3") {
    std::array<double, 7> t{};
    for (int q = 0; q < 7; ++q) t[static_cast<std::size_t>(q)] = controls.angle(q);
    return detail::d3_expectation(product_id, phases, t);
  }
  throw CapacityError("no closed form for code '" + code.name + "'");
}

// Sparse-statevector route: build the phase-shifted logical state, apply the
// compensation rotations, take the X-product expectation.
inline double statevector_expectation(const CodeSpec& code, std::size_t product_id,
                                      const PhaseVector& phases, const ControlVector& controls) {
  SparseState rotated = apply_z_rotations(logical_state(code, phases), controls.entries());
  return x_expectation(rotated, XProduct{code.product_masks[product_id]});
}

// All product expectations at once (statevector route, one state build).
inline std::vector<double> statevector_expectations(const CodeSpec& code, const PhaseVector& phases,
                                                    const ControlVector& controls) {
  SparseState rotated = apply_z_rotations(logical_state(code, phases), controls.entries());
  std::vector<double> out;
  out.reserve(code.phase_count());
  for (std::uint64_t m : code.product_masks) out.push_back(x_expectation(rotated, XProduct{m}));
  return out;
}

inline double product_expectation(const CodeSpec& code, std::size_t product_id,
                                  const PhaseVector& phases, const ControlVector& controls) {
  if (has_closed_form(code)) return closed_form_expectation(code, product_id, phases, controls);
  return statevector_expectation(code, product_id, phases, controls);
}

// f(theta): sum of all 2^P - 1 stabilizer-product expectations.
inline double sum_objective(const CodeSpec& code, const PhaseVector& phases,
                            const ControlVector& controls) {
  double f = 0.0;
  if (has_closed_form(code)) {
    for (std::size_t i = 0; i < code.phase_count(); ++i)
      f += closed_form_expectation(code, i, phases, controls);
  } else {
    for (double v : statevector_expectations(code, phases, controls)) f += v;
  }
  return f;
}

// Exact cosine section of the summed expectations of `products` as a function
// of one control angle, all others frozen at their current values.
inline CosineSection section_of(const CodeSpec& code, std::span<const std::size_t> products,
                                const PhaseVector& phases, const ControlVector& controls,
                                int coordinate) {
  ControlVector probe = controls;
  return fit_section([&](double theta) {
    probe.set(coordinate, theta);
    double v = 0.0;
    for (std::size_t pid : products) v += product_expectation(code, pid, phases, probe);
    return v;
  });
}

// Gradient of the two-plaquette sum objective with respect to (t1, t2, t5).
inline std::array<double, 3> gradient_f(const PhaseVector& phases, const ControlVector& controls) {
  if (phases.size() != 3) throw std::invalid_argument("gradient_f is specific to the two-plaquette code");
  const double p1 = phases[0], p2 = phases[1], p3 = phases[2];
  const double t1 = controls.angle(0), t2 = controls.angle(1), t5 = controls.angle(4);
  return {
      -4.0 * std::cos(t2 + t5 + p1 / 2) * std::cos(t2 - t5 + (p2 - p3) / 2) *
          std::sin(2 * t1 - p1 / 2 + p2 / 2 + p3 / 2),
      -4.0 * std::cos(t1 + t5 + p3 / 2) * std::cos(t1 - t5 - p1 / 2 + p2 / 2) *
          std::sin(2 * t2 + p1 / 2 + p2 / 2 - p3 / 2),
      -4.0 * std::cos(t1 + t2 + p2 / 2) * std::cos(t1 - t2 - p1 / 2 + p3 / 2) *
          std::sin(2 * t5 + p1 / 2 - p2 / 2 + p3 / 2),
  };
}

// Maximum/minimum critical points of the two-plaquette sum objective:
// theta_c(k) on qubits (1, 2, 5).
inline ControlVector critical_points(const PhaseVector& phases, int k1, int k2, int k3) {
  if (phases.size() != 3)
    throw std::invalid_argument("critical_points is specific to the two-plaquette code");
  const double p1 = phases[0], p2 = phases[1], p3 = phases[2];
  const double h = std::numbers::pi / 2.0;
  return ControlVector({{0, (p1 - p2 - p3) / 4.0 + h * k1},
                        {1, (-p1 - p2 + p3) / 4.0 + h * k2},
                        {4, (-p1 + p2 - p3) / 4.0 + h * k3}});
}

}  // namespace phaseopt
