#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "phaseopt/codes.hpp"
#include "phaseopt/expectations.hpp"
#include "phaseopt/measurement.hpp"

namespace phaseopt {

enum class ScanMode { grid, continuous };
enum class ObjectiveKind { individual, sum };
enum class DeltaMetric { delta1, delta2 };

struct ScanPolicy {
  ScanMode mode = ScanMode::continuous;
  double grid_step = kTwoPi / 10.0;
  ObjectiveKind objective = ObjectiveKind::individual;
  int max_iterations = 50;
  double threshold = 1e-3;
  // delta1 reproduces the reference convergence statistics for both variants;
  // delta2 is stricter per stabilizer and is the natural choice under noise.
  DeltaMetric metric = DeltaMetric::delta1;
  bool record_scan_points = false;  // keep per-step scan traces in the report

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be positive");
    if (threshold <= 0.0) throw std::invalid_argument("threshold must be positive");
    if (mode == ScanMode::grid) {
      const double n = kTwoPi / grid_step;
      if (std::abs(n - std::round(n)) > 1e-12)
        throw std::invalid_argument("grid_step must divide 2*pi");
    }
  }
};

struct ScanOutcome {
  double angle = 0.0;
  double amplitude = 0.0;
  bool degenerate = false;
};

// Global 1D maximization of an estimator over one compensation angle.
// Grid mode evaluates {0, step, ..., 2pi-step} and breaks ties toward the
// smallest angle; continuous mode fits the single-frequency section from
// three probes and returns its exact maximizer. Sections with amplitude
// below `amplitude_floor` are reported degenerate. `trace`, when given,
// receives the evaluated (angle, value) pairs.
inline ScanOutcome scan_coordinate(const std::function<double(double)>& estimator,
                                   const ScanPolicy& policy, double amplitude_floor,
                                   std::vector<std::pair<double, double>>* trace = nullptr) {
  ScanOutcome out;
  if (policy.mode == ScanMode::grid) {
    const int points = static_cast<int>(std::llround(kTwoPi / policy.grid_step));
    double best = -std::numeric_limits<double>::infinity();
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < points; ++i) {
      const double angle = policy.grid_step * i;
      const double v = estimator(angle);
      if (trace) trace->emplace_back(angle, v);
      if (v > best) {
        best = v;
        out.angle = angle;
      }
      worst = std::min(worst, v);
    }
    out.amplitude = 0.5 * (best - worst);
  } else {
    auto probed = [&](double theta) {
      const double v = estimator(theta);
      if (trace) trace->emplace_back(theta, v);
      return v;
    };
    const CosineSection s = fit_section(probed);
    out.amplitude = s.amplitude;
    out.angle = s.maximizer();
  }
  out.degenerate = out.amplitude < amplitude_floor;
  return out;
}

// Evaluates stabilizer estimates for the optimizer. The injected phases are
// private to the engine: the optimization loop sees estimates only. In
// sampled mode every evaluation draws a fresh shot set from a forked stream;
// all products share each shot set.
class EstimationEngine {
 public:
  EstimationEngine(const CodeSpec& code, PhaseVector phases, NoiseParams noise)
      : code_(code), phases_(std::move(phases)), noise_(noise), products_(stabilizer_products(code)) {
    noise_.validate();
    if (phases_.size() != code.phase_count())
      throw std::invalid_argument("phase vector length does not match code");
  }

  // Estimates of all stabilizer products at the given compensation angles.
  std::vector<double> evaluate_all(const ControlVector& controls) {
    if (noise_.analytic()) {
      std::vector<double> out;
      out.reserve(products_.size());
      if (has_closed_form(code_)) {
        for (std::size_t i = 0; i < products_.size(); ++i)
          out.push_back((1.0 - noise_.p) * closed_form_expectation(code_, i, phases_, controls));
      } else {
        for (double v : statevector_expectations(code_, phases_, controls))
          out.push_back((1.0 - noise_.p) * v);
      }
      return out;
    }
    SparseState rotated = apply_z_rotations(logical_state(code_, phases_), controls.entries());
    NoiseParams draw = noise_;
    draw.seed = SplitMix64(noise_.seed).fork(++evaluations_).seed();
    return sample_estimates(rotated, products_, draw);
  }

  double evaluate_product(std::size_t product_id, const ControlVector& controls) {
    if (noise_.analytic() && has_closed_form(code_))
      return (1.0 - noise_.p) * closed_form_expectation(code_, product_id, phases_, controls);
    return evaluate_all(controls)[product_id];
  }

  double evaluate_sum(const ControlVector& controls) {
    double f = 0.0;
    for (double v : evaluate_all(controls)) f += v;
    return f;
  }

  // Smallest section amplitude still treated as a real signal. Analytic
  // estimates scale by (1 - p), so the floor scales with them, keeping the
  // scan decisions independent of p. Sampled mode uses two standard errors
  // of a parity mean.
  double amplitude_floor() const {
    if (noise_.analytic()) return 1e-9 * (1.0 - noise_.p);
    return 2.0 / std::sqrt(static_cast<double>(*noise_.shots));
  }

  bool sampled() const { return !noise_.analytic(); }
  double noise_p() const { return noise_.p; }
  const CodeSpec& code() const { return code_; }

 private:
  const CodeSpec& code_;
  PhaseVector phases_;
  NoiseParams noise_;
  std::vector<XProduct> products_;
  std::uint64_t evaluations_ = 0;
};

struct StepRecord {
  int pass = 0;
  int coordinate = 0;
  std::size_t product_id = 0;   // scanned objective (ignored for sum)
  double angle = 0.0;
  double objective_value = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  bool degenerate = false;
  ControlVector theta;          // snapshot after the step
  std::vector<std::pair<double, double>> scan_points;  // when recording is on
};

struct ConvergenceReport {
  int iterations = 0;           // completed or partially completed passes
  bool converged = false;
  ObjectiveKind objective = ObjectiveKind::individual;
  std::vector<StepRecord> trajectory;
  std::vector<double> delta1_history;  // one entry per pass (value at pass end or early stop)
  std::vector<double> delta2_history;
  std::vector<double> final_expectations;
  ControlVector final_theta;
};

namespace detail {

struct DeltaState {
  double delta1 = 0.0;
  double delta2 = 0.0;
  std::deque<double> trail1, trail2;

  void update(const std::vector<double>& estimates, double f_max, double s_max, bool use_trailing) {
    double f = 0.0, worst = 0.0;
    for (double e : estimates) {
      f += e;
      worst = std::max(worst, std::abs(e - s_max));
    }
    const double d1 = std::abs(f - f_max);
    const double d2 = worst;
    if (use_trailing) {
      auto push = [](std::deque<double>& t, double v) {
        t.push_back(v);
        if (t.size() > 3) t.pop_front();
      };
      push(trail1, d1);
      push(trail2, d2);
      auto avg = [](const std::deque<double>& t) {
        double s = 0.0;
        for (double v : t) s += v;
        return s / static_cast<double>(t.size());
      };
      delta1 = avg(trail1);
      delta2 = avg(trail2);
    } else {
      delta1 = d1;
      delta2 = d2;
    }
  }

  double metric(DeltaMetric m) const { return m == DeltaMetric::delta1 ? delta1 : delta2; }
};

}  // namespace detail

// The iterative protocol: cycle over the assignment, globally maximizing one
// coordinate at a time; the individual variant maximizes the assigned
// product's estimate, the sum variant maximizes f. Convergence is declared
// when the chosen delta metric drops below the threshold (checked after
// every coordinate step; a mid-pass stop still counts the current pass).
inline ConvergenceReport optimize(const CodeSpec& code, const PhaseVector& phases,
                                  const NoiseParams& noise, const ScanPolicy& policy,
                                  const ControlVector* initial = nullptr) {
  policy.validate();
  if (code.assignment.empty()) throw std::invalid_argument("code has no assignment");

  EstimationEngine engine(code, phases, noise);
  const std::vector<int> coords = code.control_qubits();
  ControlVector theta = initial ? *initial : ControlVector::zeros(coords);

  ConvergenceReport report;
  report.objective = policy.objective;

  const double f_max = static_cast<double>(code.phase_count());
  const double s_max = 1.0 - noise.p;
  const double floor = engine.amplitude_floor();
  detail::DeltaState delta;

  for (int pass = 1; pass <= policy.max_iterations; ++pass) {
    for (const auto& [product_id, coordinate] : code.assignment) {
      auto estimator = [&](double angle) {
        ControlVector probe = theta;
        probe.set(coordinate, angle);
        return policy.objective == ObjectiveKind::individual
                   ? engine.evaluate_product(static_cast<std::size_t>(product_id), probe)
                   : engine.evaluate_sum(probe);
      };
      std::vector<std::pair<double, double>> scan_trace;
      const ScanOutcome scan = scan_coordinate(
          estimator, policy, floor, policy.record_scan_points ? &scan_trace : nullptr);
      if (!scan.degenerate) theta.set(coordinate, scan.angle);

      const std::vector<double> estimates = engine.evaluate_all(theta);
      delta.update(estimates, f_max, s_max, engine.sampled());

      StepRecord step;
      step.pass = pass;
      step.coordinate = coordinate;
      step.product_id = static_cast<std::size_t>(product_id);
      step.angle = theta.angle(coordinate);
      step.degenerate = scan.degenerate;
      if (policy.objective == ObjectiveKind::individual) {
        step.objective_value = estimates[static_cast<std::size_t>(product_id)];
      } else {
        double f = 0.0;
        for (double e : estimates) f += e;
        step.objective_value = f;
      }
      step.delta1 = delta.delta1;
      step.delta2 = delta.delta2;
      step.theta = theta;
      step.scan_points = std::move(scan_trace);
      report.trajectory.push_back(std::move(step));

      if (delta.metric(policy.metric) < policy.threshold) {
        report.iterations = pass;
        report.converged = true;
        report.delta1_history.push_back(delta.delta1);
        report.delta2_history.push_back(delta.delta2);
        report.final_expectations = estimates;
        report.final_theta = theta;
        return report;
      }
    }
    report.delta1_history.push_back(delta.delta1);
    report.delta2_history.push_back(delta.delta2);
  }

  report.iterations = policy.max_iterations;
  report.converged = false;
  report.final_expectations = engine.evaluate_all(theta);
  report.final_theta = theta;
  return report;
}

}  // namespace phaseopt
