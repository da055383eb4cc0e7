#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "phaseopt/codes.hpp"
#include "phaseopt/expectations.hpp"
#include "phaseopt/optimizer.hpp"

namespace phaseopt {

struct ConvergenceStats {
  ObjectiveKind variant = ObjectiveKind::individual;
  int runs = 0;
  double threshold = 0.0;
  double mean_n = 0.0;
  double std_n = 0.0;
  int max_n = 0;
  int non_converged = 0;
  std::map<int, int> histogram;  // iterations -> run count
};

// Per-run callback: (run index, phases, report). Used by callers that write
// per-run tables or run extra invariant checks.
using RunSink = std::function<void(int, const PhaseVector&, const ConvergenceReport&)>;

// Convergence of the protocol over uniformly random phase configurations.
// Deterministic given `seed`; run r draws its phases from stream r.
inline ConvergenceStats monte_carlo_convergence(const CodeSpec& code, ObjectiveKind variant,
                                                int runs, const ScanPolicy& policy,
                                                std::uint64_t seed, const RunSink& sink = {}) {
  ScanPolicy p = policy;
  p.objective = variant;
  p.validate();

  ConvergenceStats stats;
  stats.variant = variant;
  stats.runs = runs;
  stats.threshold = p.threshold;

  SplitMix64 root(seed);
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < runs; ++r) {
    SplitMix64 stream = root.fork(static_cast<std::uint64_t>(r));
    PhaseVector phases = PhaseVector::random(code.phase_count(), stream);
    ConvergenceReport report = optimize(code, phases, NoiseParams{}, p);
    if (!report.converged) ++stats.non_converged;
    sum += report.iterations;
    sum_sq += static_cast<double>(report.iterations) * report.iterations;
    stats.max_n = std::max(stats.max_n, report.iterations);
    ++stats.histogram[report.iterations];
    if (sink) sink(r, phases, report);
  }
  stats.mean_n = sum / runs;
  stats.std_n = std::sqrt(std::max(0.0, sum_sq / runs - stats.mean_n * stats.mean_n));
  return stats;
}

struct SweepRow {
  double threshold = 0.0;
  DeltaMetric metric = DeltaMetric::delta1;
  double mean_n = 0.0;
  double std_n = 0.0;
  int max_n = 0;
  int non_converged = 0;
};

// Mean iterations versus convergence threshold, for both delta metrics.
// Common random phases across all thresholds, so each run's iteration count
// is monotone in the threshold by construction.
inline std::vector<SweepRow> threshold_sweep(const CodeSpec& code, ObjectiveKind variant,
                                             std::span<const double> thresholds, int runs,
                                             std::uint64_t seed) {
  std::vector<SweepRow> rows;
  for (DeltaMetric metric : {DeltaMetric::delta1, DeltaMetric::delta2}) {
    for (double threshold : thresholds) {
      ScanPolicy policy;
      policy.objective = variant;
      policy.threshold = threshold;
      policy.metric = metric;
      ConvergenceStats s = monte_carlo_convergence(code, variant, runs, policy, seed);
      rows.push_back({threshold, metric, s.mean_n, s.std_n, s.max_n, s.non_converged});
    }
  }
  return rows;
}

inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const double la = std::log10(lo), lb = std::log10(hi);
  for (int i = 0; i < count; ++i)
    out.push_back(std::pow(10.0, la + (lb - la) * i / (count - 1)));
  return out;
}

struct AmplitudeStudy {
  std::string code;
  long long samples = 0;
  double mean_amplitude = 0.0;
  double se_amplitude = 0.0;
  double mean_offset = 0.0;
  double se_offset = 0.0;
  // Heuristic pass count: gaining half the mean section amplitude per
  // coordinate step and starting from a zero-mean objective predicts
  // f_max / (mean_A / 2) coordinate steps, i.e. 2 / mean_A passes.
  double predicted_iterations = 0.0;
};

// Monte-Carlo mean of the true section amplitude and offset of the sum
// objective over uniform phases and frozen angles. Coordinates are cycled
// round-robin across samples.
inline AmplitudeStudy mean_amplitude_study(const CodeSpec& code, long long samples,
                                           std::uint64_t seed) {
  AmplitudeStudy study;
  study.code = code.name;
  study.samples = samples;

  const std::vector<int> coords = code.control_qubits();
  std::vector<std::size_t> all_products(code.phase_count());
  for (std::size_t i = 0; i < all_products.size(); ++i) all_products[i] = i;

  SplitMix64 root(seed);
  double sa = 0.0, sa2 = 0.0, sc = 0.0, sc2 = 0.0;
  for (long long i = 0; i < samples; ++i) {
    SplitMix64 stream = root.fork(static_cast<std::uint64_t>(i));
    PhaseVector phases = PhaseVector::random(code.phase_count(), stream);
    std::vector<std::pair<int, double>> angles;
    angles.reserve(coords.size());
    for (int q : coords) angles.emplace_back(q, kTwoPi * stream.next_double());
    ControlVector controls(std::move(angles));
    const int coordinate = coords[static_cast<std::size_t>(i % coords.size())];
    CosineSection s = section_of(code, all_products, phases, controls, coordinate);
    sa += s.amplitude;
    sa2 += s.amplitude * s.amplitude;
    sc += s.offset;
    sc2 += s.offset * s.offset;
  }
  const double n = static_cast<double>(samples);
  study.mean_amplitude = sa / n;
  study.se_amplitude = std::sqrt(std::max(0.0, sa2 / n - study.mean_amplitude * study.mean_amplitude) / n);
  study.mean_offset = sc / n;
  study.se_offset = std::sqrt(std::max(0.0, sc2 / n - study.mean_offset * study.mean_offset) / n);
  study.predicted_iterations = 2.0 / study.mean_amplitude;
  return study;
}

struct ExtremaReport {
  int samples = 0;
  long long section_checks = 0;
  long long gradient_checks = 0;
  long long lattice_checks = 0;
  long long grid_points = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

// Extremal-structure verification on the two-plaquette code. For each sampled
// phase configuration:
//   (a) every coordinate section matches its three-point cosine fit,
//   (b) the analytic gradient vanishes at the critical lattice,
//   (c) the objective at lattice points with k in {0,1}^3 takes only the
//       extremal values {3, -1},
//   (d) a full 3D grid search at step 2pi/400 (over one period [0, pi) per
//       axis) never exceeds 3.
inline ExtremaReport verify_extrema(int samples, std::uint64_t seed) {
  const CodeSpec code = two_plaquette_subcode();
  const std::vector<int> coords = code.control_qubits();
  std::vector<std::size_t> all_products(code.phase_count());
  for (std::size_t i = 0; i < all_products.size(); ++i) all_products[i] = i;

  ExtremaReport report;
  report.samples = samples;
  SplitMix64 root(seed);

  const double step = kTwoPi / 400.0;
  const int grid = 200;  // one period: pi / step

  for (int s = 0; s < samples; ++s) {
    SplitMix64 stream = root.fork(static_cast<std::uint64_t>(s));
    PhaseVector phases = PhaseVector::random(code.phase_count(), stream);

    // (a) single-frequency sections at random frozen angles
    std::vector<std::pair<int, double>> frozen;
    for (int q : coords) frozen.emplace_back(q, kTwoPi * stream.next_double());
    ControlVector controls(frozen);
    for (int q : coords) {
      CosineSection fit = section_of(code, all_products, phases, controls, q);
      for (int probe = 0; probe < 25; ++probe) {
        const double theta = kTwoPi * stream.next_double();
        ControlVector probe_controls = controls;
        probe_controls.set(q, theta);
        double direct = 0.0;
        for (std::size_t pid : all_products)
          direct += closed_form_expectation(code, pid, phases, probe_controls);
        ++report.section_checks;
        if (std::abs(fit.value(theta) - direct) > 1e-10) {
          std::ostringstream msg;
          msg << "section mismatch: sample " << s << " coordinate " << q << " theta " << theta
              << " fit " << fit.value(theta) << " direct " << direct;
          report.violations.push_back(msg.str());
        }
      }
    }

    // (b) + (c) critical lattice
    for (int k1 = 0; k1 <= 1; ++k1) {
      for (int k2 = 0; k2 <= 1; ++k2) {
        for (int k3 = 0; k3 <= 1; ++k3) {
          ControlVector theta_c = critical_points(phases, k1, k2, k3);
          const auto grad = gradient_f(phases, theta_c);
          ++report.gradient_checks;
          for (double g : grad) {
            if (std::abs(g) > 1e-10) {
              std::ostringstream msg;
              msg << "gradient not zero at lattice point: sample " << s << " k = (" << k1 << ","
                  << k2 << "," << k3 << ") grad " << g;
              report.violations.push_back(msg.str());
              break;
            }
          }
          const double f = sum_objective(code, phases, theta_c);
          ++report.lattice_checks;
          if (std::abs(f - 3.0) > 1e-10 && std::abs(f + 1.0) > 1e-10) {
            std::ostringstream msg;
            msg << "lattice value outside {3, -1}: sample " << s << " k = (" << k1 << "," << k2
                << "," << k3 << ") f " << f;
            report.violations.push_back(msg.str());
          }
        }
      }
    }

    // (d) grid search; the objective factorizes into three cosines, which
    // keeps the 200^3 sweep cheap.
    const double p1 = phases[0], p2 = phases[1], p3 = phases[2];
    std::vector<double> c1(grid), c2(grid), c3(grid);
    for (int i = 0; i < grid; ++i) {
      const double th = step * i;
      c1[i] = std::cos((-p1 + p2 + p3) / 2.0 + 2.0 * th);
      c2[i] = std::cos((p1 + p2 - p3) / 2.0 + 2.0 * th);
      c3[i] = std::cos((p1 - p2 + p3) / 2.0 + 2.0 * th);
    }
    double best = -4.0;
    for (int a = 0; a < grid; ++a)
      for (int b = 0; b < grid; ++b) {
        const double ab = c1[a] * c2[b];
        const double apb = c1[a] + c2[b];
        for (int c = 0; c < grid; ++c) {
          const double f = ab + c3[c] * apb;
          if (f > best) best = f;
        }
      }
    report.grid_points += static_cast<long long>(grid) * grid * grid;
    if (best > 3.0 + 1e-9) {
      std::ostringstream msg;
      msg << "grid search exceeded the global maximum: sample " << s << " best " << best;
      report.violations.push_back(msg.str());
    }
  }
  return report;
}

struct DofCount {
  std::string code;
  int max_locality = 0;
  std::map<int, long long> per_locality;  // subset size -> distinct subsets
  long long cumulative = 0;
  long long phases_required = 0;
  bool sufficient = false;
};

// Distinct nonempty qubit subsets of size <= max_locality contained in at
// least one plaquette (deduplicated across plaquettes), versus the number of
// relative phases the code carries.
inline DofCount count_quasi_local_dof(const CodeSpec& code, int max_locality = -1) {
  DofCount out;
  out.code = code.name;
  std::size_t largest = 0;
  for (const auto& p : code.plaquettes) largest = std::max(largest, p.size());
  out.max_locality = max_locality < 0 ? static_cast<int>(largest)
                                      : std::min<int>(max_locality, static_cast<int>(largest));

  std::set<std::uint64_t> seen;
  for (const auto& plaquette : code.plaquettes) {
    const int m = static_cast<int>(plaquette.size());
    for (std::uint64_t bits = 1; bits < (1ULL << m); ++bits) {
      if (std::popcount(bits) > out.max_locality) continue;
      std::uint64_t subset = 0;
      for (int j = 0; j < m; ++j)
        if (bits & (1ULL << j)) subset |= 1ULL << plaquette[static_cast<std::size_t>(j)];
      seen.insert(subset);
    }
  }
  for (std::uint64_t subset : seen) ++out.per_locality[std::popcount(subset)];
  for (const auto& [size, count] : out.per_locality) out.cumulative += count;
  out.phases_required = static_cast<long long>(code.phase_count());
  out.sufficient = out.cumulative >= out.phases_required;
  return out;
}

}  // namespace phaseopt
