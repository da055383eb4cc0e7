// Minimal library walkthrough: inject unknown phases into the encoded state,
// run the iterative compensation protocol, and print the recovery.

#include <cstdio>

#include "phaseopt/analysis.hpp"

using namespace phaseopt;

int main() {
  const CodeSpec code = build_d3();
  SplitMix64 rng(2024);
  const PhaseVector hidden = PhaseVector::random(code.phase_count(), rng);

  std::printf("hidden phases:");
  for (double v : hidden.values()) std::printf(" %.3f", v);
  std::printf("\n");

  ScanPolicy policy;  // continuous scans, individual objective
  const ConvergenceReport report = optimize(code, hidden, NoiseParams{}, policy);

  std::printf("%s after %d pass(es)\n", report.converged ? "converged" : "stopped",
              report.iterations);
  std::printf("final stabilizer expectations:");
  for (double e : report.final_expectations) std::printf(" %.6f", e);
  std::printf("\ncompensation angles:");
  for (const auto& [qubit, angle] : report.final_theta.entries())
    std::printf(" theta_%d = %.6f", qubit + 1, angle);
  std::printf("\n");

  const DofCount dof = count_quasi_local_dof(build_d5());
  std::printf("17-qubit code: %lld quasi-local rotations for %lld phases (%s)\n", dof.cumulative,
              dof.phases_required, dof.sufficient ? "sufficient" : "insufficient");
  return report.converged ? 0 : 1;
}
