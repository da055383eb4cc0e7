#pragma once

#include <nlohmann/json.hpp>

#include "phaseopt/analysis.hpp"
#include "phaseopt/codes.hpp"
#include "phaseopt/optimizer.hpp"
#include "phaseopt/version.hpp"

namespace phaseopt {

using Json = nlohmann::ordered_json;

inline const char* to_string(ObjectiveKind k) {
  return k == ObjectiveKind::individual ? "individual" : "sum";
}
inline const char* to_string(DeltaMetric m) { return m == DeltaMetric::delta1 ? "delta1" : "delta2"; }
inline const char* to_string(ScanMode m) { return m == ScanMode::grid ? "grid" : "continuous"; }

inline Json to_json(const CodeSpec& code) {
  Json j;
  j["name"] = code.name;
  j["n_qubits"] = code.n_qubits;
  j["plaquettes"] = code.plaquettes;
  Json products = Json::array();
  for (std::size_t i = 0; i < code.product_masks.size(); ++i) {
    Json p;
    p["label"] = code.product_label(i);
    p["support"] = indices_from_mask(code.product_masks[i], code.n_qubits);
    products.push_back(std::move(p));
  }
  j["stabilizer_products"] = std::move(products);
  Json assignment = Json::array();
  for (const auto& [pid, q] : code.assignment) {
    Json a;
    a["product"] = code.product_label(static_cast<std::size_t>(pid));
    a["product_id"] = pid;
    a["control_qubit"] = q;
    assignment.push_back(std::move(a));
  }
  j["assignment"] = std::move(assignment);
  j["phase_count"] = code.phase_count();
  return j;
}

// Minimal custom-layout reader: n_qubits + plaquettes (+ optional assignment
// as [product_id, control_qubit] pairs; defaults to one control per single
// plaquette product, greedily distinct).
inline CodeSpec code_from_json(const Json& j) {
  const int n = j.at("n_qubits").get<int>();
  auto plaquettes = j.at("plaquettes").get<std::vector<std::vector<int>>>();
  std::vector<std::pair<int, int>> assignment;
  if (j.contains("assignment")) {
    for (const auto& a : j.at("assignment")) {
      if (a.is_array())
        assignment.emplace_back(a.at(0).get<int>(), a.at(1).get<int>());
      else
        assignment.emplace_back(a.at("product_id").get<int>(), a.at("control_qubit").get<int>());
    }
  } else {
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (std::size_t p = 0; p < plaquettes.size(); ++p) {
      for (int q : plaquettes[p]) {
        if (!used[static_cast<std::size_t>(q)]) {
          used[static_cast<std::size_t>(q)] = true;
          assignment.emplace_back(static_cast<int>(p), q);
          break;
        }
      }
    }
  }
  std::vector<int> gen_order(plaquettes.size());
  for (std::size_t i = 0; i < gen_order.size(); ++i) gen_order[i] = static_cast<int>(i);
  std::string name = j.contains("name") ? j.at("name").get<std::string>() : std::string("custom");
  return detail::assemble(std::move(name), n, std::move(plaquettes), std::move(gen_order),
                          std::move(assignment));
}

inline Json to_json(const ControlVector& theta) {
  Json j = Json::array();
  for (const auto& [q, v] : theta.entries()) {
    Json e;
    e["qubit"] = q;
    e["angle"] = v;
    j.push_back(std::move(e));
  }
  return j;
}

inline Json to_json(const CodeSpec& code, const ConvergenceReport& r) {
  Json j;
  j["objective"] = to_string(r.objective);
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["final_theta"] = to_json(r.final_theta);
  j["final_expectations"] = r.final_expectations;
  j["delta1_history"] = r.delta1_history;
  j["delta2_history"] = r.delta2_history;
  Json steps = Json::array();
  for (const StepRecord& s : r.trajectory) {
    Json e;
    e["pass"] = s.pass;
    e["product"] = code.product_label(s.product_id);
    e["coordinate"] = s.coordinate;
    e["angle"] = s.angle;
    e["objective_value"] = s.objective_value;
    e["delta1"] = s.delta1;
    e["delta2"] = s.delta2;
    e["degenerate"] = s.degenerate;
    steps.push_back(std::move(e));
  }
  j["trajectory"] = std::move(steps);
  return j;
}

inline Json to_json(const ConvergenceStats& s) {
  Json j;
  j["variant"] = to_string(s.variant);
  j["runs"] = s.runs;
  j["threshold"] = s.threshold;
  j["mean_n"] = s.mean_n;
  j["std_n"] = s.std_n;
  j["max_n"] = s.max_n;
  j["non_converged"] = s.non_converged;
  Json hist = Json::array();
  for (const auto& [n, count] : s.histogram) {
    Json e;
    e["n"] = n;
    e["runs"] = count;
    hist.push_back(std::move(e));
  }
  j["histogram"] = std::move(hist);
  return j;
}

inline Json to_json(const AmplitudeStudy& s) {
  Json j;
  j["code"] = s.code;
  j["samples"] = s.samples;
  j["mean_amplitude"] = s.mean_amplitude;
  j["se_amplitude"] = s.se_amplitude;
  j["mean_offset"] = s.mean_offset;
  j["se_offset"] = s.se_offset;
  j["predicted_iterations"] = s.predicted_iterations;
  return j;
}

inline Json to_json(const DofCount& d) {
  Json j;
  j["code"] = d.code;
  j["max_locality"] = d.max_locality;
  Json per = Json::array();
  for (const auto& [size, count] : d.per_locality) {
    Json e;
    e["locality"] = size;
    e["count"] = count;
    per.push_back(std::move(e));
  }
  j["per_locality"] = std::move(per);
  j["cumulative"] = d.cumulative;
  j["phases_required"] = d.phases_required;
  j["sufficient"] = d.sufficient;
  return j;
}

inline Json to_json(const ExtremaReport& r) {
  Json j;
  j["samples"] = r.samples;
  j["section_checks"] = r.section_checks;
  j["gradient_checks"] = r.gradient_checks;
  j["lattice_checks"] = r.lattice_checks;
  j["grid_points"] = r.grid_points;
  j["violations"] = r.violations;
  return j;
}

}  // namespace phaseopt
