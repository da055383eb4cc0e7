// Command-line front end: simulation of the iterative phase-compensation
// protocol, Monte-Carlo convergence campaigns, quasi-local DOF counting and
// verification sweeps. All stochastic commands are reproducible from an
// explicit seed; output files echo the full configuration.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "phaseopt/analysis.hpp"
#include "phaseopt/serialize.hpp"
#include "phaseopt/version.hpp"

namespace {

using namespace phaseopt;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitVerifyFailed = 3;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CommonOpts {
  std::string code = "d3";
  std::string code_file;
  std::string config_file;
  std::string output_json;
  std::string output_csv;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

CodeSpec load_code(const CommonOpts& c) {
  if (!c.code_file.empty()) {
    std::ifstream in(c.code_file);
    if (!in) throw CLI::ValidationError("--code-file", "cannot open " + c.code_file);
    Json j = Json::parse(in);
    return code_from_json(j);
  }
  return build_code(c.code);
}

Json config_echo(const CLI::App* cmd) {
  Json j;
  for (const CLI::Option* opt : cmd->get_options()) {
    const std::string name = opt->get_name();
    if (name.empty() || name == "--help") continue;
    if (opt->count() == 0 && opt->get_default_str().empty()) continue;
    const std::string value = opt->count() ? opt->results().back() : opt->get_default_str();
    j[name.substr(name.find_first_not_of('-'))] = value;
  }
  return j;
}

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CLI::ValidationError("output", "cannot write " + path);
  out << body;
}

std::string csv_header(const std::string& command, const Json& config, std::uint64_t seed) {
  std::ostringstream h;
  h << "# phaseopt " << kVersion << " schema " << kSchemaVersion << "\n";
  h << "# command: " << command << "\n";
  h << "# config: " << config.dump() << "\n";
  h << "# seed: " << seed << "\n";
  return h.str();
}

Json json_meta(const std::string& command, const Json& config, std::uint64_t seed) {
  Json m;
  m["tool"] = "phaseopt";
  m["version"] = kVersion;
  m["schema"] = kSchemaVersion;
  m["command"] = command;
  m["config"] = config;
  m["seed"] = seed;
  return m;
}

std::vector<double> parse_phase_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    out.push_back(std::stod(item, &used));
    if (used != item.size()) throw CLI::ValidationError("--phases", "bad number '" + item + "'");
  }
  return out;
}

// optimize ------------------------------------------------------------------

int cmd_optimize(const CommonOpts& common, const std::string& phases_text, bool random_phases,
                 const std::string& mode, int shots, double noise_p, const std::string& scan,
                 double grid_step, const std::string& objective, int max_iterations,
                 double threshold, const std::string& metric, const CLI::App* cmd) {
  const CodeSpec code = load_code(common);

  if (phases_text.empty() && !random_phases)
    throw CLI::ValidationError("--phases", "supply --phases or --random-phases");
  if ((random_phases || mode == "sampled") && !common.seed_given)
    throw CLI::ValidationError("--seed", "stochastic settings need an explicit seed");

  PhaseVector phases;
  if (random_phases) {
    SplitMix64 rng(common.seed);
    phases = PhaseVector::random(code.phase_count(), rng);
  } else {
    auto values = parse_phase_list(phases_text);
    if (values.size() != code.phase_count())
      throw CLI::ValidationError("--phases", "expected " + std::to_string(code.phase_count()) +
                                                 " values, got " + std::to_string(values.size()));
    phases = PhaseVector(std::move(values));
  }

  NoiseParams noise;
  noise.p = noise_p;
  noise.seed = common.seed;
  if (mode == "sampled") noise.shots = shots;

  ScanPolicy policy;
  policy.mode = scan == "grid" ? ScanMode::grid : ScanMode::continuous;
  policy.grid_step = grid_step;
  policy.objective = objective == "sum" ? ObjectiveKind::sum : ObjectiveKind::individual;
  policy.max_iterations = max_iterations;
  policy.threshold = threshold;
  policy.metric = metric == "delta2" ? DeltaMetric::delta2 : DeltaMetric::delta1;
  policy.record_scan_points = true;

  const ConvergenceReport report = optimize(code, phases, noise, policy);

  const Json config = config_echo(cmd);
  Json out;
  out["meta"] = json_meta("optimize", config, common.seed);
  out["code"] = code.name;
  out["phases"] = phases.values();
  out["report"] = to_json(code, report);
  if (!common.output_json.empty()) write_text(common.output_json, out.dump(2) + "\n");

  if (!common.output_csv.empty()) {
    std::ostringstream csv;
    csv << csv_header("optimize", config, common.seed);
    csv << "pass,step,product,coordinate,kind,angle,value\n";
    int index = 0;
    for (const StepRecord& s : report.trajectory) {
      for (const auto& [angle, value] : s.scan_points)
        csv << s.pass << ',' << index << ',' << code.product_label(s.product_id) << ','
            << s.coordinate << ",scan," << fmt(angle) << ',' << fmt(value) << "\n";
      csv << s.pass << ',' << index << ',' << code.product_label(s.product_id) << ','
          << s.coordinate << ",chosen," << fmt(s.angle) << ',' << fmt(s.objective_value) << "\n";
      ++index;
    }
    write_text(common.output_csv, csv.str());
  }

  std::cout << "code " << code.name << ": " << (report.converged ? "converged" : "not converged")
            << " after n = " << report.iterations << " pass(es)\n";
  std::cout << "final expectations:";
  for (double e : report.final_expectations) std::cout << ' ' << fmt(e);
  std::cout << "\nfinal theta:";
  for (const auto& [q, v] : report.final_theta.entries())
    std::cout << " q" << q + 1 << "=" << fmt(v);
  std::cout << "\n";
  return report.converged ? kExitOk : kExitNotConverged;
}

// convergence ---------------------------------------------------------------

int cmd_convergence(const CommonOpts& common, const std::string& variant, int runs,
                    const std::string& sweep, double threshold, const std::string& metric,
                    const std::string& scan, double grid_step, int max_iterations,
                    const CLI::App* cmd) {
  if (!common.seed_given) throw CLI::ValidationError("--seed", "convergence campaigns need a seed");
  const CodeSpec code = load_code(common);
  const ObjectiveKind kind = variant == "sum" ? ObjectiveKind::sum : ObjectiveKind::individual;

  ScanPolicy policy;
  policy.mode = scan == "grid" ? ScanMode::grid : ScanMode::continuous;
  policy.grid_step = grid_step;
  policy.threshold = threshold;
  policy.max_iterations = max_iterations;
  policy.metric = metric == "delta2" ? DeltaMetric::delta2 : DeltaMetric::delta1;

  const Json config = config_echo(cmd);

  if (!sweep.empty()) {
    double lo = 0, hi = 0;
    int count = 0;
    if (std::sscanf(sweep.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1 || lo <= 0 ||
        hi < lo)
      throw CLI::ValidationError("--sweep", "expected lo:hi:count with 0 < lo <= hi");
    const std::vector<double> thresholds = log_spaced(lo, hi, count);
    const auto rows = threshold_sweep(code, kind, thresholds, runs, common.seed);

    std::ostringstream csv;
    csv << csv_header("convergence-sweep", config, common.seed);
    csv << "metric,threshold,mean_n,std_n,max_n,non_converged,runs\n";
    for (const SweepRow& r : rows)
      csv << to_string(r.metric) << ',' << fmt(r.threshold) << ',' << fmt(r.mean_n) << ','
          << fmt(r.std_n) << ',' << r.max_n << ',' << r.non_converged << ',' << runs << "\n";
    if (!common.output_csv.empty()) write_text(common.output_csv, csv.str());

    Json out;
    out["meta"] = json_meta("convergence-sweep", config, common.seed);
    Json jrows = Json::array();
    for (const SweepRow& r : rows) {
      Json e;
      e["metric"] = to_string(r.metric);
      e["threshold"] = r.threshold;
      e["mean_n"] = r.mean_n;
      e["std_n"] = r.std_n;
      e["max_n"] = r.max_n;
      e["non_converged"] = r.non_converged;
      jrows.push_back(std::move(e));
    }
    out["rows"] = std::move(jrows);
    if (!common.output_json.empty()) write_text(common.output_json, out.dump(2) + "\n");

    std::cout << "threshold sweep over " << thresholds.size() << " points, " << runs
              << " runs each:\n";
    for (const SweepRow& r : rows)
      std::cout << "  " << to_string(r.metric) << " @ " << fmt(r.threshold)
                << ": mean n = " << fmt(r.mean_n) << "\n";
    return kExitOk;
  }

  std::ostringstream per_run;
  per_run << csv_header("convergence", config, common.seed);
  per_run << "run,n,converged,delta1,delta2\n";
  RunSink sink = [&](int run, const PhaseVector&, const ConvergenceReport& r) {
    per_run << run << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
            << fmt(r.delta1_history.empty() ? 0.0 : r.delta1_history.back()) << ','
            << fmt(r.delta2_history.empty() ? 0.0 : r.delta2_history.back()) << "\n";
  };
  const ConvergenceStats stats =
      monte_carlo_convergence(code, kind, runs, policy, common.seed, sink);
  if (!common.output_csv.empty()) write_text(common.output_csv, per_run.str());

  Json out;
  out["meta"] = json_meta("convergence", config, common.seed);
  out["stats"] = to_json(stats);
  if (!common.output_json.empty()) write_text(common.output_json, out.dump(2) + "\n");

  std::cout << "code " << code.name << " variant " << to_string(stats.variant) << ": mean n = "
            << fmt(stats.mean_n) << ", std = " << fmt(stats.std_n) << ", max = " << stats.max_n
            << ", non-converged = " << stats.non_converged << " of " << stats.runs << "\n";
  return kExitOk;
}

// count-dof -----------------------------------------------------------------

int cmd_count_dof(const CommonOpts& common, int max_locality, const CLI::App* cmd) {
  const CodeSpec code = load_code(common);
  const DofCount dof = count_quasi_local_dof(code, max_locality);

  const Json config = config_echo(cmd);
  if (!common.output_csv.empty()) {
    std::ostringstream csv;
    csv << csv_header("count-dof", config, common.seed);
    csv << "locality,count,cumulative\n";
    long long running = 0;
    for (const auto& [size, count] : dof.per_locality) {
      running += count;
      csv << size << ',' << count << ',' << running << "\n";
    }
    write_text(common.output_csv, csv.str());
  }
  if (!common.output_json.empty()) {
    Json out;
    out["meta"] = json_meta("count-dof", config, common.seed);
    out["dof"] = to_json(dof);
    write_text(common.output_json, out.dump(2) + "\n");
  }

  std::cout << "code " << code.name << " quasi-local rotations up to locality " << dof.max_locality
            << ":\n";
  long long running = 0;
  for (const auto& [size, count] : dof.per_locality) {
    running += count;
    std::cout << "  " << size << "-local: " << count << " (cumulative " << running << ")\n";
  }
  std::cout << "cumulative: " << dof.cumulative << "\n";
  std::cout << "phases required: " << dof.phases_required << "\n";
  std::cout << "verdict: " << (dof.sufficient ? "sufficient" : "insufficient") << "\n";
  return kExitOk;
}

// verify ----------------------------------------------------------------------

int cmd_verify(const CommonOpts& common, int samples, int oracle_trials, const CLI::App* cmd) {
  const Json config = config_echo(cmd);
  std::vector<std::string> violations;

  // extrema structure on the two-plaquette code
  const ExtremaReport extrema = verify_extrema(samples, common.seed);
  violations.insert(violations.end(), extrema.violations.begin(), extrema.violations.end());

  // closed form versus statevector oracle
  SplitMix64 rng(common.seed ^ 0x5eedULL);
  const CodeSpec sub = two_plaquette_subcode();
  const CodeSpec d3 = build_d3();
  for (int trial = 0; trial < oracle_trials; ++trial) {
    for (const CodeSpec* code : {&sub, &d3}) {
      PhaseVector phases = PhaseVector::random(code->phase_count(), rng);
      std::vector<std::pair<int, double>> angles;
      for (int q : code->control_qubits()) angles.emplace_back(q, kTwoPi * rng.next_double());
      ControlVector controls(std::move(angles));
      for (std::size_t pid = 0; pid < code->phase_count(); ++pid) {
        const double closed = closed_form_expectation(*code, pid, phases, controls);
        const double oracle = statevector_expectation(*code, pid, phases, controls);
        if (std::abs(closed - oracle) > 1e-10) {
          std::ostringstream msg;
          msg << "oracle mismatch: code " << code->name << " product "
              << code->product_label(pid) << " closed " << closed << " oracle " << oracle;
          violations.push_back(msg.str());
        }
      }
    }
  }

  // analytic gradient versus finite differences
  for (int trial = 0; trial < oracle_trials; ++trial) {
    PhaseVector phases = PhaseVector::random(3, rng);
    std::vector<std::pair<int, double>> angles;
    for (int q : sub.control_qubits()) angles.emplace_back(q, kTwoPi * rng.next_double());
    ControlVector controls(std::move(angles));
    const auto grad = gradient_f(phases, controls);
    const int coords[3] = {0, 1, 4};
    for (int i = 0; i < 3; ++i) {
      ControlVector up = controls, down = controls;
      const double h = 1e-6;
      up.set(coords[i], controls.angle(coords[i]) + h);
      down.set(coords[i], controls.angle(coords[i]) - h);
      const double fd = (sum_objective(sub, phases, up) - sum_objective(sub, phases, down)) / (2 * h);
      if (std::abs(grad[static_cast<std::size_t>(i)] - fd) > 1e-6) {
        std::ostringstream msg;
        msg << "gradient mismatch: component " << i << " analytic "
            << grad[static_cast<std::size_t>(i)] << " finite-difference " << fd;
        violations.push_back(msg.str());
      }
    }
  }

  Json out;
  out["meta"] = json_meta("verify", config, common.seed);
  out["extrema"] = to_json(extrema);
  out["violations"] = violations;
  if (!common.output_json.empty()) write_text(common.output_json, out.dump(2) + "\n");

  if (!violations.empty()) {
    std::cout << "verification FAILED with " << violations.size() << " violation(s):\n";
    for (const std::string& v : violations) std::cout << "  " << v << "\n";
    return kExitVerifyFailed;
  }
  std::cout << "verification passed: " << extrema.section_checks << " section checks, "
            << extrema.gradient_checks << " gradient checks, " << extrema.lattice_checks
            << " lattice values, " << extrema.grid_points << " grid points, " << oracle_trials
            << " oracle trials\n";
  return kExitOk;
}

// print-code ------------------------------------------------------------------

int cmd_print_code(const CommonOpts& common) {
  const CodeSpec code = load_code(common);
  std::cout << to_json(code).dump(2) << "\n";
  return kExitOk;
}

// config merging --------------------------------------------------------------

std::vector<std::string> merge_config_args(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string config_path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("cannot open config file " + config_path);
  Json j = Json::parse(in);

  // insert config-derived tokens right after the subcommand; explicit flags
  // come later and win (last value taken)
  std::vector<std::string> merged;
  std::size_t insert_at = args.empty() ? 0 : 1;
  merged.insert(merged.end(), args.begin(), args.begin() + insert_at);
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) merged.push_back("--" + key);
      continue;
    }
    merged.push_back("--" + key);
    merged.push_back(value.is_string() ? value.get<std::string>() : value.dump());
  }
  merged.insert(merged.end(), args.begin() + insert_at, args.end());
  return merged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative phase compensation for encoded stabilizer states"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  CommonOpts common;
  std::string phases_text, mode = "analytic", scan = "continuous";
  std::string objective = "individual", metric = "delta1", variant = "individual", sweep;
  bool random_phases = false;
  int shots = 200, max_iterations = 50, runs = 1000, samples = 100, oracle_trials = 200;
  int max_locality = -1;
  double noise_p = 0.0, grid_step = kTwoPi / 10.0, threshold = 1e-3;

  auto add_common = [&](CLI::App* cmd, bool with_outputs = true) {
    cmd->add_option("--code", common.code, "code id: d3, d5, d7 or sub2")->capture_default_str();
    cmd->add_option("--code-file", common.code_file, "custom code layout (JSON)");
    cmd->add_option("--config", common.config_file, "JSON config merged under explicit flags");
    cmd->add_option("--seed", common.seed, "RNG seed (required for stochastic settings)")
        ->envname("PHASEOPT_SEED");
    if (with_outputs) {
      cmd->add_option("--output-json", common.output_json, "write a JSON report here");
      cmd->add_option("--output-csv", common.output_csv, "write a CSV table here");
    }
  };

  CLI::App* opt = app.add_subcommand("optimize", "run the iterative protocol once");
  add_common(opt);
  opt->add_option("--phases", phases_text, "comma-separated injected phases (radians)");
  opt->add_flag("--random-phases", random_phases, "draw the injected phases from the seed");
  opt->add_option("--mode", mode, "analytic or sampled")
      ->check(CLI::IsMember({"analytic", "sampled"}))
      ->capture_default_str();
  opt->add_option("--shots", shots, "shots per estimate in sampled mode")->capture_default_str();
  opt->add_option("--noise", noise_p, "white-noise weight p in [0,1]")->capture_default_str();
  opt->add_option("--scan", scan, "continuous or grid")
      ->check(CLI::IsMember({"continuous", "grid"}))
      ->capture_default_str();
  opt->add_option("--grid-step", grid_step, "grid step in radians (must divide 2*pi)")
      ->capture_default_str();
  opt->add_option("--objective", objective, "individual or sum")
      ->check(CLI::IsMember({"individual", "sum"}))
      ->capture_default_str();
  opt->add_option("--max-iterations", max_iterations, "pass budget")->capture_default_str();
  opt->add_option("--threshold", threshold, "convergence threshold")->capture_default_str();
  opt->add_option("--metric", metric, "delta1 or delta2")
      ->check(CLI::IsMember({"delta1", "delta2"}))
      ->capture_default_str();

  CLI::App* conv = app.add_subcommand("convergence", "Monte-Carlo convergence statistics");
  add_common(conv);
  conv->add_option("--variant", variant, "individual or sum")
      ->check(CLI::IsMember({"individual", "sum"}))
      ->capture_default_str();
  conv->add_option("--runs", runs, "number of random phase configurations")->capture_default_str();
  conv->add_option("--sweep", sweep, "threshold sweep lo:hi:count (log-spaced)");
  conv->add_option("--threshold", threshold, "convergence threshold")->capture_default_str();
  conv->add_option("--metric", metric, "delta1 or delta2")
      ->check(CLI::IsMember({"delta1", "delta2"}))
      ->capture_default_str();
  conv->add_option("--scan", scan, "continuous or grid")
      ->check(CLI::IsMember({"continuous", "grid"}))
      ->capture_default_str();
  conv->add_option("--grid-step", grid_step, "grid step in radians")->capture_default_str();
  conv->add_option("--max-iterations", max_iterations, "pass budget")->capture_default_str();

  CLI::App* dof = app.add_subcommand("count-dof", "quasi-local control degrees of freedom");
  add_common(dof);
  dof->add_option("--max-locality", max_locality, "largest subset size (default: plaquette size)");

  CLI::App* verify = app.add_subcommand("verify", "extrema, oracle and gradient checks");
  add_common(verify);
  verify->add_option("--samples", samples, "extrema phase samples")->capture_default_str();
  verify->add_option("--oracle-trials", oracle_trials, "oracle/gradient trial count")
      ->capture_default_str();
  verify->get_option("--seed")->default_val("42");

  CLI::App* print = app.add_subcommand("print-code", "dump the code layout as JSON");
  add_common(print, false);

  try {
    std::vector<std::string> args = merge_config_args(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes in reverse
    app.parse(args);
    for (CLI::App* sub : {opt, conv, dof, verify, print})
      if (sub->parsed() && sub->get_option("--seed")->count() > 0) common.seed_given = true;

    if (opt->parsed())
      return cmd_optimize(common, phases_text, random_phases, mode, shots, noise_p, scan,
                          grid_step, objective, max_iterations, threshold, metric, opt);
    if (conv->parsed())
      return cmd_convergence(common, variant, runs, sweep, threshold, metric, scan, grid_step,
                             max_iterations, conv);
    if (dof->parsed()) return cmd_count_dof(common, max_locality, dof);
    if (verify->parsed()) return cmd_verify(common, samples, oracle_trials, verify);
    if (print->parsed()) return cmd_print_code(common);
    return kExitUsage;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
