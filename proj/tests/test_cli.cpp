#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

std::string binary() {
  const char* p = std::getenv("PHASEOPT_BIN");
  REQUIRE(p != nullptr);
  return p;
}

std::string tmpdir() {
  const char* p = std::getenv("PHASEOPT_TEST_TMPDIR");
  return p ? p : "/tmp";
}

int run(const std::string& args, const std::string& stdout_file = "") {
  std::string cmd = binary() + " " + args;
  if (!stdout_file.empty()) cmd += " > " + stdout_file;
  cmd += " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("print-code emits a parsable layout") {
  const std::string out = tmpdir() + "/code.json";
  REQUIRE(run("print-code --code d3", out) == 0);
  auto j = nlohmann::json::parse(slurp(out));
  CHECK(j["n_qubits"] == 7);
  CHECK(j["plaquettes"].size() == 3);
  CHECK(j["phase_count"] == 7);
  CHECK(j["assignment"].size() == 7);
}

TEST_CASE("optimize with zero phases converges immediately") {
  const std::string json = tmpdir() + "/opt.json";
  REQUIRE(run("optimize --code d3 --phases 0,0,0,0,0,0,0 --mode analytic --output-json " + json) ==
          0);
  auto j = nlohmann::json::parse(slurp(json));
  CHECK(j["report"]["iterations"] == 1);
  CHECK(j["report"]["converged"] == true);
  for (const auto& e : j["report"]["final_expectations"])
    CHECK(e.get<double>() == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("optimize rejects bad input with exit 1") {
  CHECK(run("optimize --code d3 --phases 1,2,3 --mode analytic") == 1);  // wrong count
  CHECK(run("optimize --code bogus --phases 0") == 1);
  CHECK(run("optimize --code d3 --random-phases") == 1);  // stochastic without seed
  CHECK(run("optimize --code d3 --phases 0,0,0,0,0,0,0 --grid-step 1.0 --scan grid") == 1);
  CHECK(run("bogus-command") == 1);
}

TEST_CASE("optimize reports non-convergence with exit 2") {
  CHECK(run("optimize --code d3 --random-phases --seed 5 --max-iterations 1 --threshold 1e-15") ==
        2);
}

TEST_CASE("seeded commands are byte-identical across invocations") {
  const std::string a = tmpdir() + "/conv.csv";
  const std::string args =
      "convergence --code d3 --variant individual --runs 40 --seed 11 --output-csv " + a;
  REQUIRE(run(args) == 0);
  const std::string first = slurp(a);
  REQUIRE(run(args) == 0);
  CHECK(first == slurp(a));

  const std::string ja = tmpdir() + "/opt.json";
  const std::string oargs =
      "optimize --code d3 --random-phases --seed 9 --mode sampled --shots 100 --scan grid "
      "--metric delta2 --threshold 0.1 --output-json " +
      ja;
  REQUIRE(run(oargs) >= 0);
  const std::string jfirst = slurp(ja);
  REQUIRE(run(oargs) >= 0);
  CHECK(jfirst == slurp(ja));
}

TEST_CASE("output files carry the header block") {
  const std::string csv = tmpdir() + "/dof.csv";
  REQUIRE(run("count-dof --code d5 --output-csv " + csv) == 0);
  const std::string body = slurp(csv);
  CHECK(body.find("# phaseopt ") == 0);
  CHECK(body.find("# command: count-dof") != std::string::npos);
  CHECK(body.find("# config: ") != std::string::npos);
  CHECK(body.find("# seed: ") != std::string::npos);
  CHECK(body.find("5,56,292") != std::string::npos);
}

TEST_CASE("count-dof prints the published verdicts") {
  const std::string out = tmpdir() + "/dof_out.txt";
  REQUIRE(run("count-dof --code d5", out) == 0);
  std::string text = slurp(out);
  CHECK(text.find("(cumulative 292)") != std::string::npos);
  CHECK(text.find("phases required: 255") != std::string::npos);
  CHECK(text.find("verdict: sufficient") != std::string::npos);

  REQUIRE(run("count-dof --code d7", out) == 0);
  text = slurp(out);
  CHECK(text.find("cumulative: 875") != std::string::npos);
  CHECK(text.find("phases required: 32767") != std::string::npos);
  CHECK(text.find("verdict: insufficient") != std::string::npos);

  REQUIRE(run("count-dof --code d3 --max-locality 1", out) == 0);
  text = slurp(out);
  CHECK(text.find("1-local: 7") != std::string::npos);
  CHECK(text.find("verdict: sufficient") != std::string::npos);
}

TEST_CASE("verify passes deterministically") {
  CHECK(run("verify --samples 10 --seed 42 --oracle-trials 25") == 0);
}

TEST_CASE("convergence sweep emits a table") {
  const std::string csv = tmpdir() + "/sweep.csv";
  REQUIRE(run("convergence --code sub2 --variant individual --runs 50 --seed 3 "
              "--sweep 1e-4:1e-1:3 --output-csv " +
              csv) == 0);
  const std::string body = slurp(csv);
  CHECK(body.find("metric,threshold,mean_n") != std::string::npos);
  CHECK(body.find("delta1,") != std::string::npos);
  CHECK(body.find("delta2,") != std::string::npos);
}

TEST_CASE("config file values merge under explicit flags") {
  const std::string cfg = tmpdir() + "/cfg.json";
  {
    std::ofstream out(cfg);
    out << R"({"runs": 25, "variant": "sum", "seed": 17})";
  }
  const std::string json = tmpdir() + "/cfg_out.json";
  // --runs on the command line wins; variant/seed come from the config
  REQUIRE(run("convergence --code sub2 --config " + cfg + " --runs 10 --output-json " + json) == 0);
  auto j = nlohmann::json::parse(slurp(json));
  CHECK(j["stats"]["runs"] == 10);
  CHECK(j["stats"]["variant"] == "sum");
  CHECK(j["meta"]["seed"] == 17);
}

TEST_CASE("custom code layouts load from a file") {
  const std::string file = tmpdir() + "/custom_code.json";
  const std::string dumped = tmpdir() + "/dumped.json";
  REQUIRE(run("print-code --code sub2", file) == 0);
  REQUIRE(run("print-code --code-file " + file, dumped) == 0);
  auto j = nlohmann::json::parse(slurp(dumped));
  CHECK(j["n_qubits"] == 7);
  CHECK(j["phase_count"] == 3);
}
