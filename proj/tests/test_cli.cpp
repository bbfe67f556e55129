#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef FRAILTYCR_CLI_PATH
#define FRAILTYCR_CLI_PATH "frailtycr"
#endif

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(FRAILTYCR_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 512> buf{};
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string tmp(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kSharedModel =
    R"({"hazards":{"individual1":[{"family":"weibull","shape":1.5,"scale":1.0}],
                   "individual2":[{"family":"weibull","shape":1.5,"scale":1.0}]},
        "frailty":{"law":"shared_gamma","sigma":0.7}})";

const char* kDirichletModel =
    R"({"hazards":{"individual1":[{"family":"weibull","shape":1.5,"scale":1.0},
                                  {"family":"weibull","shape":1.5,"scale":1.0}],
                   "individual2":[{"family":"constant","rate":0.8},
                                  {"family":"constant","rate":0.8}]},
        "frailty":{"law":"dirichlet_gamma","alpha1":[1.0,2.0],"alpha2":[3.0,1.0],"sigma":0.8}})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("--version reports the tool version") {
  const RunResult r = run_cli("--version");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("frailtycr 0.1.0") != std::string::npos);
}

TEST_CASE("unknown flags exit 1 with usage text") {
  const RunResult r = run_cli("simulate --frobnicate 3");
  CHECK(r.exit_code == 1);
  const RunResult r2 = run_cli("");
  CHECK(r2.exit_code == 1);
}

TEST_CASE("simulate is deterministic and embeds its provenance") {
  const std::string model = tmp("cli_model.json");
  write_file(model, kSharedModel);
  const std::string out1 = tmp("cli_sim1.csv"), out2 = tmp("cli_sim2.csv");
  const RunResult r1 =
      run_cli("simulate --model " + model + " --n 100 --seed 7 --out " + out1);
  REQUIRE(r1.exit_code == 0);
  const RunResult r2 =
      run_cli("simulate --model " + model + " --n 100 --seed 7 --out " + out2);
  REQUIRE(r2.exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  const std::string text = slurp(out1);
  CHECK(text.find("# frailtycr 0.1.0") != std::string::npos);
  CHECK(text.find("# model: ") != std::string::npos);
  CHECK(text.find("# seed: 7") != std::string::npos);
  CHECK(text.find("t1,j1,t2,j2") != std::string::npos);
}

TEST_CASE("simulate rejects malformed model configs naming the field") {
  const std::string model = tmp("cli_bad_model.json");
  write_file(model,
             R"({"hazards":{"individual1":[{"family":"weibull","shape":1.5,"scale":1.0}],
                            "individual2":[{"family":"weibull","shape":1.5,"scale":1.0}]},
                 "frailty":{"law":"shared_gamma"}})");
  const RunResult r =
      run_cli("simulate --model " + model + " --n 10 --seed 1 --out " + tmp("x.csv"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("frailty.sigma") != std::string::npos);
}

TEST_CASE("eval writes the documented CSV columns") {
  const std::string model = tmp("cli_model_eval.json");
  write_file(model, kSharedModel);
  const std::string grid = tmp("cli_grid.json");
  write_file(grid, R"({"t1":[0.5,1.0],"t2":{"start":0.5,"stop":2.0,"count":3,"spacing":"log"}})");
  const std::string out = tmp("cli_eval.csv");
  const RunResult r = run_cli("eval --model " + model + " --grid " + grid + " --out " + out);
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("t1,t2,j1,j2,F,f,S") != std::string::npos);
  // 2 x 3 grid, single cause pair.
  int rows = 0;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line))
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++rows;
  CHECK(rows == 6);
}

TEST_CASE("oracle-check passes clean models and flags perturbed ones") {
  const std::string model = tmp("cli_model_oc.json");
  write_file(model, kSharedModel);
  const std::string points = tmp("cli_points.csv");
  write_file(points, "t1,t2,j1,j2\n0.5,0.5,1,1\n1.0,1.5,1,1\n");
  const std::string out = tmp("cli_oc.csv");
  const RunResult ok =
      run_cli("oracle-check --model " + model + " --points " + points + " --out " + out);
  CHECK(ok.exit_code == 0);
  CHECK(slurp(out).find("true") != std::string::npos);

  const RunResult bad = run_cli("oracle-check --model " + model + " --points " + points +
                                " --out " + out + " --perturb 1e-3");
  CHECK(bad.exit_code == 2);
  CHECK(slurp(out).find("false") != std::string::npos);
}

TEST_CASE("identifiability dirichlet mode reports pass=true") {
  const std::string config = tmp("cli_dirichlet.json");
  write_file(config, std::string("{\"model\":") + kDirichletModel +
                         ",\"c1\":2.0,\"c2\":0.5,"
                         "\"grid\":{\"t1\":[0.4,0.9,1.5],\"t2\":[0.3,1.0,2.0]}}");
  const std::string out = tmp("cli_dirichlet_report.json");
  const RunResult r =
      run_cli("identifiability --mode dirichlet --config " + config + " --out " + out);
  CHECK(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"pass\": true") != std::string::npos);
  CHECK(text.find("\"max_diff\"") != std::string::npos);
  CHECK(text.find("\"tool_version\"") != std::string::npos);
}

TEST_CASE("identifiability sigma-perturbation control exits 2") {
  const std::string config = tmp("cli_dirichlet_control.json");
  write_file(config, std::string("{\"model\":") + kDirichletModel +
                         ",\"c1\":2.0,\"c2\":0.5,\"sigma_perturb\":0.1,"
                         "\"grid\":{\"t1\":[0.4,0.9],\"t2\":[0.3,1.0]}}");
  const std::string out = tmp("cli_dirichlet_control.json.out");
  const RunResult r =
      run_cli("identifiability --mode dirichlet --config " + config + " --out " + out);
  CHECK(r.exit_code == 2);
  CHECK(slurp(out).find("\"pass\": false") != std::string::npos);
}

TEST_CASE("identifiability general and scan modes work end to end") {
  const char* base_model =
      R"({"hazards":{"individual1":[{"family":"weibull","shape":1.4,"scale":1.0},
                                    {"family":"weibull","shape":2.0,"scale":1.3}],
                     "individual2":[{"family":"weibull","shape":1.6,"scale":0.9},
                                    {"family":"weibull","shape":1.2,"scale":1.1}]},
          "frailty":{"law":"shared_cause_specific","sigmas":[0.8,1.1]}})";
  const std::string general = tmp("cli_general.json");
  write_file(general, std::string("{\"model\":") + base_model +
                          ",\"c1\":2.0,\"c2\":3.0,"
                          "\"grid\":{\"t1\":[0.5,1.0],\"t2\":[0.4,0.9]}}");
  const std::string out = tmp("cli_general_report.json");
  const RunResult r =
      run_cli("identifiability --mode general --config " + general + " --out " + out);
  CHECK(r.exit_code == 0);
  CHECK(slurp(out).find("\"pass\": true") != std::string::npos);

  // Broken pairing must fail with exit 2.
  const std::string broken = tmp("cli_general_broken.json");
  write_file(broken, std::string("{\"model\":") + base_model +
                         ",\"c1\":2.0,\"c2\":3.0,\"broken_pairing\":true,"
                         "\"grid\":{\"t1\":[0.5,1.0],\"t2\":[0.4,0.9]}}");
  CHECK(run_cli("identifiability --mode general --config " + broken + " --out " + out)
            .exit_code == 2);

  const std::string scan = tmp("cli_scan.json");
  const char* model_b =
      R"({"hazards":{"individual1":[{"family":"weibull","shape":1.4,"scale":1.0},
                                    {"family":"weibull","shape":2.0,"scale":1.3}],
                     "individual2":[{"family":"weibull","shape":1.6,"scale":0.9},
                                    {"family":"weibull","shape":1.2,"scale":1.1}]},
          "frailty":{"law":"shared_cause_specific","sigmas":[1.1,1.1]}})";
  write_file(scan, std::string("{\"model\":") + base_model + ",\"model_prime\":" + model_b +
                       ",\"grid\":{\"t1\":[0.5,1.0,1.8],\"t2\":[0.4,0.9,1.6]}}");
  const RunResult rs =
      run_cli("identifiability --mode scan --config " + scan + " --out " + out);
  CHECK(rs.exit_code == 0);
  CHECK(slurp(out).find("\"max_marginal_diff\"") != std::string::npos);
}

TEST_CASE("fit runs end to end with auto init") {
  const std::string model = tmp("cli_model_fit.json");
  write_file(model, kSharedModel);
  const std::string data = tmp("cli_fit_data.csv");
  REQUIRE(run_cli("simulate --model " + model + " --n 800 --seed 3 --out " + data).exit_code ==
          0);
  const std::string hazards = tmp("cli_fit_hazards.json");
  write_file(hazards,
             R"({"individual1":[{"family":"weibull","shape":1.0,"scale":1.0}],
                 "individual2":[{"family":"weibull","shape":1.0,"scale":1.0}]})");
  const std::string out = tmp("cli_fit.json");
  const RunResult r = run_cli("fit --data " + data + " --family shared_gamma --hazards " +
                              hazards + " --init auto --out " + out);
  REQUIRE(r.exit_code == 0);
  const std::string text = slurp(out);
  CHECK(text.find("\"converged\": true") != std::string::npos);
  CHECK(text.find("\"sigma\"") != std::string::npos);
  CHECK(text.find("\"log_likelihood\"") != std::string::npos);
}

}  // TEST_SUITE
