#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("boss_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run_cli(const std::string& args, const fs::path& dir) {
  const fs::path err = dir / "stderr.txt";
  const std::string cmd = std::string(BOSS_CLI_PATH) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

std::vector<std::vector<double>> read_numeric_csv(const fs::path& p, std::vector<std::string>& header) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  header.clear();
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("missing dataset path exits nonzero and names the field") {
    const auto dir = scratch("missing");
    const auto r = run_cli("boss --model plummer --data " + (dir / "nope.csv").string() + " --out " +
                               (dir / "out").string(),
                           dir);
    CHECK(r.code != 0);
    CHECK(r.err.find("data") != std::string::npos);
  }

  TEST_CASE("invalid settings are reported by field") {
    const auto dir = scratch("invalid");
    auto r = run_cli("boss --model analytic:simple --iters 2 --init-count 3", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("iters") != std::string::npos);
    r = run_cli("boss --model nonsense", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("model") != std::string::npos);
    r = run_cli("boss --model analytic:simple --bounds 0:1,0:1", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("bounds") != std::string::npos);
    std::ofstream(dir / "cfg.json") << R"({"iters": 12, "colour": "blue"})";
    r = run_cli("boss --config " + (dir / "cfg.json").string(), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("colour") != std::string::npos);
  }

  TEST_CASE("analytic run writes a posterior that integrates to one") {
    const auto dir = scratch("simple");
    const auto out = dir / "out";
    const auto r = run_cli("boss --model analytic:simple --iters 30 --normalizer grid --out " + out.string(), dir);
    REQUIRE(r.code == 0);
    for (const char* f : {"design.csv", "posterior.csv", "report.json"}) CHECK(fs::exists(out / f));
    std::vector<std::string> header;
    const auto rows = read_numeric_csv(out / "posterior.csv", header);
    REQUIRE(header == std::vector<std::string>{"alpha_1", "log_density", "density", "cdf"});
    REQUIRE(rows.size() == 1024);
    double mass = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) mass += 0.5 * (rows[i][0] - rows[i - 1][0]) * (rows[i][2] + rows[i - 1][2]);
    CHECK(std::abs(mass - 1) <= 1e-6);
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["config"]["iters"] == 30);
    CHECK(report["ledger"]["evaluations"] == 30);
    CHECK(report["posterior_table"].get<std::string>() == (out / "posterior.csv").string());
    // The design table carries no timing column.
    CHECK(slurp(out / "design.csv").rfind("iter,alpha_1,f_value,cumulative_evals,refresh_flag\n", 0) == 0);
  }

  TEST_CASE("plummer run with k = 4 reports mixture quantiles") {
    const auto dir = scratch("plummer");
    const auto out = dir / "out";
    const auto r = run_cli("boss --model plummer --iters 40 --quad-k 4 --normalizer aghq --seed 1 --out " + out.string(), dir);
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    REQUIRE(report["latent"].is_array());
    REQUIRE(report["latent"].size() == 2);
    for (const auto& m : report["latent"]) {
      CHECK(m["nodes"] == 16);
      for (const char* q : {"0.025", "0.5", "0.975"}) CHECK(m["quantiles"].contains(q));
      CHECK(m["quantiles"]["0.025"].get<double>() < m["quantiles"]["0.975"].get<double>());
    }
    CHECK(report["evaluations"]["recorded_fits"] == 40 + 16);
    CHECK(report["evaluations"]["B_plus_k_pow_d"] == 40 + 16);
    std::vector<std::string> header;
    const auto rows = read_numeric_csv(out / "mixture.csv", header);
    CHECK(header == std::vector<std::string>{"node", "alpha_1", "alpha_2", "weight", "cond_mean", "cond_sd"});
    CHECK(rows.size() == 16);
    CHECK(fs::exists(out / "mixture_gamma.csv"));
    CHECK(fs::exists(out / "mixture_log_sigma2.csv"));
  }

  TEST_CASE("config file values are overridden by flags and echoed") {
    const auto dir = scratch("config");
    const auto out = dir / "out";
    std::ofstream(dir / "cfg.json") << R"({"model": "analytic:hard", "iters": 50, "seed": 2})";
    const auto r =
        run_cli("boss --config " + (dir / "cfg.json").string() + " --iters 12 --out " + out.string(), dir);
    REQUIRE(r.code == 0);
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["config"]["model"] == "analytic:hard");
    CHECK(report["config"]["iters"] == 12);
    CHECK(report["config"]["seed"] == 2);
  }

  TEST_CASE("sim1 subcommand on a reduced matrix") {
    const auto dir = scratch("sim1");
    const auto out = dir / "out";
    const auto r = run_cli("sim1 --iters 10,30 --seeds 0,1 --out " + out.string(), dir);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(out / "sim1_cells.csv"));
    CHECK(fs::exists(out / "report.json"));
    CHECK(fs::exists(out / "hard_B30_seed1_posterior.csv"));
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report.contains("summary"));
  }
}
