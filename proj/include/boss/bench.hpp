#pragma once

// Desk-scale benchmark cells and the generic end-to-end pipeline behind the
// command-line tool. Every cell is seeded; CSV outputs carry no timings so
// reruns are byte-identical, while report.json also records wall times.

#include "boss/bo_engine.hpp"
#include "boss/model_zoo.hpp"
#include "boss/normalizer.hpp"
#include "boss/posterior_mix.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace boss {

constexpr int kDefaultThetaK = 5;

struct Sim1Options {
  std::vector<int> budgets{10, 30, 80};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::vector<std::string> functions{"simple", "medium", "hard"};
  int initial_count = 3;
  int grid_points = 2048;
  double delta = 0.01;
  int refresh_every = 10;
  std::string out_dir;  // empty: no files
};

struct Sim1Cell {
  std::string function;
  int budget = 0;
  std::uint64_t seed = 0;
  double kl = 0;
  double ks = 0;
  int evaluations = 0;
  double wall_ms = 0;
};

struct Sim1Report {
  std::vector<Sim1Cell> cells;
  double median_kl(const std::string& function, int budget) const;
  double median_ks(const std::string& function, int budget) const;
  nlohmann::json to_json(const Sim1Options& opts) const;
};

Sim1Report run_sim1(const Sim1Options& opts);

struct Sim2Options {
  std::vector<int> budgets{80};
  std::vector<std::uint64_t> seeds{1};
  int initial_count = 5;
  int oracle_points = 800;
  int grid_points = 1024;
  int mixture_k = 10;
  int k_theta = kDefaultThetaK;
  int n_obs = 100;
  double delta = 0.01;
  int refresh_every = 10;
  std::string out_dir;
};

struct Sim2Cell {
  std::uint64_t seed = 0;
  int budget = 0;
  double ks = 0;
  double kl = 0;
  int boss_evals = 0;    // true-model fits: B + k
  int oracle_evals = 0;  // grid size
  double boss_ms = 0;
  double oracle_ms = 0;
  double runtime_ratio = 0;
  std::vector<MixtureSummary> latent;
  std::vector<MixtureSummary> theta;
};

struct Sim2Report {
  std::vector<Sim2Cell> cells;
  nlohmann::json to_json(const Sim2Options& opts) const;
};

Sim2Report run_sim2(const Sim2Options& opts);

struct Sim4Options {
  int budget = 100;
  std::vector<std::uint64_t> seeds{1};
  int initial_count = 20;  // Latin square
  int oracle_points_per_dim = 100;
  int mcmc_samples = 50000;
  int mcmc_burn_in = 5000;
  double mcmc_step_scale = 0.1;
  int mixture_k = 4;
  int k_theta = kDefaultThetaK;
  double delta = 0.01;
  int refresh_every = 10;
  std::string out_dir;
};

struct Sim4Cell {
  std::uint64_t seed = 0;
  Eigen::Vector2d marginal_ks = Eigen::Vector2d::Zero();
  Eigen::Vector2d surrogate_mode = Eigen::Vector2d::Zero();
  Eigen::Vector2d oracle_mode = Eigen::Vector2d::Zero();
  double acceptance_rate = 0;
  bool mcmc_warning = false;
  int boss_evals = 0;
  int recorded_fits = 0;
  double oracle_gamma_mean = 0;  // model average of E[gamma | alpha] over the oracle grid
  std::vector<MixtureSummary> latent;
  double boss_ms = 0;
  double oracle_ms = 0;
};

struct Sim4Report {
  std::vector<Sim4Cell> cells;
  nlohmann::json to_json(const Sim4Options& opts) const;
};

Sim4Report run_sim4(const Sim4Options& opts);

struct PipelineOptions {
  std::string model = "analytic:simple";  // analytic:{simple,medium,hard}, periodic-poisson, plummer
  std::string data_path;                  // dataset CSV; simulated from the seed when empty
  std::optional<SearchSpace> bounds;      // overrides the model's box
  std::vector<Eigen::VectorXd> initial_points;
  int initial_count = 0;  // 0: 3 for d = 1, 20 otherwise
  int iterations = 30;
  double delta = 0.01;
  int refresh_every = 10;
  NormalizerMethod normalizer = NormalizerMethod::Grid;
  int grid_points = 0;  // 0: 1024 for d = 1, 128 otherwise
  int quad_k = 0;       // 0: 10 for d = 1, 4 for d = 2
  int mcmc_samples = 50000;
  double mcmc_step_scale = 0.1;
  int k_theta = kDefaultThetaK;
  std::uint64_t seed = 0;
  std::string out_dir;
};

struct PipelineResult {
  BossRun run;
  NormalizedSurrogate surrogate;
  std::vector<MixtureSummary> latent;
  std::vector<MixtureSummary> theta;
  int recorded_fits = 0;
  int ledger_total = 0;  // B + k^d, when mixing ran
  nlohmann::json report;
};

PipelineResult run_pipeline(const PipelineOptions& opts);

}  // namespace boss
