#pragma once

// Sequential design of objective evaluations with a GP surrogate and an
// upper-confidence-bound acquisition.

#include "boss/surrogate_gp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <vector>

namespace boss {

using LogDensityFn = std::function<double(const Eigen::VectorXd&)>;

/// Axis-aligned box of dimension 1..3.
class SearchSpace {
 public:
  SearchSpace() = default;
  SearchSpace(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dims() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  Eigen::VectorXd width() const { return upper_ - lower_; }
  double diameter() const { return width().norm(); }
  bool contains(const Eigen::VectorXd& x) const;
  Eigen::VectorXd clamp(Eigen::VectorXd x) const;
  // Mirror out-of-box coordinates back inside, then clamp.
  Eigen::VectorXd reflect(Eigen::VectorXd x) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

struct BoConfig {
  int iterations = 30;  // B, counting the initial points
  double delta = 0.01;
  std::vector<Eigen::VectorXd> initial_points;
  int refresh_every = 10;  // B_A
  int af_candidates = 0;   // 0 means 512 * d
  std::uint64_t seed = 0;
  double noise_var = 1e-6;
  bool ucb_use_sd = false;  // canonical GP-UCB instead of the variance form
  int hyper_grid_size = 25;
};

/// m equally spaced points in 1-D (endpoints included), otherwise an m-point
/// Latin square with cell-centred coordinates.
std::vector<Eigen::VectorXd> default_initial_points(const SearchSpace& space, int count, std::uint64_t seed);

struct LedgerEntry {
  int iter = 0;
  Eigen::VectorXd alpha;
  double f_value = 0;
  int cumulative_evals = 0;
  double wall_ms = 0;
  bool refresh = false;
};

struct RefreshRecord {
  int after_evals = 0;
  SeKernelParams<double> params;
  double log_likelihood = 0;
  bool warning = false;
};

/// Every true-objective evaluation of a run, in order, plus the
/// hyperparameter refreshes.
class RunLedger {
 public:
  void record(LedgerEntry entry) { entries_.push_back(std::move(entry)); }
  void record_refresh(RefreshRecord r) { refreshes_.push_back(std::move(r)); }
  void mark_last_refresh() {
    if (!entries_.empty()) entries_.back().refresh = true;
  }

  const std::vector<LedgerEntry>& entries() const { return entries_; }
  const std::vector<RefreshRecord>& refreshes() const { return refreshes_; }
  int evaluations() const { return entries_.empty() ? 0 : entries_.back().cumulative_evals; }
  bool any_refresh_warning() const;

  // Columns iter, alpha_1..alpha_d, f_value, cumulative_evals, [wall_ms,] refresh_flag.
  void write_csv(std::ostream& os, bool include_timing = true) const;

 private:
  std::vector<LedgerEntry> entries_;
  std::vector<RefreshRecord> refreshes_;
};

/// f_BO: the final posterior mean of the GP (center offset included).
struct SurrogateFn {
  GpPosterior<double> gp;
  double operator()(const Eigen::VectorXd& alpha) const { return gp.mean(alpha); }
};

double ucb_gamma(int t, double delta);

/// m_t(q) + gamma_t^{1/2} C_t(q, q); with use_sd the posterior SD replaces
/// the variance.
double ucb(const GpPosterior<double>& gp, int t, double delta, const Eigen::VectorXd& query, bool use_sd = false);

Eigen::VectorXd maximize_af(const GpPosterior<double>& gp, int t, double delta, const SearchSpace& space, int budget,
                            std::mt19937_64& rng, bool use_sd = false);

struct BossRun {
  DesignSet<double> design;
  SurrogateFn surrogate;
  RunLedger ledger;
};

BossRun run_boss(const LogDensityFn& objective, const SearchSpace& space, const BoConfig& cfg);

}  // namespace boss
