#pragma once

// Posterior of the latent field and hyperparameters averaged over alpha:
// one LGM fit per AGHQ node of the normalized surrogate, mixed by the node
// weights.

#include "boss/bo_engine.hpp"
#include "boss/lgm_core.hpp"
#include "boss/mixture.hpp"
#include "boss/model_zoo.hpp"
#include "boss/normalizer.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <string>
#include <vector>

namespace boss {

struct MixtureInference {
  std::vector<Eigen::VectorXd> nodes;  // alpha at each node, on the original scale
  Eigen::VectorXd node_log_weights;    // normalized
  std::vector<LgmFit> node_fits;
  int total_true_evals = 0;            // LGM fits made here (k^d)

  Eigen::VectorXd weights() const { return node_log_weights.array().exp(); }
};

/// Fits the model at each of the k^d nodes of an AGHQ rule in the surrogate's
/// transformed coordinates. When k differs from the surrogate's own rule the
/// rule is rebuilt at the same mode and curvature.
MixtureInference infer_mixture(const ConditionalModel& model, const NormalizedSurrogate& surrogate, int k,
                               int k_theta = 5, FitCounter* counter = nullptr);

struct NodeRow {
  int index = 0;
  Eigen::VectorXd alpha;
  double weight = 0;
  double cond_mean = 0;
  double cond_sd = 0;
};

struct MixtureSummary {
  std::string label;
  GaussianMixture mixture;
  std::vector<NodeRow> nodes;

  double mean() const { return mixture.mean(); }
  double sd() const { return mixture.sd(); }
  double quantile(double p) const { return mixture.quantile(p); }
};

MixtureSummary mix_latent(const MixtureInference& inference, const Eigen::VectorXd& functional,
                          const std::string& label = "functional");
MixtureSummary mix_latent(const ConditionalModel& model, const NormalizedSurrogate& surrogate, int k,
                          const Eigen::VectorXd& functional, int k_theta = 5, FitCounter* counter = nullptr);

/// One summary per theta coordinate; empty when the model has none.
std::vector<MixtureSummary> mix_theta(const MixtureInference& inference);
std::vector<MixtureSummary> mix_theta(const ConditionalModel& model, const NormalizedSurrogate& surrogate, int k,
                                      int k_theta = 5, FitCounter* counter = nullptr);

/// B + k^d. Throws AccountingError unless it equals `recorded_fits`.
int evaluation_ledger(const RunLedger& run, int k, int d, int recorded_fits);

// Columns node, alpha_1..alpha_d, weight, cond_mean, cond_sd.
void write_mixture_csv(std::ostream& os, const MixtureSummary& summary);

}  // namespace boss
