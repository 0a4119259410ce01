#include "boss/posterior_mix.hpp"

#include "boss/errors.hpp"
#include "boss/numeric.hpp"

#include <cmath>
#include <ostream>

namespace boss {

namespace {

int int_pow(int base, int exp) {
  int r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

AghqResult<double> rule_for(const NormalizedSurrogate& s, int k) {
  if (!s.aghq || !s.transform) throw InvalidArgument("posterior mixing needs a surrogate normalized by AGHQ");
  const int d = s.dims();
  if (s.aghq->size() == int_pow(k, d)) return *s.aghq;
  const Eigen::MatrixXd& L = s.aghq->chol;
  const Eigen::MatrixXd cov = L * L.transpose();
  const Eigen::MatrixXd neg_hessian = cov.inverse();
  const DomainTransform t = *s.transform;
  const LogDensityFn f = s.log_surrogate;
  return aghq_normalize<double>(
      [&](const Eigen::VectorXd& a) { return f(t.forward(a)) + t.log_jacobian(a); }, s.aghq->mode, neg_hessian, k);
}

}  // namespace

MixtureInference infer_mixture(const ConditionalModel& model, const NormalizedSurrogate& surrogate, int k, int k_theta,
                               FitCounter* counter) {
  if (k < 1) throw InvalidArgument("infer_mixture: k must be positive");
  const AghqResult<double> rule = rule_for(surrogate, k);
  MixtureInference out;
  out.node_log_weights = rule.normalized_log_weights();
  out.node_fits.reserve(static_cast<std::size_t>(rule.size()));
  for (Eigen::Index c = 0; c < rule.size(); ++c) {
    const Eigen::VectorXd alpha = surrogate.transform->forward(rule.adapted_nodes.col(c));
    try {
      out.node_fits.push_back(fit_lgm(model.build(alpha), k_theta));
    } catch (const std::exception& e) {
      throw EvaluationError("infer_mixture: LGM fit failed at node " + std::to_string(c) + " alpha = " +
                            format_vector(alpha) + ": " + e.what());
    }
    if (counter) ++counter->count;
    ++out.total_true_evals;
    out.nodes.push_back(alpha);
  }
  return out;
}

MixtureSummary mix_latent(const MixtureInference& inference, const Eigen::VectorXd& functional,
                          const std::string& label) {
  MixtureSummary s;
  s.label = label;
  const Eigen::VectorXd w = inference.weights();
  std::vector<GaussianMixture> parts;
  std::vector<double> weights;
  for (std::size_t i = 0; i < inference.node_fits.size(); ++i) {
    GaussianMixture cond = latent_conditional(inference.node_fits[i], functional);
    s.nodes.push_back({static_cast<int>(i), inference.nodes[i], w(static_cast<Eigen::Index>(i)), cond.mean(), cond.sd()});
    weights.push_back(w(static_cast<Eigen::Index>(i)));
    parts.push_back(std::move(cond));
  }
  s.mixture = GaussianMixture::combine(parts, weights);
  return s;
}

MixtureSummary mix_latent(const ConditionalModel& model, const NormalizedSurrogate& surrogate, int k,
                          const Eigen::VectorXd& functional, int k_theta, FitCounter* counter) {
  return mix_latent(infer_mixture(model, surrogate, k, k_theta, counter), functional);
}

std::vector<MixtureSummary> mix_theta(const MixtureInference& inference) {
  std::vector<MixtureSummary> out;
  if (inference.node_fits.empty()) return out;
  const int s = inference.node_fits.front().theta_dim();
  const Eigen::VectorXd w = inference.weights();
  for (int j = 0; j < s; ++j) {
    MixtureSummary summary;
    summary.label = "theta_" + std::to_string(j + 1);
    std::vector<GaussianMixture> parts;
    std::vector<double> weights;
    for (std::size_t i = 0; i < inference.node_fits.size(); ++i) {
      GaussianMixture m = theta_marginal(inference.node_fits[i], j);
      summary.nodes.push_back({static_cast<int>(i), inference.nodes[i], w(static_cast<Eigen::Index>(i)), m.mean(), m.sd()});
      weights.push_back(w(static_cast<Eigen::Index>(i)));
      parts.push_back(std::move(m));
    }
    summary.mixture = GaussianMixture::combine(parts, weights);
    out.push_back(std::move(summary));
  }
  return out;
}

std::vector<MixtureSummary> mix_theta(const ConditionalModel& model, const NormalizedSurrogate& surrogate, int k,
                                      int k_theta, FitCounter* counter) {
  return mix_theta(infer_mixture(model, surrogate, k, k_theta, counter));
}

int evaluation_ledger(const RunLedger& run, int k, int d, int recorded_fits) {
  if (k < 1 || d < 1) throw InvalidArgument("evaluation_ledger: k and d must be positive");
  const int expected = run.evaluations() + int_pow(k, d);
  if (expected != recorded_fits)
    throw AccountingError("evaluation ledger mismatch: B + k^d = " + std::to_string(expected) + " but " +
                          std::to_string(recorded_fits) + " LGM fits were recorded");
  return expected;
}

void write_mixture_csv(std::ostream& os, const MixtureSummary& summary) {
  const int d = summary.nodes.empty() ? 0 : static_cast<int>(summary.nodes.front().alpha.size());
  os << "node";
  for (int j = 0; j < d; ++j) os << ",alpha_" << j + 1;
  os << ",weight,cond_mean,cond_sd\n";
  for (const auto& n : summary.nodes) {
    os << n.index;
    for (int j = 0; j < d; ++j) os << ',' << format_double(n.alpha(j));
    os << ',' << format_double(n.weight) << ',' << format_double(n.cond_mean) << ',' << format_double(n.cond_sd) << '\n';
  }
}

}  // namespace boss
