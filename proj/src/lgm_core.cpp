#include "boss/lgm_core.hpp"

#include "boss/errors.hpp"
#include "boss/optim.hpp"

#include <cmath>
#include <limits>

namespace boss {

GaussianLikelihood::GaussianLikelihood(double known_variance) : known_variance_(known_variance) {
  if (!(known_variance > 0)) throw InvalidArgument("GaussianLikelihood: variance must be positive");
}

GaussianLikelihood::GaussianLikelihood(int theta_index, Scale scale) : theta_index_(theta_index), scale_(scale) {
  if (theta_index < 0) throw InvalidArgument("GaussianLikelihood: theta index must be non-negative");
}

double GaussianLikelihood::variance(const Eigen::VectorXd& theta) const {
  if (theta_index_ < 0) return known_variance_;
  const double t = theta(theta_index_);
  return scale_ == Scale::LogVariance ? std::exp(t) : std::exp(-t);
}

double GaussianLikelihood::log_density(double y, double eta, const Eigen::VectorXd& theta) const {
  const double v = variance(theta);
  const double r = y - eta;
  return -0.5 * (log_two_pi<double>() + std::log(v)) - 0.5 * r * r / v;
}

double GaussianLikelihood::d1(double y, double eta, const Eigen::VectorXd& theta) const {
  return (y - eta) / variance(theta);
}

double GaussianLikelihood::d2(double, double, const Eigen::VectorXd& theta) const { return -1.0 / variance(theta); }

double PoissonLikelihood::log_density(double y, double eta, const Eigen::VectorXd&) const {
  return y * eta - std::exp(eta) - std::lgamma(y + 1);
}

double PoissonLikelihood::d1(double y, double eta, const Eigen::VectorXd&) const { return y - std::exp(eta); }

double PoissonLikelihood::d2(double, double eta, const Eigen::VectorXd&) const { return -std::exp(eta); }

void LgmSpec::validate() const {
  if (!likelihood) throw InvalidArgument("LgmSpec: likelihood missing");
  if (!prior_precision) throw InvalidArgument("LgmSpec: prior precision missing");
  if (design.rows() != response.size()) throw InvalidArgument("LgmSpec: design rows must match response length");
  if (theta_dim < 0) throw InvalidArgument("LgmSpec: theta_dim must be non-negative");
  if (theta_start.size() != 0 && theta_start.size() != theta_dim)
    throw InvalidArgument("LgmSpec: theta_start has the wrong length");
}

namespace {

struct PriorTerms {
  Eigen::MatrixXd q;
  double half_log_det = 0;
};

PriorTerms prior_terms(const LgmSpec& spec, const Eigen::VectorXd& theta) {
  PriorTerms out{spec.prior_precision(theta), 0};
  const auto p = spec.latent_dim();
  if (out.q.rows() != p || out.q.cols() != p) throw InvalidArgument("LgmSpec: prior precision must be p x p");
  if (p == 0) return out;
  Eigen::LLT<Eigen::MatrixXd> llt(out.q);
  if (llt.info() != Eigen::Success)
    throw CurvatureError("prior precision is not positive definite at theta = " + format_vector(theta));
  const Eigen::MatrixXd l = llt.matrixL();
  out.half_log_det = l.diagonal().array().log().sum();
  return out;
}

double theta_prior(const LgmSpec& spec, const Eigen::VectorXd& theta) {
  return spec.theta_log_prior ? spec.theta_log_prior(theta) : 0.0;
}

double data_log_lik(const LgmSpec& spec, const Eigen::VectorXd& eta, const Eigen::VectorXd& theta) {
  double acc = 0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) acc += spec.likelihood->log_density(spec.response(i), eta(i), theta);
  return acc;
}

double joint_with(const LgmSpec& spec, const PriorTerms& prior, const Eigen::VectorXd& u, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = spec.design * u;
  const double p = static_cast<double>(spec.latent_dim());
  return data_log_lik(spec, eta, theta) + prior.half_log_det - 0.5 * p * log_two_pi<double>() -
         0.5 * u.dot(prior.q * u) + theta_prior(spec, theta);
}

Eigen::VectorXd gradient_with(const LgmSpec& spec, const PriorTerms& prior, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = spec.design * u;
  Eigen::VectorXd g(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) g(i) = spec.likelihood->d1(spec.response(i), eta(i), theta);
  return spec.design.transpose() * g - prior.q * u;
}

Eigen::MatrixXd hessian_with(const LgmSpec& spec, const PriorTerms& prior, const Eigen::VectorXd& u,
                             const Eigen::VectorXd& theta) {
  const Eigen::VectorXd eta = spec.design * u;
  Eigen::VectorXd w(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) w(i) = -spec.likelihood->d2(spec.response(i), eta(i), theta);
  Eigen::MatrixXd h = prior.q;
  if (eta.size() > 0) h.noalias() += spec.design.transpose() * w.asDiagonal() * spec.design;
  return h;
}

}  // namespace

double log_joint(const LgmSpec& spec, const Eigen::VectorXd& latent, const Eigen::VectorXd& theta) {
  return joint_with(spec, prior_terms(spec, theta), latent, theta);
}

Eigen::VectorXd log_joint_gradient(const LgmSpec& spec, const Eigen::VectorXd& latent, const Eigen::VectorXd& theta) {
  return gradient_with(spec, prior_terms(spec, theta), latent, theta);
}

Eigen::MatrixXd assemble_neg_hessian(const LgmSpec& spec, const Eigen::VectorXd& latent, const Eigen::VectorXd& theta) {
  return hessian_with(spec, prior_terms(spec, theta), latent, theta);
}

LatentMode latent_mode(const LgmSpec& spec, const Eigen::VectorXd& theta) {
  spec.validate();
  const PriorTerms prior = prior_terms(spec, theta);
  const auto p = spec.latent_dim();

  LatentMode out;
  Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
  double f = joint_with(spec, prior, u, theta);
  Eigen::VectorXd g = gradient_with(spec, prior, u, theta);
  const double tol = 1e-6 * (1 + g.norm());

  constexpr int kMaxNewton = 100;
  constexpr int kMaxHalvings = 30;
  int it = 0;
  bool converged = g.norm() <= tol;
  for (; it < kMaxNewton && !converged; ++it) {
    const Eigen::MatrixXd h = hessian_with(spec, prior, u, theta);
    Eigen::LLT<Eigen::MatrixXd> llt(h);
    if (llt.info() != Eigen::Success)
      throw CurvatureError("latent_mode: negative Hessian not positive definite at theta = " + format_vector(theta));
    const Eigen::VectorXd step = llt.solve(g);

    double scale = 1;
    bool improved = false;
    Eigen::VectorXd trial;
    double f_trial = -std::numeric_limits<double>::infinity();
    for (int half = 0; half <= kMaxHalvings; ++half, scale *= 0.5) {
      trial = u + scale * step;
      f_trial = joint_with(spec, prior, trial, theta);
      if (std::isfinite(f_trial) && f_trial >= f - 1e-12 * (1 + std::abs(f))) {
        improved = true;
        break;
      }
    }
    if (!improved) break;
    u = trial;
    f = f_trial;
    g = gradient_with(spec, prior, u, theta);
    converged = g.norm() <= tol;
  }
  if (!converged)
    throw ConvergenceError("latent_mode: Newton did not converge at theta = " + format_vector(theta) +
                           ", gradient norm " + format_double(g.norm()));

  out.neg_hessian = hessian_with(spec, prior, u, theta);
  out.mode = std::move(u);
  out.log_joint = f;
  out.gradient_norm = g.norm();
  out.iterations = it;
  return out;
}

double laplace_log_joint(const LgmSpec& spec, const Eigen::VectorXd& theta, const LatentMode& at_mode) {
  const auto p = spec.latent_dim();
  if (p == 0) return at_mode.log_joint;
  Eigen::LLT<Eigen::MatrixXd> llt(at_mode.neg_hessian);
  if (llt.info() != Eigen::Success)
    throw CurvatureError("laplace_log_joint: negative Hessian not positive definite at theta = " + format_vector(theta));
  const Eigen::MatrixXd l = llt.matrixL();
  const double half_log_det = l.diagonal().array().log().sum();
  return at_mode.log_joint + 0.5 * p * log_two_pi<double>() - half_log_det;
}

double laplace_log_joint(const LgmSpec& spec, const Eigen::VectorXd& theta) {
  return laplace_log_joint(spec, theta, latent_mode(spec, theta));
}

std::atomic<int>& LiveFitToken::counter() {
  static std::atomic<int> count{0};
  return count;
}

int live_fit_count() { return LiveFitToken::counter().load(); }

Eigen::VectorXd LgmFit::node_weights() const { return theta_quadrature.normalized_log_weights().array().exp(); }

LgmFit fit_lgm(const LgmSpec& spec, int k_theta, const FitOptions& opts) {
  spec.validate();
  const int s = spec.theta_dim;
  LgmFit fit;

  auto record_node = [&](const Eigen::VectorXd& theta) {
    LatentMode m = latent_mode(spec, theta);
    const double v = laplace_log_joint(spec, theta, m);
    fit.hessians.emplace_back(m.neg_hessian);
    fit.latent_modes.push_back(std::move(m.mode));
    return v;
  };

  if (s == 0) {
    const Eigen::VectorXd empty(0);
    fit.theta_quadrature =
        aghq_normalize<double>(record_node, empty, Eigen::MatrixXd(0, 0), 1);
    fit.log_marginal_likelihood = fit.theta_quadrature.log_norm_const;
    return fit;
  }

  const Eigen::VectorXd start = spec.theta_start.size() == s ? spec.theta_start : Eigen::VectorXd::Zero(s);
  auto neg_laplace = [&](const Eigen::VectorXd& theta) {
    try {
      const double v = laplace_log_joint(spec, theta);
      return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
    } catch (const std::runtime_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  optim::NelderMeadOptions nm;
  nm.f_tol = opts.nm_tol;
  const auto best = optim::nelder_mead(neg_laplace, start, nm);
  if (!best.converged || !std::isfinite(best.value))
    throw ConvergenceError("fit_lgm: theta optimizer did not converge (last theta " + format_vector(best.x) + ")");

  const Eigen::MatrixXd h = optim::fd_hessian(neg_laplace, best.x, opts.hessian_step);
  if (!h.allFinite()) throw CurvatureError("fit_lgm: theta Hessian is not finite at " + format_vector(best.x));
  fit.theta_quadrature = aghq_normalize<double>(record_node, best.x, h, k_theta);
  fit.log_marginal_likelihood = fit.theta_quadrature.log_norm_const;
  return fit;
}

GaussianMixture latent_conditional(const LgmFit& fit, const Eigen::VectorXd& functional) {
  const Eigen::VectorXd w = fit.node_weights();
  std::vector<double> weights, means, sds;
  for (std::size_t i = 0; i < fit.latent_modes.size(); ++i) {
    if (functional.size() != fit.latent_modes[i].size())
      throw InvalidArgument("latent_conditional: functional length differs from the latent dimension");
    weights.push_back(w(static_cast<Eigen::Index>(i)));
    means.push_back(functional.dot(fit.latent_modes[i]));
    const Eigen::VectorXd half = fit.hessians[i].matrixL().solve(functional);
    sds.push_back(std::sqrt(half.squaredNorm()));
  }
  return {std::move(weights), std::move(means), std::move(sds)};
}

GaussianMixture theta_marginal(const LgmFit& fit, int j) {
  const auto& q = fit.theta_quadrature;
  if (j < 0 || j >= q.dims()) throw InvalidArgument("theta_marginal: index out of range");
  if (q.size() == 1) {
    const double var = q.chol.row(j).squaredNorm();
    return {{1.0}, {q.mode(j)}, {std::sqrt(var)}};
  }
  const Eigen::VectorXd w = fit.node_weights();
  const Eigen::VectorXd x = q.adapted_nodes.row(j).transpose();
  const double mean = w.dot(x);
  const double var = w.dot((x.array() - mean).square().matrix());
  return {{1.0}, {mean}, {std::sqrt(std::max(var, 0.0))}};
}

}  // namespace boss
