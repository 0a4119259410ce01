#pragma once

// Gaussian and Laplace approximations for a latent Gaussian model with a
// fixed design matrix, and adaptive quadrature over its hyperparameters.
//
//   y_i | eta_i, theta ~ pi(y_i | eta_i, theta),   eta = A U,
//   U | theta ~ N(0, Q(theta)^{-1}),               theta ~ pi(theta).

#include "boss/mixture.hpp"
#include "boss/quadrature.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace boss {

/// Per-observation log density and its first two derivatives in eta.
class Likelihood {
 public:
  virtual ~Likelihood() = default;
  virtual std::string name() const = 0;
  virtual double log_density(double y, double eta, const Eigen::VectorXd& theta) const = 0;
  virtual double d1(double y, double eta, const Eigen::VectorXd& theta) const = 0;
  virtual double d2(double y, double eta, const Eigen::VectorXd& theta) const = 0;
};

/// y ~ N(eta, v). The variance is either fixed or read from one theta
/// coordinate on a log scale.
class GaussianLikelihood final : public Likelihood {
 public:
  enum class Scale { LogPrecision, LogVariance };

  explicit GaussianLikelihood(double known_variance);
  GaussianLikelihood(int theta_index, Scale scale);

  std::string name() const override { return "gaussian"; }
  double variance(const Eigen::VectorXd& theta) const;
  double log_density(double y, double eta, const Eigen::VectorXd& theta) const override;
  double d1(double y, double eta, const Eigen::VectorXd& theta) const override;
  double d2(double y, double eta, const Eigen::VectorXd& theta) const override;

 private:
  double known_variance_ = 1;
  int theta_index_ = -1;
  Scale scale_ = Scale::LogVariance;
};

/// y ~ Poisson(exp(eta)).
class PoissonLikelihood final : public Likelihood {
 public:
  std::string name() const override { return "poisson"; }
  double log_density(double y, double eta, const Eigen::VectorXd& theta) const override;
  double d1(double y, double eta, const Eigen::VectorXd& theta) const override;
  double d2(double y, double eta, const Eigen::VectorXd& theta) const override;
};

struct LgmSpec {
  Eigen::MatrixXd design;    // A, n x p
  Eigen::VectorXd response;  // y, length n
  std::shared_ptr<const Likelihood> likelihood;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> prior_precision;  // theta -> Q, p x p
  std::function<double(const Eigen::VectorXd&)> theta_log_prior;           // empty means flat
  int theta_dim = 0;
  Eigen::VectorXd theta_start;  // optimizer start; zeros when empty

  int latent_dim() const { return static_cast<int>(design.cols()); }
  void validate() const;
};

double log_joint(const LgmSpec& spec, const Eigen::VectorXd& latent, const Eigen::VectorXd& theta);
Eigen::VectorXd log_joint_gradient(const LgmSpec& spec, const Eigen::VectorXd& latent, const Eigen::VectorXd& theta);
// Q(theta) - A' diag(d2 log pi(y | eta)) A.
Eigen::MatrixXd assemble_neg_hessian(const LgmSpec& spec, const Eigen::VectorXd& latent, const Eigen::VectorXd& theta);

struct LatentMode {
  Eigen::VectorXd mode;
  Eigen::MatrixXd neg_hessian;
  double log_joint = 0;
  double gradient_norm = 0;
  int iterations = 0;
};

/// Newton with step halving from U = 0.
LatentMode latent_mode(const LgmSpec& spec, const Eigen::VectorXd& theta);

/// log pi(U_hat, theta, y) + (p/2) log 2 pi - (1/2) log det H.
double laplace_log_joint(const LgmSpec& spec, const Eigen::VectorXd& theta);
double laplace_log_joint(const LgmSpec& spec, const Eigen::VectorXd& theta, const LatentMode& at_mode);

/// Process-wide count of LgmFit objects alive.
int live_fit_count();

class LiveFitToken {
 public:
  LiveFitToken() { counter().fetch_add(1); }
  LiveFitToken(const LiveFitToken&) { counter().fetch_add(1); }
  LiveFitToken& operator=(const LiveFitToken&) = default;
  ~LiveFitToken() { counter().fetch_sub(1); }
  static std::atomic<int>& counter();
};

struct LgmFit {
  AghqResult<double> theta_quadrature;
  std::vector<Eigen::VectorXd> latent_modes;           // one per theta node
  std::vector<Eigen::LLT<Eigen::MatrixXd>> hessians;   // factor of H(theta) per node
  double log_marginal_likelihood = 0;
  LiveFitToken token;

  int theta_dim() const { return theta_quadrature.dims(); }
  Eigen::VectorXd node_weights() const;
};

struct FitOptions {
  double nm_tol = 1e-8;
  double hessian_step = 1e-4;
};

LgmFit fit_lgm(const LgmSpec& spec, int k_theta, const FitOptions& opts = {});

/// Mixture over theta nodes of N(v' U_hat, v' H^{-1} v).
GaussianMixture latent_conditional(const LgmFit& fit, const Eigen::VectorXd& functional);

/// Normal approximation to the posterior of theta_j: quadrature moments for
/// k >= 2, the Laplace curvature for k = 1.
GaussianMixture theta_marginal(const LgmFit& fit, int j);

}  // namespace boss
