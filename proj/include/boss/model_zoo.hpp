#pragma once

// Conditional LGMs (alpha -> LgmSpec) and data simulators for the benchmark
// problems, plus three closed-form test log posteriors on [0, 10].

#include "boss/bo_engine.hpp"
#include "boss/lgm_core.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace boss {

struct Dataset {
  std::string x_name = "x";
  Eigen::VectorXd x;
  Eigen::VectorXd y;

  Eigen::Index size() const { return x.size(); }
};

// CSV with a header row: <x_name>,y.
void write_dataset_csv(std::ostream& os, const Dataset& data);
Dataset read_dataset_csv(std::istream& is);
Dataset read_dataset_csv_file(const std::string& path);

struct ConditionalModel {
  std::string name;
  std::function<LgmSpec(const Eigen::VectorXd&)> build;
  std::function<double(const Eigen::VectorXd&)> alpha_log_prior;
  SearchSpace space;
  std::vector<std::string> latent_names;  // leading latent coordinates worth reporting
  std::vector<std::string> theta_names;
};

struct AnalyticPosterior {
  LogDensityFn log_density;
  SearchSpace space;
  std::string label;  // simple, medium or hard
};

std::vector<AnalyticPosterior> analytic_suite();
AnalyticPosterior analytic_posterior(const std::string& label);

struct PeriodicPoissonSample {
  Dataset data;
  Eigen::VectorXd noise;     // the observation-level effects drawn
  Eigen::VectorXd log_mean;  // log mu_i including the noise
};

/// n points equally spaced on [0, 5], Poisson counts with a period-1.5
/// two-harmonic log mean and N(0, 4) overdispersion.
PeriodicPoissonSample simulate_periodic_poisson(std::uint64_t seed, int n = 100);

/// Unknown period alpha on [0.5, 4.5] with an N(3, 0.5^2) prior; latent field
/// is (beta_0..beta_4, eps_1..eps_n); theta = -2 log sigma.
ConditionalModel periodic_poisson_model(const Dataset& data);

struct PlummerTruth {
  double rho0 = 10, radius = 2, shape = 2, gamma = -2.5, sigma = 0.5;
};

/// n radii equally spaced on [0.1, 10]; y = log rho0 - gamma log(1 + (r/R)^beta) + N(0, sigma^2).
Dataset simulate_plummer(std::uint64_t seed, int n = 201, const PlummerTruth& truth = {});

// Covariate -log(1 + (r/R)^beta).
double plummer_covariate(double r, double radius, double shape);

/// alpha = (R, beta) on [0.1, 5] x [0.1, 4] with uniform priors; latent field
/// is (log rho0, gamma); theta = log sigma^2 with an Inv-Gamma(1, 1e-5) prior.
ConditionalModel plummer_model(const Dataset& data);

/// Counts true-model (LGM) fits so the B + K^d budget can be audited.
struct FitCounter {
  int count = 0;
};

/// f(alpha) = log pi~(y | alpha) + log pi(alpha), one fit_lgm per call.
LogDensityFn conditional_log_posterior(const ConditionalModel& model, int k_theta, FitCounter* counter = nullptr);

}  // namespace boss
