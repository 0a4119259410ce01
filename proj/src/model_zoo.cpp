#include "boss/model_zoo.hpp"

#include "boss/errors.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace boss {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
    out.push_back(cell);
  }
  return out;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const Dataset& data) {
  os << data.x_name << ",y\n";
  for (Eigen::Index i = 0; i < data.size(); ++i) os << format_double(data.x(i)) << ',' << format_double(data.y(i)) << '\n';
}

Dataset read_dataset_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("dataset: empty file");
  const auto header = split_csv_line(line);
  int xcol = -1, ycol = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x" || header[i] == "r") xcol = static_cast<int>(i);
    if (header[i] == "y") ycol = static_cast<int>(i);
  }
  if (xcol < 0 || ycol < 0) throw InvalidArgument("dataset: header must name columns x (or r) and y");
  Dataset d;
  d.x_name = header[static_cast<std::size_t>(xcol)];
  std::vector<double> xs, ys;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw InvalidArgument("dataset: line " + std::to_string(lineno) + " has too few fields");
    try {
      xs.push_back(std::stod(cells[static_cast<std::size_t>(xcol)]));
      ys.push_back(std::stod(cells[static_cast<std::size_t>(ycol)]));
    } catch (const std::exception&) {
      throw InvalidArgument("dataset: line " + std::to_string(lineno) + " is not numeric");
    }
  }
  d.x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  d.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return d;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("dataset: cannot open " + path);
  return read_dataset_csv(in);
}

std::vector<AnalyticPosterior> analytic_suite() {
  const SearchSpace omega(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 10.0));
  return {
      {[](const Eigen::VectorXd& a) { return a(0) * std::sin(a(0)); }, omega, "simple"},
      {[](const Eigen::VectorXd& a) { return std::log(a(0) + 1) * std::sin(2 * a(0)) - a(0) * std::cos(2 * a(0)); },
       omega, "medium"},
      {[](const Eigen::VectorXd& a) { return std::log(a(0) + 1) * (std::sin(4 * a(0)) + std::cos(2 * a(0))); }, omega,
       "hard"},
  };
}

AnalyticPosterior analytic_posterior(const std::string& label) {
  for (auto& p : analytic_suite())
    if (p.label == label) return p;
  throw InvalidArgument("unknown analytic posterior '" + label + "' (expected simple, medium or hard)");
}

PeriodicPoissonSample simulate_periodic_poisson(std::uint64_t seed, int n) {
  if (n < 2) throw InvalidArgument("simulate_periodic_poisson: need n >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 2.0);
  PeriodicPoissonSample s;
  s.data.x_name = "x";
  s.data.x.resize(n);
  s.data.y.resize(n);
  s.noise.resize(n);
  s.log_mean.resize(n);
  for (int i = 0; i < n; ++i) {
    const double x = 5.0 * i / (n - 1);
    const double w = 2 * kPi * x / 1.5;
    s.noise(i) = noise(rng);
    s.log_mean(i) = 1 + 0.5 * std::cos(w) - 1.3 * std::sin(w) + 1.1 * std::cos(2 * w) + 0.3 * std::sin(2 * w) + s.noise(i);
    std::poisson_distribution<long long> counts(std::exp(s.log_mean(i)));
    s.data.x(i) = x;
    s.data.y(i) = static_cast<double>(counts(rng));
  }
  return s;
}

ConditionalModel periodic_poisson_model(const Dataset& data) {
  const Eigen::Index n = data.size();
  constexpr int kFixed = 5;
  const double rate = std::log(2.0);  // P(sigma > 1) = 1/2

  ConditionalModel m;
  m.name = "periodic-poisson";
  m.space = SearchSpace(Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 4.5));
  m.latent_names = {"beta0", "beta1", "beta2", "beta3", "beta4"};
  m.theta_names = {"log_precision"};
  m.alpha_log_prior = [](const Eigen::VectorXd& a) {
    const double z = (a(0) - 3.0) / 0.5;
    return -0.5 * z * z - std::log(0.5) - 0.5 * log_two_pi<double>();
  };
  m.build = [data, n, rate](const Eigen::VectorXd& a) {
    const double period = a(0);
    if (!(period > 0)) throw InvalidArgument("periodic_poisson_model: period must be positive");
    LgmSpec spec;
    spec.design = Eigen::MatrixXd::Zero(n, kFixed + n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = 2 * kPi * data.x(i) / period;
      spec.design(i, 0) = 1;
      spec.design(i, 1) = std::cos(w);
      spec.design(i, 2) = std::sin(w);
      spec.design(i, 3) = std::cos(2 * w);
      spec.design(i, 4) = std::sin(2 * w);
      spec.design(i, kFixed + i) = 1;
    }
    spec.response = data.y;
    spec.likelihood = std::make_shared<PoissonLikelihood>();
    spec.theta_dim = 1;
    spec.theta_start = Eigen::VectorXd::Zero(1);
    spec.prior_precision = [n](const Eigen::VectorXd& theta) {
      Eigen::VectorXd diag(kFixed + n);
      diag.head(kFixed).setConstant(1e-3);
      diag.tail(n).setConstant(std::exp(theta(0)));
      return Eigen::MatrixXd(diag.asDiagonal());
    };
    // Exponential(rate) on sigma, carried to theta = -2 log sigma.
    spec.theta_log_prior = [rate](const Eigen::VectorXd& theta) {
      const double sigma = std::exp(-0.5 * theta(0));
      return std::log(rate) - rate * sigma + std::log(0.5 * sigma);
    };
    return spec;
  };
  return m;
}

double plummer_covariate(double r, double radius, double shape) { return -std::log1p(std::pow(r / radius, shape)); }

Dataset simulate_plummer(std::uint64_t seed, int n, const PlummerTruth& truth) {
  if (n < 2) throw InvalidArgument("simulate_plummer: need n >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, truth.sigma);
  Dataset d;
  d.x_name = "r";
  d.x.resize(n);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double r = 0.1 + 9.9 * i / (n - 1);
    d.x(i) = r;
    d.y(i) = std::log(truth.rho0) + truth.gamma * plummer_covariate(r, truth.radius, truth.shape) + noise(rng);
  }
  return d;
}

ConditionalModel plummer_model(const Dataset& data) {
  for (Eigen::Index i = 0; i < data.size(); ++i)
    if (!(data.x(i) > 0)) throw InvalidArgument("plummer_model: radii must be positive");
  const Eigen::Index n = data.size();
  const Eigen::Vector2d lower(0.1, 0.1), upper(5.0, 4.0);

  ConditionalModel m;
  m.name = "plummer";
  m.space = SearchSpace(lower, upper);
  m.latent_names = {"log_rho0", "gamma"};
  m.theta_names = {"log_sigma2"};
  m.alpha_log_prior = [lower, upper](const Eigen::VectorXd& a) {
    if ((a.array() < lower.array()).any() || (a.array() > upper.array()).any())
      return -std::numeric_limits<double>::infinity();
    return -std::log(upper(0) - lower(0)) - std::log(upper(1) - lower(1));
  };
  m.build = [data, n](const Eigen::VectorXd& a) {
    if (!(a(0) > 0) || !(a(1) > 0)) throw InvalidArgument("plummer_model: (R, beta) must be positive");
    LgmSpec spec;
    spec.design.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      spec.design(i, 0) = 1;
      spec.design(i, 1) = plummer_covariate(data.x(i), a(0), a(1));
    }
    spec.response = data.y;
    spec.likelihood = std::make_shared<GaussianLikelihood>(0, GaussianLikelihood::Scale::LogVariance);
    spec.theta_dim = 1;
    spec.theta_start = Eigen::VectorXd::Zero(1);
    spec.prior_precision = [](const Eigen::VectorXd&) { return Eigen::MatrixXd(Eigen::Matrix2d::Identity() * 1e-3); };
    // Inv-Gamma(1, b) on sigma^2, carried to theta = log sigma^2.
    spec.theta_log_prior = [](const Eigen::VectorXd& theta) {
      constexpr double b = 1e-5;
      return std::log(b) - theta(0) - b * std::exp(-theta(0));
    };
    return spec;
  };
  return m;
}

LogDensityFn conditional_log_posterior(const ConditionalModel& model, int k_theta, FitCounter* counter) {
  return [model, k_theta, counter](const Eigen::VectorXd& a) {
    const double prior = model.alpha_log_prior(a);
    const LgmFit fit = fit_lgm(model.build(a), k_theta);
    if (counter) ++counter->count;
    return fit.log_marginal_likelihood + prior;
  };
}

}  // namespace boss
