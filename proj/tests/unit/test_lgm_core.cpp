#include "boss/lgm_core.hpp"

#include "instances.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const VectorXd kNoTheta(0);

boss::LgmSpec one_poisson() {
  boss::LgmSpec s;
  s.design = MatrixXd::Ones(1, 1);
  s.response = VectorXd::Ones(1);
  s.likelihood = std::make_shared<boss::PoissonLikelihood>();
  s.prior_precision = [](const VectorXd&) { return MatrixXd(MatrixXd::Identity(1, 1)); };
  return s;
}

}  // namespace

TEST_SUITE("lgm_core") {
  TEST_CASE("likelihood derivatives match central differences") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> eta_d(-2, 2), theta_d(-1.5, 1.5);
    std::poisson_distribution<int> count(3);
    std::normal_distribution<double> z;
    const boss::PoissonLikelihood pois;
    const boss::GaussianLikelihood gvar(0, boss::GaussianLikelihood::Scale::LogVariance);
    const boss::GaussianLikelihood gprec(0, boss::GaussianLikelihood::Scale::LogPrecision);
    const boss::GaussianLikelihood gknown(0.7);
    const double h = 1e-5;
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    for (int rep = 0; rep < 100; ++rep) {
      const double eta = eta_d(rng);
      const VectorXd th = VectorXd::Constant(1, theta_d(rng));
      for (const boss::Likelihood* lik : std::initializer_list<const boss::Likelihood*>{&pois, &gvar, &gprec, &gknown}) {
        const double y = lik == &pois ? count(rng) : z(rng);
        const double fd1 = (lik->log_density(y, eta + h, th) - lik->log_density(y, eta - h, th)) / (2 * h);
        const double fd2 = (lik->d1(y, eta + h, th) - lik->d1(y, eta - h, th)) / (2 * h);
        CHECK(rel(lik->d1(y, eta, th), fd1) <= 1e-5);
        CHECK(rel(lik->d2(y, eta, th), fd2) <= 1e-5);
      }
    }
  }

  TEST_CASE("Gaussian likelihood: mode is the ridge solution after one Newton step") {
    std::mt19937_64 rng(1);
    auto c = instances::gaussian_conjugate(rng, 12, 4);
    const auto m = boss::latent_mode(c.spec, kNoTheta);
    CHECK(m.iterations == 1);
    CHECK((m.mode - c.posterior_mean()).norm() <= 1e-10 * (1 + c.posterior_mean().norm()));
    CHECK((m.neg_hessian - c.posterior_precision()).norm() <= 1e-10 * c.posterior_precision().norm());
  }

  TEST_CASE("Poisson with all-zero counts shrinks every eta below zero") {
    std::mt19937_64 rng(2);
    auto s = instances::poisson_instance(rng, 10, 3);
    // Non-negative design and a diagonal prior make the sign argument exact.
    s.design = s.design.cwiseAbs();
    s.prior_precision = [](const VectorXd&) { return MatrixXd(MatrixXd::Identity(3, 3)); };
    s.response.setZero();
    const auto m = boss::latent_mode(s, kNoTheta);
    CHECK(((s.design * m.mode).array() < 0).all());
    // Gradient-ascent oracle on the same objective.
    VectorXd u = VectorXd::Zero(3);
    for (int it = 0; it < 2000; ++it) u += 0.05 * boss::log_joint_gradient(s, u, kNoTheta);
    CHECK((u - m.mode).norm() <= 1e-6);
    CHECK(m.gradient_norm <= 1e-6 * (1 + boss::log_joint_gradient(s, VectorXd::Zero(3), kNoTheta).norm()));
  }

  TEST_CASE("one-observation Poisson mode against bisection") {
    const auto s = one_poisson();
    // d/du [u - e^u - u^2 / 2] = 1 - e^u - u.
    const double root = oracle::bisect([](double u) { return 1 - std::exp(u) - u; }, -3, 3);
    const auto m = boss::latent_mode(s, kNoTheta);
    CHECK(std::abs(m.mode(0) - root) <= 1e-8);
  }

  TEST_CASE("Laplace is exact on Gaussian conjugate models") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 25; ++rep) {
      const int n = 1 + static_cast<int>(rng() % 30), p = 1 + static_cast<int>(rng() % 8);
      auto c = instances::gaussian_conjugate(rng, n, p);
      CHECK(std::abs(boss::laplace_log_joint(c.spec, kNoTheta) - c.closed_form()) <= 1e-8);
    }
  }

  TEST_CASE("no data: Laplace of the prior integrates to one") {
    boss::LgmSpec s;
    s.design = MatrixXd(0, 3);
    s.response = VectorXd(0);
    s.likelihood = std::make_shared<boss::GaussianLikelihood>(1.0);
    std::mt19937_64 rng(4);
    const MatrixXd q = oracle::random_spd(rng, 3);
    s.prior_precision = [q](const VectorXd&) { return q; };
    CHECK(std::abs(boss::laplace_log_joint(s, kNoTheta)) <= 1e-12);
  }

  TEST_CASE("one-observation Poisson Laplace within 2% of quadrature") {
    const auto s = one_poisson();
    const double integral = oracle::trapezoid(
        [&](double u) { return std::exp(boss::log_joint(s, VectorXd::Constant(1, u), kNoTheta)); }, -10, 10, 1000001);
    const double lap = boss::laplace_log_joint(s, kNoTheta);
    CHECK(std::isfinite(lap));
    CHECK(std::abs(std::exp(lap) / integral - 1) <= 0.02);
  }

  TEST_CASE("assembled Hessian equals a finite-difference Hessian") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      const int n = 2 + static_cast<int>(rng() % 19), p = 1 + static_cast<int>(rng() % 5);
      boss::LgmSpec s = rep % 2 ? instances::poisson_instance(rng, n, p) : instances::gaussian_conjugate(rng, n, p).spec;
      const VectorXd u = oracle::random_matrix(rng, p, 1, 0.3);
      const MatrixXd fd =
          -oracle::fd_hessian([&](const VectorXd& x) { return boss::log_joint(s, x, kNoTheta); }, u, 1e-4);
      const MatrixXd h = boss::assemble_neg_hessian(s, u, kNoTheta);
      CHECK((h - fd).norm() <= 1e-4 * h.norm());
    }
  }

  TEST_CASE("fit_lgm without hyperparameters equals the closed form") {
    std::mt19937_64 rng(6);
    auto c = instances::gaussian_conjugate(rng, 15, 3);
    const auto fit = boss::fit_lgm(c.spec, 5);
    CHECK(std::abs(fit.log_marginal_likelihood - c.closed_form()) <= 1e-8);
    CHECK(fit.latent_modes.size() == 1);
  }

  TEST_CASE("fit_lgm quadrature self-consistency and k = 1 Laplace limit") {
    std::mt19937_64 rng(7);
    const auto s = instances::gaussian_unknown_precision(rng, 40, 3, 1.0);
    const double k5 = boss::fit_lgm(s, 5).log_marginal_likelihood;
    const double k25 = boss::fit_lgm(s, 25).log_marginal_likelihood;
    CHECK(std::abs(k5 - k25) <= 1e-4);

    const auto f1 = boss::fit_lgm(s, 1);
    const VectorXd th = f1.theta_quadrature.mode;
    auto g = [&](const VectorXd& t) { return boss::laplace_log_joint(s, t); };
    const double curv = -oracle::fd_hessian(g, th, 1e-3)(0, 0);
    const double laplace = g(th) + 0.5 * std::log(2 * std::numbers::pi) - 0.5 * std::log(curv);
    CHECK(std::abs(f1.log_marginal_likelihood - laplace) <= 1e-6);
  }

  TEST_CASE("fit_lgm converges to a trapezoid integral over theta") {
    std::mt19937_64 rng(7);
    const auto s = instances::gaussian_unknown_precision(rng, 40, 3, 1.0);
    // The Laplace joint is exact for this conjugate family, so only theta is integrated.
    auto g = [&](double t) { return boss::laplace_log_joint(s, VectorXd::Constant(1, t)); };
    const double shift = g(1.0);
    const double truth = shift + std::log(oracle::trapezoid([&](double t) { return std::exp(g(t) - shift); }, -10, 10, 40001));
    CHECK(std::abs(boss::fit_lgm(s, 25).log_marginal_likelihood - truth) <= 1e-9);
    CHECK(std::abs(boss::fit_lgm(s, 11).log_marginal_likelihood - truth) <= 1e-5);
  }

  TEST_CASE("fit_lgm differences shrink as k grows") {
    std::mt19937_64 rng(8);
    const auto s = instances::gaussian_unknown_precision(rng, 25, 2, 0.0);
    std::vector<double> v;
    for (int k = 1; k <= 11; k += 2) v.push_back(boss::fit_lgm(s, k).log_marginal_likelihood);
    for (std::size_t i = 2; i < v.size(); ++i) CHECK(std::abs(v[i] - v[i - 1]) <= std::abs(v[i - 1] - v[i - 2]));
  }

  TEST_CASE("latent conditional: single node, conjugate posterior, zero functional") {
    std::mt19937_64 rng(9);
    auto c = instances::gaussian_conjugate(rng, 20, 4);
    const auto fit = boss::fit_lgm(c.spec, 1);
    const VectorXd v = oracle::random_matrix(rng, 4, 1);
    const auto mix = boss::latent_conditional(fit, v);
    CHECK(mix.size() == 1);
    CHECK(mix.mean() == doctest::Approx(v.dot(fit.latent_modes[0])).epsilon(1e-14));
    const MatrixXd cov = c.posterior_precision().inverse();
    CHECK(std::abs(mix.mean() - v.dot(c.posterior_mean())) <= 1e-6);
    CHECK(std::abs(mix.sd() - std::sqrt(v.dot(cov * v))) <= 1e-6);

    const auto zero = boss::latent_conditional(fit, VectorXd::Zero(4));
    CHECK(zero.mean() == 0.0);
    CHECK(zero.sd() == 0.0);
    CHECK(zero.quantile(0.025) == 0.0);
    CHECK(zero.quantile(0.975) == 0.0);
    CHECK_THROWS_AS(boss::latent_conditional(fit, VectorXd::Zero(3)), boss::InvalidArgument);
  }

  TEST_CASE("mode gradient meets the relative tolerance at every theta node") {
    std::mt19937_64 rng(10);
    auto s = instances::gaussian_unknown_precision(rng, 30, 3, 0.5);
    const auto fit = boss::fit_lgm(s, 3);
    REQUIRE(fit.latent_modes.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      const VectorXd th = fit.theta_quadrature.adapted_nodes.col(static_cast<Eigen::Index>(i));
      const double g0 = boss::log_joint_gradient(s, VectorXd::Zero(3), th).norm();
      CHECK(boss::log_joint_gradient(s, fit.latent_modes[i], th).norm() <= 1e-6 * (1 + g0));
      const Eigen::MatrixXd l = fit.hessians[i].matrixL();
      CHECK((l.diagonal().array() > 0).all());
    }
  }

  TEST_CASE("theta marginal is centred near the generating value") {
    std::mt19937_64 rng(12);
    const auto s = instances::gaussian_unknown_precision(rng, 400, 2, 2.0);
    const auto fit = boss::fit_lgm(s, 7);
    const auto m = boss::theta_marginal(fit, 0);
    CHECK(std::abs(m.mean() - 2.0) <= 3 * m.sd());
    CHECK_THROWS_AS(boss::theta_marginal(fit, 1), boss::InvalidArgument);
  }

  TEST_CASE("live fit counter tracks LgmFit lifetimes") {
    std::mt19937_64 rng(13);
    auto c = instances::gaussian_conjugate(rng, 5, 2);
    const int before = boss::live_fit_count();
    {
      const auto a = boss::fit_lgm(c.spec, 1);
      const auto b = a;
      CHECK(boss::live_fit_count() == before + 2);
    }
    CHECK(boss::live_fit_count() == before);
  }

  TEST_CASE("invalid specs are rejected") {
    boss::LgmSpec s = one_poisson();
    s.response = VectorXd::Ones(2);
    CHECK_THROWS_AS(boss::latent_mode(s, kNoTheta), boss::InvalidArgument);
    boss::LgmSpec t = one_poisson();
    t.prior_precision = [](const VectorXd&) { return MatrixXd(MatrixXd::Constant(1, 1, -1.0)); };
    CHECK_THROWS_AS(boss::latent_mode(t, kNoTheta), boss::CurvatureError);
  }
}
