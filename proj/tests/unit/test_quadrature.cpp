#include "boss/quadrature.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using boss::aghq_normalize;
using boss::gh_polynomial_check;
using boss::gh_rule;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double double_factorial(int n) {
  double r = 1;
  for (int i = n; i > 1; i -= 2) r *= i;
  return r;
}

const double kLogSqrt2Pi = 0.5 * std::log(2 * std::numbers::pi);

}  // namespace

TEST_SUITE("quadrature") {
  TEST_CASE("small rules match their closed forms") {
    const auto r1 = gh_rule(1);
    CHECK(r1.nodes(0) == 0.0);
    CHECK(r1.weights(0) == 1.0);

    const auto r2 = gh_rule(2);
    CHECK(r2.nodes(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r2.nodes(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r2.weights(0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r2.weights(1) == doctest::Approx(0.5).epsilon(1e-14));

    const auto r3 = gh_rule(3);
    CHECK(r3.nodes(0) == doctest::Approx(-std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r3.nodes(1) == 0.0);
    CHECK(r3.nodes(2) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r3.weights(0) == doctest::Approx(1.0 / 6).epsilon(1e-14));
    CHECK(r3.weights(1) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(r3.weights(2) == doctest::Approx(1.0 / 6).epsilon(1e-14));
  }

  TEST_CASE("invalid point counts are rejected") {
    CHECK_THROWS_AS(gh_rule(0), boss::InvalidArgument);
    CHECK_THROWS_AS(gh_rule(-3), boss::InvalidArgument);
    CHECK_THROWS_AS(gh_rule(51), boss::InvalidArgument);
    CHECK_THROWS_AS(gh_rule(2.5), boss::InvalidArgument);
    CHECK(gh_rule(4.0).k == 4);
  }

  TEST_CASE("weights are positive, sum to one, nodes symmetric") {
    for (int k = 1; k <= boss::kMaxGhPoints; ++k) {
      const auto r = gh_rule(k);
      CHECK((r.weights.array() > 0).all());
      CHECK(std::abs(r.weights.sum() - 1.0) <= 1e-12);
      for (int i = 0; i < k; ++i) CHECK(r.nodes(i) == -r.nodes(k - 1 - i));
      if (k % 2 == 1) CHECK(r.nodes(k / 2) == 0.0);
    }
  }

  TEST_CASE("polynomial check examples") {
    CHECK(gh_polynomial_check(gh_rule(3), 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gh_polynomial_check(gh_rule(3), 4) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(gh_polynomial_check(gh_rule(2), 1)) <= 1e-15);
    CHECK_THROWS_AS(gh_polynomial_check(gh_rule(3), 6), boss::InvalidArgument);
  }

  TEST_CASE("Gaussian moments up to degree 2k-1, relative 1e-10") {
    for (int k = 1; k <= 15; ++k) {
      const auto r = gh_rule(k);
      for (int deg = 0; deg <= 2 * k - 1; ++deg) {
        const double exact = deg % 2 ? 0.0 : double_factorial(deg - 1);
        const double got = gh_polynomial_check(r, deg);
        CHECK(std::abs(got - exact) <= 1e-10 * std::max(1.0, exact));
      }
    }
  }

  TEST_CASE("AGHQ on standard and shifted normal kernels") {
    auto std_normal = [](const VectorXd& t) { return -0.5 * t.squaredNorm(); };
    const auto a = aghq_normalize<double>(std_normal, VectorXd::Zero(1), MatrixXd::Identity(1, 1), 1);
    CHECK(std::abs(a.log_norm_const - kLogSqrt2Pi) <= 1e-12);

    auto shifted = [](const VectorXd& t) { return -(t(0) - 3) * (t(0) - 3) / 8; };
    const auto b = aghq_normalize<double>(shifted, VectorXd::Constant(1, 3.0), MatrixXd::Constant(1, 1, 0.25), 3);
    CHECK(std::abs(b.log_norm_const - std::log(2 * std::sqrt(2 * std::numbers::pi))) <= 1e-12);
    CHECK(b.size() == 3);
    CHECK(b.chol(0, 0) == doctest::Approx(2.0));
  }

  TEST_CASE("AGHQ on the quartic kernel approaches the trapezoid value") {
    const double truth = oracle::trapezoid([](double t) { return std::exp(-t * t * t * t); }, -5, 5, 1000001);
    CHECK(truth == doctest::Approx(1.8128050).epsilon(1e-7));
    auto quartic = [](const VectorXd& t) { return -std::pow(t(0), 4); };
    // Curvature of -theta^4 vanishes at 0; use the secant over a unit step.
    const MatrixXd h = MatrixXd::Constant(1, 1, 2.0);
    const auto k7 = aghq_normalize<double>(quartic, VectorXd::Zero(1), h, 7);
    CHECK(std::abs(std::exp(k7.log_norm_const) / truth - 1) <= 0.05);
    const auto k25 = aghq_normalize<double>(quartic, VectorXd::Zero(1), h, 25);
    CHECK(std::abs(std::exp(k25.log_norm_const) / truth - 1) <= 1e-3);
  }

  TEST_CASE("AGHQ is exact for random Gaussian kernels at every k") {
    std::mt19937_64 rng(7);
    for (int d = 1; d <= 2; ++d)
      for (int rep = 0; rep < 10; ++rep) {
        const MatrixXd h = oracle::random_spd(rng, d);
        const VectorXd mu = oracle::random_matrix(rng, d, 1, 2.0);
        const double c = 1.5;
        auto f = [&](const VectorXd& t) { return c - 0.5 * (t - mu).dot(h * (t - mu)); };
        const double exact = c + 0.5 * d * std::log(2 * std::numbers::pi) - 0.5 * std::log(h.determinant());
        for (int k = 1; k <= 6; ++k) {
          const auto r = aghq_normalize<double>(f, mu, h, k);
          CHECK(std::abs(r.log_norm_const - exact) <= 1e-8);
          CHECK(r.size() == static_cast<Eigen::Index>(std::pow(k, d)));
          CHECK(std::abs(std::exp(boss::log_sum_exp(r.normalized_log_weights())) - 1) <= 1e-12);
          for (int i = 0; i < d; ++i) CHECK(r.chol(i, i) > 0);
        }
      }
  }

  TEST_CASE("AGHQ is invariant under affine reparameterization") {
    auto g = [](const VectorXd& t) { return -0.5 * t(0) * t(0) - 0.1 * std::pow(t(0), 4); };
    const auto base = aghq_normalize<double>(g, VectorXd::Zero(1), MatrixXd::Identity(1, 1), 9);
    const double shift = 2.0, scale = 0.3;
    // phi = (theta - shift) / scale has density g(shift + scale phi) * scale.
    auto gphi = [&](const VectorXd& p) { return g(VectorXd::Constant(1, shift + scale * p(0))) + std::log(scale); };
    const auto moved = aghq_normalize<double>(gphi, VectorXd::Constant(1, -shift / scale),
                                              MatrixXd::Constant(1, 1, scale * scale), 9);
    CHECK(std::abs(moved.log_norm_const - base.log_norm_const) <= 1e-8);
  }

  TEST_CASE("AGHQ reports non-PD curvature and non-finite nodes") {
    auto f = [](const VectorXd& t) { return -0.5 * t.squaredNorm(); };
    CHECK_THROWS_AS(aghq_normalize<double>(f, VectorXd::Zero(1), MatrixXd::Constant(1, 1, -1.0), 3),
                    boss::FactorizationError);
    auto bad = [](const VectorXd& t) { return t(0) > 0.5 ? std::nan("") : -0.5 * t(0) * t(0); };
    CHECK_THROWS_AS(aghq_normalize<double>(bad, VectorXd::Zero(1), MatrixXd::Identity(1, 1), 3), boss::EvaluationError);
  }

  TEST_CASE("rules work in long double") {
    const auto r = gh_rule<long double>(5);
    CHECK(std::abs(static_cast<double>(gh_polynomial_check(r, 8)) - 105.0) <= 1e-12);
  }
}
