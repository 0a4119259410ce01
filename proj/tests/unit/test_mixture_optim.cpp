#include "boss/errors.hpp"
#include "boss/mixture.hpp"
#include "boss/optim.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using boss::GaussianMixture;
using Eigen::VectorXd;

TEST_SUITE("mixture") {
  TEST_CASE("single component behaves like a normal") {
    const GaussianMixture m({1.0}, {2.0}, {3.0});
    CHECK(m.mean() == 2.0);
    CHECK(m.sd() == doctest::Approx(3.0));
    CHECK(m.cdf(2.0) == doctest::Approx(0.5));
    CHECK(m.pdf(2.0) == doctest::Approx(oracle::normal_pdf(0) / 3));
    CHECK(m.quantile(0.975) == doctest::Approx(2 + 3 * 1.959964).epsilon(1e-7));
    CHECK(m.mode() == doctest::Approx(2.0).epsilon(1e-3));
  }

  TEST_CASE("two components: moments, CDF and quantile") {
    const GaussianMixture m({1.0, 3.0}, {-1.0, 2.0}, {0.5, 1.0});
    CHECK(m.weights()[0] == doctest::Approx(0.25));
    CHECK(m.mean() == doctest::Approx(0.25 * -1 + 0.75 * 2));
    const double second = 0.25 * (0.25 + 1) + 0.75 * (1 + 4);
    CHECK(m.variance() == doctest::Approx(second - m.mean() * m.mean()));
    const double x = 0.3;
    CHECK(m.cdf(x) == doctest::Approx(0.25 * oracle::normal_cdf((x + 1) / 0.5) + 0.75 * oracle::normal_cdf(x - 2)));
    for (double p : {0.01, 0.3, 0.5, 0.9}) CHECK(std::abs(m.cdf(m.quantile(p)) - p) <= 1e-8);
    CHECK_THROWS_AS(m.quantile(1.0), boss::InvalidArgument);
  }

  TEST_CASE("point masses and combination") {
    const GaussianMixture pm({1.0}, {4.0}, {0.0});
    CHECK(pm.cdf(3.999) == 0.0);
    CHECK(pm.cdf(4.0) == 1.0);
    CHECK(pm.quantile(0.3) == 4.0);
    const GaussianMixture a({1.0}, {0.0}, {1.0}), b({1.0, 1.0}, {1.0, 3.0}, {1.0, 1.0});
    const auto c = GaussianMixture::combine({a, b}, {1.0, 1.0});
    CHECK(c.size() == 3);
    CHECK(c.mean() == doctest::Approx(0.5 * 0 + 0.5 * 2));
    CHECK_THROWS_AS(GaussianMixture({-1.0}, {0.0}, {1.0}), boss::InvalidArgument);
  }
}

TEST_SUITE("optim") {
  TEST_CASE("Nelder-Mead finds the Rosenbrock minimum") {
    auto rosen = [](const VectorXd& x) { return 100 * std::pow(x(1) - x(0) * x(0), 2) + std::pow(1 - x(0), 2); };
    boss::optim::NelderMeadOptions o;
    o.f_tol = 1e-12;
    o.x_tol = 1e-10;
    const auto m = boss::optim::nelder_mead(rosen, VectorXd::Constant(2, -1.0), o);
    CHECK(m.converged);
    CHECK((m.x - VectorXd::Ones(2)).norm() <= 1e-4);
  }

  TEST_CASE("BFGS on a quadratic") {
    Eigen::Matrix2d a;
    a << 3, 1, 1, 2;
    const Eigen::Vector2d b(1, -1);
    auto f = [&](const VectorXd& x) { return 0.5 * x.dot(a * x) - b.dot(x); };
    const auto m = boss::optim::bfgs(f, VectorXd::Zero(2));
    CHECK(m.converged);
    CHECK((m.x - a.ldlt().solve(b)).norm() <= 1e-6);
  }

  TEST_CASE("finite-difference derivatives") {
    auto f = [](const VectorXd& x) { return std::sin(x(0)) * std::exp(x(1)); };
    const Eigen::Vector2d x(0.4, -0.3);
    const VectorXd g = boss::optim::fd_gradient(f, x, 1e-6);
    CHECK(g(0) == doctest::Approx(std::cos(0.4) * std::exp(-0.3)).epsilon(1e-8));
    const Eigen::MatrixXd h = boss::optim::fd_hessian(f, x, 1e-4);
    CHECK(h(0, 0) == doctest::Approx(-std::sin(0.4) * std::exp(-0.3)).epsilon(1e-6));
    CHECK(h(0, 1) == doctest::Approx(std::cos(0.4) * std::exp(-0.3)).epsilon(1e-6));
    CHECK(h(0, 1) == h(1, 0));
  }

  TEST_CASE("golden section on a unimodal function") {
    const double x = boss::optim::golden_section_max([](double t) { return -std::pow(t - 1.3, 2); }, 0, 4, 60);
    CHECK(x == doctest::Approx(1.3).epsilon(1e-8));
  }
}
