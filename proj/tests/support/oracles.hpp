#pragma once

// Closed-form references shared by the unit and acceptance tests. Nothing
// here calls into the library under test.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace oracle {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

// log N(y; 0, cov) through a dense LU determinant and inverse.
inline double mvn_log_density(const Eigen::VectorXd& y, const Eigen::MatrixXd& cov) {
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(cov);
  const double quad = y.dot(lu.inverse() * y);
  return -0.5 * quad - 0.5 * std::log(lu.determinant()) - 0.5 * y.size() * std::log(2 * std::numbers::pi);
}

inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, long n) {
  const double h = (hi - lo) / (n - 1);
  double s = 0.5 * (f(lo) + f(hi));
  for (long i = 1; i < n - 1; ++i) s += f(lo + h * i);
  return s * h;
}

inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int p, double ridge = 0.5) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd b(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) b(i, j) = z(rng);
  return b * b.transpose() / p + ridge * Eigen::MatrixXd::Identity(p, p);
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> z(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = z(rng);
  return m;
}

// Dense central-difference Hessian.
inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                  double h) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
      pp(i) += h; pp(j) += h;
      pm(i) += h; pm(j) -= h;
      mp(i) -= h; mp(j) += h;
      mm(i) -= h; mm(j) -= h;
      out(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  return out;
}

}  // namespace oracle
