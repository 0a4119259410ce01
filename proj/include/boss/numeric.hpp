#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace boss {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// log(sum(exp(x))) that survives entries of either sign and magnitude.
// Returns -inf for an empty input or when every entry is -inf.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  if (x.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar top = x.maxCoeff();
  if (!std::isfinite(static_cast<double>(top))) return top;
  return top + log((x.array() - top).exp().sum());
}

template <typename Scalar>
Scalar log_two_pi() {
  return static_cast<Scalar>(std::log(2.0 * std::numbers::pi));
}

// Round-trippable decimal text for a double, stable across runs.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename Derived>
std::string format_vector(const Eigen::MatrixBase<Derived>& v) {
  std::ostringstream os;
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << format_double(static_cast<double>(v(i)));
  }
  os << ')';
  return os.str();
}

template <typename Derived>
std::string format_matrix(const Eigen::MatrixBase<Derived>& m) {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r) os << "; ";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ' ';
      os << format_double(static_cast<double>(m(r, c)));
    }
  }
  os << ']';
  return os.str();
}

}  // namespace boss
