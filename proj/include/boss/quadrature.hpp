#pragma once

// Gauss-Hermite rules (probabilists' convention) and adaptive Gauss-Hermite
// quadrature for normalizing log densities around their mode.

#include "boss/errors.hpp"
#include "boss/numeric.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <string>
#include <utility>

namespace boss {

inline constexpr int kMaxGhPoints = 50;

/// One-dimensional Gauss-Hermite rule against the standard normal density.
/// Nodes ascend; weights are positive and sum to one.
template <typename Scalar = double>
struct GhRule {
  int k = 0;
  Vec<Scalar> nodes;
  Vec<Scalar> weights;
};

template <typename Scalar = double>
GhRule<Scalar> gh_rule(int k) {
  using std::abs;
  using std::sqrt;
  if (k < 1 || k > kMaxGhPoints)
    throw InvalidArgument("gh_rule: points per dimension must lie in [1, " +
                          std::to_string(kMaxGhPoints) + "], got " + std::to_string(k));

  GhRule<Scalar> rule;
  rule.k = k;
  if (k == 1) {
    rule.nodes = Vec<Scalar>::Zero(1);
    rule.weights = Vec<Scalar>::Ones(1);
    return rule;
  }

  // Golub-Welsch: the Jacobi matrix of the monic probabilists' Hermite
  // recurrence has zero diagonal and sqrt(i) on the off-diagonal.
  Vec<Scalar> diag = Vec<Scalar>::Zero(k);
  Vec<Scalar> sub(k - 1);
  for (int i = 0; i < k - 1; ++i) sub(i) = sqrt(static_cast<Scalar>(i + 1));
  Eigen::SelfAdjointEigenSolver<Mat<Scalar>> eig;
  eig.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  Vec<Scalar> x = eig.eigenvalues();

  // Orthonormal Hermite values p_0..p_{k}; p_k' = sqrt(k) p_{k-1}.
  auto orthonormal = [k](Scalar at, Vec<Scalar>& p) {
    p.resize(k + 1);
    p(0) = Scalar(1);
    p(1) = at;
    for (int j = 1; j < k; ++j)
      p(j + 1) = (at * p(j) - sqrt(static_cast<Scalar>(j)) * p(j - 1)) / sqrt(static_cast<Scalar>(j + 1));
  };

  Vec<Scalar> p;
  Vec<Scalar> w(k);
  for (int i = 0; i < k; ++i) {
    Scalar xi = x(i);
    for (int it = 0; it < 4; ++it) {
      orthonormal(xi, p);
      const Scalar deriv = sqrt(static_cast<Scalar>(k)) * p(k - 1);
      if (deriv == Scalar(0)) break;
      const Scalar step = p(k) / deriv;
      xi -= step;
      if (abs(step) <= std::numeric_limits<Scalar>::epsilon() * (Scalar(1) + abs(xi))) break;
    }
    x(i) = xi;
  }

  // Enforce exact symmetry, then Christoffel weights 1 / sum_j p_j(x)^2.
  for (int i = 0; i < k / 2; ++i) {
    const Scalar m = (x(k - 1 - i) - x(i)) / Scalar(2);
    x(i) = -m;
    x(k - 1 - i) = m;
  }
  if (k % 2 == 1) x(k / 2) = Scalar(0);
  for (int i = 0; i < k; ++i) {
    orthonormal(x(i), p);
    w(i) = Scalar(1) / p.head(k).squaredNorm();
  }
  for (int i = 0; i < k / 2; ++i) {
    const Scalar m = (w(i) + w(k - 1 - i)) / Scalar(2);
    w(i) = m;
    w(k - 1 - i) = m;
  }
  w /= w.sum();

  rule.nodes = std::move(x);
  rule.weights = std::move(w);
  return rule;
}

template <std::floating_point F>
GhRule<F> gh_rule(F k) {
  if (!(k >= 1) || std::floor(k) != k)
    throw InvalidArgument("gh_rule: points per dimension must be a positive integer");
  return gh_rule<F>(static_cast<int>(k));
}

/// Sum of w_i * node_i^degree; the Gaussian moment of that degree when the
/// rule is exact for it.
template <typename Scalar>
Scalar gh_polynomial_check(const GhRule<Scalar>& rule, int degree) {
  if (degree < 0 || degree > 2 * rule.k - 1)
    throw InvalidArgument("gh_polynomial_check: degree exceeds 2k-1");
  auto power = [degree](Scalar x) {
    Scalar v(1);
    for (int e = 0; e < degree; ++e) v *= x;
    return v;
  };
  // Mirrored pairs first, so odd moments cancel exactly.
  Scalar total(0);
  for (int i = 0; i < rule.k / 2; ++i)
    total += rule.weights(i) * (power(rule.nodes(i)) + power(rule.nodes(rule.k - 1 - i)));
  if (rule.k % 2 == 1) total += rule.weights(rule.k / 2) * power(rule.nodes(rule.k / 2));
  return total;
}

/// Tensor-product rule in d dimensions: columns of `nodes` are the k^d
/// standard-normal abscissae z, first coordinate varying fastest.
template <typename Scalar = double>
struct TensorRule {
  Mat<Scalar> nodes;
  Vec<Scalar> log_weights;
};

template <typename Scalar>
TensorRule<Scalar> tensor_rule(const GhRule<Scalar>& rule, int dims) {
  Eigen::Index count = 1;
  for (int i = 0; i < dims; ++i) count *= rule.k;
  TensorRule<Scalar> t;
  t.nodes.resize(dims, count);
  t.log_weights = Vec<Scalar>::Zero(count);
  for (Eigen::Index c = 0; c < count; ++c) {
    Eigen::Index rem = c;
    for (int j = 0; j < dims; ++j) {
      const Eigen::Index idx = rem % rule.k;
      rem /= rule.k;
      t.nodes(j, c) = rule.nodes(idx);
      t.log_weights(c) += std::log(rule.weights(idx));
    }
  }
  return t;
}

template <typename Scalar = double>
struct AghqResult {
  Vec<Scalar> mode;
  Mat<Scalar> chol;  // lower factor of the inverse negative Hessian
  Scalar log_norm_const{};
  Mat<Scalar> adapted_nodes;       // d x k^d, mode + chol * z
  Vec<Scalar> adapted_log_weights; // log w(z) - log phi_d(z) + log|det chol|
  Vec<Scalar> node_log_density;    // log_density at each adapted node

  Eigen::Index size() const { return adapted_log_weights.size(); }
  int dims() const { return static_cast<int>(mode.size()); }

  /// Log of each node's share of the normalizing sum; these sum to one.
  Vec<Scalar> normalized_log_weights() const {
    return (node_log_density + adapted_log_weights).array() - log_norm_const;
  }
};

/// Factor a symmetric matrix that should be positive definite, escalating a
/// diagonal jitter 1e-8 * (1 + max diag) by x10 for up to five attempts.
template <typename Scalar>
Eigen::LLT<Mat<Scalar>> factor_with_jitter(const Mat<Scalar>& m, const char* what) {
  Mat<Scalar> sym = (m + m.transpose()) / Scalar(2);
  Eigen::LLT<Mat<Scalar>> llt(sym);
  if (llt.info() == Eigen::Success && sym.allFinite()) return llt;
  const Scalar max_diag = sym.size() ? sym.diagonal().cwiseAbs().maxCoeff() : Scalar(0);
  Scalar jitter = Scalar(1e-8) * (Scalar(1) + max_diag);
  for (int attempt = 0; attempt < 5; ++attempt, jitter *= Scalar(10)) {
    Mat<Scalar> shifted = sym;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw FactorizationError(std::string(what) + " is not positive definite: " + format_matrix(m));
}

/// Adaptive Gauss-Hermite quadrature of exp(log_density) over R^d. The rule
/// is recentred at `mode` and scaled by the Cholesky factor of the inverse
/// of `neg_hessian`, so it is exact for Gaussian integrands at every k.
template <typename Scalar, typename LogDensity>
AghqResult<Scalar> aghq_normalize(LogDensity&& log_density, const Vec<Scalar>& mode,
                                  const Mat<Scalar>& neg_hessian, int k) {
  using std::log;
  const int d = static_cast<int>(mode.size());
  if (neg_hessian.rows() != d || neg_hessian.cols() != d)
    throw InvalidArgument("aghq_normalize: neg_hessian must be d x d");

  AghqResult<Scalar> out;
  out.mode = mode;
  const GhRule<Scalar> rule = gh_rule<Scalar>(k);
  const TensorRule<Scalar> tensor = tensor_rule(rule, d);

  if (d == 0) {
    out.chol.resize(0, 0);
  } else {
    const auto llt_h = factor_with_jitter<Scalar>(neg_hessian, "neg_hessian");
    Mat<Scalar> cov = llt_h.solve(Mat<Scalar>::Identity(d, d));
    cov = (cov + cov.transpose()) / Scalar(2);
    const auto llt_c = factor_with_jitter<Scalar>(cov, "inverse neg_hessian");
    out.chol = llt_c.matrixL();
  }
  Scalar log_det = 0;
  for (int i = 0; i < d; ++i) log_det += log(out.chol(i, i));

  const Eigen::Index count = tensor.nodes.cols();
  out.adapted_nodes.resize(d, count);
  out.adapted_log_weights.resize(count);
  out.node_log_density.resize(count);
  const Scalar half_d_log_2pi = Scalar(0.5) * d * log_two_pi<Scalar>();
  for (Eigen::Index c = 0; c < count; ++c) {
    const Vec<Scalar> z = tensor.nodes.col(c);
    Vec<Scalar> theta = mode;
    if (d > 0) theta += out.chol * z;
    const Scalar v = log_density(theta);
    if (!std::isfinite(static_cast<double>(v)))
      throw EvaluationError("aghq_normalize: non-finite log density at node " + format_vector(theta));
    out.adapted_nodes.col(c) = theta;
    out.node_log_density(c) = v;
    out.adapted_log_weights(c) = tensor.log_weights(c) + half_d_log_2pi + Scalar(0.5) * z.squaredNorm() + log_det;
  }
  out.log_norm_const = log_sum_exp(out.node_log_density + out.adapted_log_weights);
  return out;
}

}  // namespace boss
