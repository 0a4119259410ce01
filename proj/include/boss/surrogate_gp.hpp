#pragma once

// Zero-mean Gaussian-process surrogate with a squared-exponential kernel.

#include "boss/errors.hpp"
#include "boss/numeric.hpp"
#include "boss/quadrature.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace boss {

template <typename Scalar = double>
struct SeKernelParams {
  Scalar length_scale{1};
  Scalar sd{1};
  Scalar noise_var{1e-6};

  void validate() const {
    if (!(length_scale > 0) || !(sd > 0) || !(noise_var >= 0))
      throw InvalidArgument("SeKernelParams: need length_scale > 0, sd > 0, noise_var >= 0");
  }
};

template <typename Scalar, typename A, typename B>
Scalar kernel_eval(const SeKernelParams<Scalar>& params, const Eigen::MatrixBase<A>& x1,
                   const Eigen::MatrixBase<B>& x2) {
  using std::exp;
  const Scalar r2 = (x1 - x2).squaredNorm();
  return params.sd * params.sd * exp(-r2 / (Scalar(2) * params.length_scale * params.length_scale));
}

inline constexpr double kMinPointSeparation = 1e-10;

/// Evaluated design points. Values are stored raw; the GP sees them minus
/// `center_offset`.
template <typename Scalar = double>
struct DesignSet {
  std::vector<Vec<Scalar>> points;
  std::vector<Scalar> values;
  Scalar center_offset{0};

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  int dims() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

  Scalar min_distance_to(const Vec<Scalar>& q) const {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (const auto& p : points) best = std::min<Scalar>(best, (p - q).norm());
    return best;
  }

  void add(Vec<Scalar> point, Scalar value) {
    if (!points.empty() && point.size() != points.front().size())
      throw InvalidArgument("DesignSet::add: dimension mismatch");
    if (min_distance_to(point) <= Scalar(kMinPointSeparation))
      throw InvalidArgument("DesignSet::add: point duplicates an existing design point " + format_vector(point));
    points.push_back(std::move(point));
    values.push_back(value);
  }

  Vec<Scalar> centered_values() const {
    Vec<Scalar> f(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) f(static_cast<Eigen::Index>(i)) = values[i] - center_offset;
    return f;
  }
};

template <typename Scalar>
Mat<Scalar> kernel_matrix(const SeKernelParams<Scalar>& params, const DesignSet<Scalar>& design) {
  const auto t = static_cast<Eigen::Index>(design.size());
  Mat<Scalar> c(t, t);
  for (Eigen::Index i = 0; i < t; ++i) {
    c(i, i) = params.sd * params.sd + params.noise_var;
    for (Eigen::Index j = 0; j < i; ++j) {
      c(i, j) = kernel_eval(params, design.points[i], design.points[j]);
      c(j, i) = c(i, j);
    }
  }
  return c;
}

template <typename Scalar = double>
struct GpPrediction {
  Scalar mean;
  Scalar variance;
};

/// f | design under the SE prior. Immutable once built.
template <typename Scalar = double>
class GpPosterior {
 public:
  static GpPosterior condition(const SeKernelParams<Scalar>& params, DesignSet<Scalar> design) {
    params.validate();
    if (design.empty()) throw InvalidArgument("condition: design is empty");
    GpPosterior gp;
    gp.params_ = params;
    gp.design_ = std::move(design);
    const auto llt = factor_with_jitter<Scalar>(kernel_matrix(gp.params_, gp.design_), "C + tau^2 I");
    gp.chol_ = llt.matrixL();
    gp.alpha_weights_ = llt.solve(gp.design_.centered_values());
    return gp;
  }

  const SeKernelParams<Scalar>& params() const { return params_; }
  const DesignSet<Scalar>& design() const { return design_; }
  const Mat<Scalar>& chol_factor() const { return chol_; }
  const Vec<Scalar>& alpha_weights() const { return alpha_weights_; }

  Vec<Scalar> cross_covariance(const Vec<Scalar>& query) const {
    const auto t = static_cast<Eigen::Index>(design_.size());
    Vec<Scalar> k(t);
    for (Eigen::Index i = 0; i < t; ++i) k(i) = kernel_eval(params_, design_.points[i], query);
    return k;
  }

  Scalar mean(const Vec<Scalar>& query) const {
    return cross_covariance(query).dot(alpha_weights_) + design_.center_offset;
  }

  GpPrediction<Scalar> predict(const Vec<Scalar>& query) const {
    const Vec<Scalar> k = cross_covariance(query);
    const Vec<Scalar> v = chol_.template triangularView<Eigen::Lower>().solve(k);
    Scalar var = params_.sd * params_.sd - v.squaredNorm();
    if (var < Scalar(0)) var = Scalar(0);
    return {k.dot(alpha_weights_) + design_.center_offset, var};
  }

 private:
  SeKernelParams<Scalar> params_;
  DesignSet<Scalar> design_;
  Mat<Scalar> chol_;
  Vec<Scalar> alpha_weights_;
};

/// -1/2 f'(C + tau^2 I)^{-1} f - 1/2 log det(C + tau^2 I) - (t/2) log 2 pi on
/// the centered values.
template <typename Scalar>
Scalar log_marginal_likelihood(const SeKernelParams<Scalar>& params, const DesignSet<Scalar>& design) {
  params.validate();
  if (design.empty()) throw InvalidArgument("log_marginal_likelihood: design is empty");
  const auto llt = factor_with_jitter<Scalar>(kernel_matrix(params, design), "C + tau^2 I");
  const Vec<Scalar> f = design.centered_values();
  const Vec<Scalar> v = llt.matrixL().solve(f);
  Scalar log_det = 0;
  const Mat<Scalar> l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += std::log(l(i, i));
  const auto t = static_cast<Scalar>(design.size());
  return Scalar(-0.5) * v.squaredNorm() - log_det - Scalar(0.5) * t * log_two_pi<Scalar>();
}

template <typename Scalar = double>
struct HyperGrid {
  std::vector<Scalar> length_scales;
  std::vector<Scalar> sds;
};

template <typename Scalar>
std::vector<Scalar> log_spaced(Scalar lo, Scalar hi, int count) {
  std::vector<Scalar> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const Scalar a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  return out;
}

template <typename Scalar>
Scalar centered_sd(const DesignSet<Scalar>& design) {
  const Vec<Scalar> f = design.centered_values();
  if (f.size() < 2) return Scalar(1e-3);
  const Scalar mean = f.mean();
  const Scalar s = std::sqrt((f.array() - mean).square().sum() / static_cast<Scalar>(f.size() - 1));
  return std::max<Scalar>(s, Scalar(1e-3));
}

/// 25 x 25 log-spaced grid: length scales over [diam/100, diam], amplitudes
/// over [0.01 s, 100 s] with s the SD of the centered values.
template <typename Scalar>
HyperGrid<Scalar> default_hyper_grid(Scalar diameter, const DesignSet<Scalar>& design, int per_axis = 25) {
  const Scalar s = centered_sd(design);
  return {log_spaced<Scalar>(diameter / 100, diameter, per_axis),
          log_spaced<Scalar>(Scalar(0.01) * s, Scalar(100) * s, per_axis)};
}

template <typename Scalar = double>
struct RefreshResult {
  SeKernelParams<Scalar> params;
  Scalar log_likelihood{-std::numeric_limits<Scalar>::infinity()};
  bool warning = false;  // every grid cell failed; params are the incumbent
};

/// Grid-search MLE of (length_scale, sd); noise_var is carried over.
template <typename Scalar>
RefreshResult<Scalar> refresh_hyperparams(const DesignSet<Scalar>& design, const SeKernelParams<Scalar>& current,
                                          const HyperGrid<Scalar>& grid) {
  if (design.size() < 2) throw InvalidArgument("refresh_hyperparams: need at least two design points");
  RefreshResult<Scalar> best;
  best.params = current;
  bool found = false;
  for (const Scalar ell : grid.length_scales) {
    for (const Scalar sd : grid.sds) {
      SeKernelParams<Scalar> cand{ell, sd, current.noise_var};
      Scalar ll;
      try {
        ll = log_marginal_likelihood(cand, design);
      } catch (const FactorizationError&) {
        continue;
      }
      if (!std::isfinite(static_cast<double>(ll))) continue;
      if (!found || ll > best.log_likelihood ||
          (ll == best.log_likelihood && ell > best.params.length_scale)) {
        best.params = cand;
        best.log_likelihood = ll;
        found = true;
      }
    }
  }
  best.warning = !found;
  return best;
}

}  // namespace boss
