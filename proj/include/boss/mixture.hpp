#pragma once

#include <vector>

namespace boss {

/// Finite mixture of univariate normals. Components with sd == 0 are point
/// masses.
class GaussianMixture {
 public:
  GaussianMixture() = default;
  // Weights are normalized on construction; they must be non-negative with a
  // positive sum.
  GaussianMixture(std::vector<double> weights, std::vector<double> means, std::vector<double> sds);

  static GaussianMixture combine(const std::vector<GaussianMixture>& parts, const std::vector<double>& weights);

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& means() const { return means_; }
  const std::vector<double>& sds() const { return sds_; }
  std::size_t size() const { return weights_.size(); }

  double mean() const;
  double variance() const;
  double sd() const;
  double cdf(double x) const;
  double pdf(double x) const;
  // Bisection on the CDF to tolerance 1e-8, bracket mean +/- 12 sd.
  double quantile(double p) const;
  // Grid arg-max of pdf within mean +/- 6 sd; the mean when degenerate.
  double mode() const;

 private:
  std::vector<double> weights_;
  std::vector<double> means_;
  std::vector<double> sds_;
};

}  // namespace boss
