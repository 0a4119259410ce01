#include "boss/mixture.hpp"

#include "boss/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace boss {

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<double> means, std::vector<double> sds)
    : weights_(std::move(weights)), means_(std::move(means)), sds_(std::move(sds)) {
  if (weights_.size() != means_.size() || weights_.size() != sds_.size() || weights_.empty())
    throw InvalidArgument("GaussianMixture: weights, means and sds must be equal-length and non-empty");
  double total = 0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] >= 0) || !(sds_[i] >= 0) || !std::isfinite(means_[i]))
      throw InvalidArgument("GaussianMixture: invalid component");
    total += weights_[i];
  }
  if (!(total > 0)) throw InvalidArgument("GaussianMixture: weights sum to zero");
  for (double& w : weights_) w /= total;
}

GaussianMixture GaussianMixture::combine(const std::vector<GaussianMixture>& parts, const std::vector<double>& weights) {
  if (parts.size() != weights.size()) throw InvalidArgument("GaussianMixture::combine: size mismatch");
  std::vector<double> w, m, s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t c = 0; c < parts[i].size(); ++c) {
      w.push_back(weights[i] * parts[i].weights_[c]);
      m.push_back(parts[i].means_[c]);
      s.push_back(parts[i].sds_[c]);
    }
  }
  return {std::move(w), std::move(m), std::move(s)};
}

double GaussianMixture::mean() const {
  double acc = 0;
  for (std::size_t i = 0; i < size(); ++i) acc += weights_[i] * means_[i];
  return acc;
}

double GaussianMixture::variance() const {
  const double mu = mean();
  double acc = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double dm = means_[i] - mu;
    acc += weights_[i] * (sds_[i] * sds_[i] + dm * dm);
  }
  return std::max(acc, 0.0);
}

double GaussianMixture::sd() const { return std::sqrt(variance()); }

double GaussianMixture::cdf(double x) const {
  double acc = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (sds_[i] == 0)
      acc += weights_[i] * (x >= means_[i] ? 1.0 : 0.0);
    else
      acc += weights_[i] * 0.5 * std::erfc(-(x - means_[i]) / (sds_[i] * std::numbers::sqrt2));
  }
  return std::clamp(acc, 0.0, 1.0);
}

double GaussianMixture::pdf(double x) const {
  double acc = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    if (sds_[i] == 0) continue;
    const double z = (x - means_[i]) / sds_[i];
    acc += weights_[i] * std::exp(-0.5 * z * z) / (sds_[i] * std::sqrt(2 * std::numbers::pi));
  }
  return acc;
}

double GaussianMixture::quantile(double p) const {
  if (!(p > 0 && p < 1)) throw InvalidArgument("GaussianMixture::quantile: p must lie in (0, 1)");
  const double mu = mean(), s = sd();
  if (s == 0) return mu;
  double lo = mu - 12 * s, hi = mu + 12 * s;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = cdf(mid);
    if (std::abs(c - p) <= 1e-8 && hi - lo <= 1e-12 * (1 + std::abs(mid))) return mid;
    if (c < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-14 * (1 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

double GaussianMixture::mode() const {
  const double mu = mean(), s = sd();
  if (s == 0) return mu;
  double best = mu, best_v = -1;
  constexpr int n = 4001;
  for (int i = 0; i < n; ++i) {
    const double x = mu - 6 * s + 12 * s * i / (n - 1);
    const double v = pdf(x);
    if (v > best_v) {
      best_v = v;
      best = x;
    }
  }
  return best;
}

}  // namespace boss
