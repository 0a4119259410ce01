#include "boss/diagnostics.hpp"

#include "boss/errors.hpp"
#include "boss/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace boss {

namespace {

constexpr double kDensityFloor = 1e-300;

double interp(const Eigen::VectorXd& grid, const Eigen::VectorXd& values, double x, double below, double above) {
  const auto n = grid.size();
  if (x < grid(0)) return below;
  if (x > grid(n - 1)) return above;
  const double* begin = grid.data();
  const auto hi = std::upper_bound(begin, begin + n, x) - begin;
  if (hi >= n) return values(n - 1);
  const auto lo = hi - 1;
  const double t = (x - grid(lo)) / (grid(hi) - grid(lo));
  return values(lo) + t * (values(hi) - values(lo));
}

bool same_grid(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= 1e-12 * (1 + a.cwiseAbs().maxCoeff());
}

}  // namespace

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  const auto n = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double h = grid(i + 1) - grid(i);
    w(i) += 0.5 * h;
    w(i + 1) += 0.5 * h;
  }
  return w;
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values) {
  const auto n = grid.size();
  Eigen::VectorXd c(n);
  if (n == 0) return c;
  c(0) = 0;
  for (Eigen::Index i = 1; i < n; ++i) c(i) = c(i - 1) + 0.5 * (grid(i) - grid(i - 1)) * (values(i) + values(i - 1));
  return c;
}

DensityTable DensityTable::from_density(Eigen::VectorXd grid, Eigen::VectorXd density) {
  if (grid.size() < 2 || grid.size() != density.size())
    throw InvalidArgument("DensityTable: need matching grid and density with at least two points");
  for (Eigen::Index i = 1; i < grid.size(); ++i)
    if (!(grid(i) > grid(i - 1))) throw InvalidArgument("DensityTable: grid must be strictly increasing");
  if ((density.array() < 0).any() || !density.allFinite())
    throw InvalidArgument("DensityTable: density must be finite and non-negative");
  const double mass = trapezoid_weights(grid).dot(density);
  if (!(mass > 0)) throw DegenerateDensity("DensityTable: density integrates to zero");
  DensityTable t;
  t.grid = std::move(grid);
  t.density = density / mass;
  t.cdf = cumulative_trapezoid(t.grid, t.density);
  t.cdf /= t.cdf(t.cdf.size() - 1);
  return t;
}

DensityTable DensityTable::from_log_density(Eigen::VectorXd grid, const Eigen::VectorXd& log_density) {
  const double top = log_density.maxCoeff();
  if (!std::isfinite(top)) throw DegenerateDensity("DensityTable: log density has no finite maximum");
  return from_density(std::move(grid), (log_density.array() - top).exp().matrix());
}

double DensityTable::density_at(double x) const { return interp(grid, density, x, 0.0, 0.0); }

double DensityTable::cdf_at(double x) const { return interp(grid, cdf, x, 0.0, 1.0); }

DensityTable DensityTable::resampled(const Eigen::VectorXd& new_grid) const {
  Eigen::VectorXd d(new_grid.size());
  for (Eigen::Index i = 0; i < new_grid.size(); ++i) d(i) = density_at(new_grid(i));
  return from_density(new_grid, std::move(d));
}

double kl_divergence(const DensityTable& p, const DensityTable& q_in) {
  const DensityTable q = same_grid(p.grid, q_in.grid) ? q_in : q_in.resampled(p.grid);
  Eigen::VectorXd integrand(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p.density(i), qi = q.density(i);
    if (pi <= kDensityFloor) {
      integrand(i) = 0;
      continue;
    }
    if (qi <= kDensityFloor) {
      if (pi > 1e-12)
        throw SupportMismatch("kl_divergence: p has mass where q vanishes, at x = " + format_double(p.grid(i)));
      integrand(i) = 0;
      continue;
    }
    integrand(i) = pi * std::log(pi / qi);
  }
  const double kl = trapezoid_weights(p.grid).dot(integrand);
  return kl < 0 && kl > -1e-12 ? 0.0 : std::max(kl, 0.0);
}

double ks_distance(const DensityTable& p, const DensityTable& q) {
  if (same_grid(p.grid, q.grid)) return (p.cdf - q.cdf).cwiseAbs().maxCoeff();
  std::vector<double> xs(p.grid.data(), p.grid.data() + p.size());
  xs.insert(xs.end(), q.grid.data(), q.grid.data() + q.size());
  double best = 0;
  for (double x : xs) best = std::max(best, std::abs(p.cdf_at(x) - q.cdf_at(x)));
  return std::min(best, 1.0);
}

double ks_distance(const DensityTable& p, const std::function<double(double)>& cdf) {
  double best = 0;
  for (Eigen::Index i = 0; i < p.size(); ++i) best = std::max(best, std::abs(p.cdf(i) - cdf(p.grid(i))));
  return std::min(best, 1.0);
}

}  // namespace boss
