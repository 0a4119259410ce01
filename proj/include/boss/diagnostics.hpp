#pragma once

// Divergences between 1-D posterior density tables.

#include <Eigen/Dense>

#include <functional>

namespace boss {

/// Density tabulated on a sorted grid, normalized by the trapezoid rule.
struct DensityTable {
  Eigen::VectorXd grid;
  Eigen::VectorXd density;
  Eigen::VectorXd cdf;

  // Normalizes `density` (non-negative, positive integral) on `grid`.
  static DensityTable from_density(Eigen::VectorXd grid, Eigen::VectorXd density);
  // Same, from unnormalized log values; uses a max shift before exponentiating.
  static DensityTable from_log_density(Eigen::VectorXd grid, const Eigen::VectorXd& log_density);

  Eigen::Index size() const { return grid.size(); }
  // Piecewise-linear interpolation, zero outside the grid.
  double density_at(double x) const;
  double cdf_at(double x) const;
  DensityTable resampled(const Eigen::VectorXd& new_grid) const;
};

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid);
Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& grid, const Eigen::VectorXd& values);

/// KL(p || q) by the trapezoid rule on p's grid (q is resampled when grids
/// differ).
double kl_divergence(const DensityTable& p, const DensityTable& q);

/// sup |CDF_p - CDF_q| over the union of both grids.
double ks_distance(const DensityTable& p, const DensityTable& q);

/// sup over p's grid of |CDF_p - cdf(x)|, for CDFs known only as functions
/// (an empirical CDF, say).
double ks_distance(const DensityTable& p, const std::function<double(double)>& cdf);

}  // namespace boss
