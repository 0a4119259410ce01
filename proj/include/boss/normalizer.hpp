#pragma once

// Normalization of a surrogate log posterior exp(f_BO) over the search box.

#include "boss/bo_engine.hpp"
#include "boss/diagnostics.hpp"
#include "boss/quadrature.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace boss {

enum class NormalizerMethod { Grid, Aghq, Mcmc };

std::string to_string(NormalizerMethod m);
NormalizerMethod parse_normalizer(const std::string& name);

/// Componentwise strictly increasing map from R^d onto the box.
struct DomainTransform {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> forward;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> inverse;
  std::function<double(const Eigen::VectorXd&)> log_jacobian;

  /// alpha = l + (u - l) / (1 + exp(-alpha')).
  static DomainTransform logistic(const SearchSpace& space);
};

/// Regular tensor grid over the box, first coordinate varying fastest.
struct TensorGrid {
  std::vector<Eigen::VectorXd> axes;

  static TensorGrid regular(const SearchSpace& space, int points_per_dim);
  int dims() const { return static_cast<int>(axes.size()); }
  Eigen::Index size() const;
  Eigen::VectorXd point(Eigen::Index flat) const;
  // Product trapezoid log weights.
  Eigen::VectorXd log_weights() const;
  // Multilinear interpolation of node values; 0 outside the box.
  double interpolate(const Eigen::VectorXd& values, const Eigen::VectorXd& x) const;
  // Marginal density of coordinate j, integrating the others by trapezoid.
  Eigen::VectorXd marginal(const Eigen::VectorXd& values, int j) const;
};

struct McmcDiagnostics {
  Eigen::MatrixXd samples;  // d x n_samples, post burn-in
  double acceptance_rate = 0;
  bool warning = false;     // acceptance outside [0.05, 0.95]
  int bins_per_dim = 256;
  Eigen::VectorXd histogram;  // normalized density per bin, flattened like TensorGrid
  double step_scale = 0;
  int burn_in = 0;
  std::uint64_t seed = 0;
  std::vector<Eigen::VectorXd> sorted_marginals;  // per coordinate
};

class NormalizedSurrogate {
 public:
  NormalizerMethod method = NormalizerMethod::Grid;
  double log_norm_const = 0;
  LogDensityFn log_surrogate;
  SearchSpace space;

  // Tabulated normalized density on a tensor grid (the integration grid for
  // the grid method, a reporting grid otherwise).
  TensorGrid table_grid;
  Eigen::VectorXd table_density;
  std::vector<Eigen::VectorXd> marginal_cdfs;  // per coordinate, on table_grid.axes[j]

  // AGHQ normalizer in the transformed coordinates alpha' = h^{-1}(alpha).
  std::optional<AghqResult<double>> aghq;
  std::optional<DomainTransform> transform;

  std::optional<McmcDiagnostics> mcmc;

  int dims() const { return space.dims(); }
  double density(const Eigen::VectorXd& alpha) const;
  double log_density(const Eigen::VectorXd& alpha) const;
  // 1-D only.
  double cdf(double alpha) const;
  // Marginal CDF of coordinate j at x.
  double marginal_cdf(int j, double x) const;
  // Marginal of coordinate j tabulated on the given sorted grid.
  DensityTable marginal_table(int j, const Eigen::VectorXd& grid) const;

  // Rows alpha_1..alpha_d, log_density, density[, cdf] over table_grid.
  void write_csv(std::ostream& os) const;
};

NormalizedSurrogate normalize_grid(const LogDensityFn& f_bo, const SearchSpace& space, int points_per_dim);

struct AghqNormalizerOptions {
  double hessian_step = 1e-4;
  int scan_points_per_dim = 0;   // coarse scan for optimizer starts; 0 picks by dimension
  int table_points_per_dim = 0;  // reporting grid; 0 picks by dimension
};

NormalizedSurrogate normalize_aghq(const LogDensityFn& f_bo, const SearchSpace& space, int k,
                                   const DomainTransform& transform, const AghqNormalizerOptions& opts = {});
NormalizedSurrogate normalize_aghq(const LogDensityFn& f_bo, const SearchSpace& space, int k);

NormalizedSurrogate normalize_mcmc(const LogDensityFn& f_bo, const SearchSpace& space, int n_samples, int burn_in,
                                   double step_scale, std::uint64_t seed);

}  // namespace boss
