#pragma once

// Small derivative-free and quasi-Newton optimizers used internally. All of
// them minimize; callers negate to maximize.

#include <Eigen/Dense>

#include <functional>

namespace boss::optim {

using Objective = std::function<double(const Eigen::VectorXd&)>;

struct Minimum {
  Eigen::VectorXd x;
  double value = 0;
  int iterations = 0;
  bool converged = false;
};

struct NelderMeadOptions {
  double f_tol = 1e-8;      // spread of simplex values, relative to 1 + |f|
  double x_tol = 1e-7;      // simplex diameter, relative to 1 + |x|
  double initial_step = 1.0;
  int max_iterations = 4000;
};

Minimum nelder_mead(const Objective& f, const Eigen::VectorXd& start, const NelderMeadOptions& opts = {});

struct BfgsOptions {
  double grad_tol = 1e-7;
  double fd_step = 1e-6;
  int max_iterations = 200;
};

// Gradient by central differences.
Minimum bfgs(const Objective& f, const Eigen::VectorXd& start, const BfgsOptions& opts = {});

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step);

// Central-difference Hessian with per-coordinate step rel_step * (1 + |x_i|).
Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x, double rel_step);

// Maximizer of a scalar function on [lo, hi], assuming unimodality there.
double golden_section_max(const std::function<double(double)>& f, double lo, double hi, int iterations = 40);

}  // namespace boss::optim
