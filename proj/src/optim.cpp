#include "boss/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace boss::optim {

namespace {

double finite_or_inf(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

Minimum nelder_mead(const Objective& f, const Eigen::VectorXd& start, const NelderMeadOptions& opts) {
  const auto n = start.size();
  Minimum out;
  if (n == 0) {
    out.x = start;
    out.value = f(start);
    out.converged = true;
    return out;
  }

  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n + 1), start);
  std::vector<double> values(static_cast<std::size_t>(n + 1));
  for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i + 1)](i) += opts.initial_step;
  for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = finite_or_inf(f(simplex[i]));

  std::vector<std::size_t> order(simplex.size());
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

    double diameter = 0;
    for (const auto& p : simplex) diameter = std::max(diameter, (p - simplex[best]).lpNorm<Eigen::Infinity>());
    const double spread = values[worst] - values[best];
    if (std::isfinite(spread) && spread <= opts.f_tol * (1 + std::abs(values[best])) &&
        diameter <= opts.x_tol * (1 + simplex[best].lpNorm<Eigen::Infinity>())) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i : order)
      if (i != worst) centroid += simplex[i];
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = finite_or_inf(f(reflected));
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = finite_or_inf(f(expanded));
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = finite_or_inf(f(contracted));
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = finite_or_inf(f(simplex[i]));
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  out.x = simplex[best];
  out.value = values[best];
  out.iterations = it;
  return out;
}

Eigen::VectorXd fd_gradient(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * (1 + std::abs(x(i)));
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2 * h);
  }
  return g;
}

Eigen::MatrixXd fd_hessian(const Objective& f, const Eigen::VectorXd& x, double rel_step) {
  const auto n = x.size();
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd step(n);
  for (Eigen::Index i = 0; i < n; ++i) step(i) = rel_step * (1 + std::abs(x(i)));
  const double f0 = f(x);
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = x(i) + step(i);
    const double up = f(p);
    p(i) = x(i) - step(i);
    const double down = f(p);
    p(i) = x(i);
    h(i, i) = (up - 2 * f0 + down) / (step(i) * step(i));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      auto at = [&](double si, double sj) {
        p(i) = x(i) + si * step(i);
        p(j) = x(j) + sj * step(j);
        const double v = f(p);
        p(i) = x(i);
        p(j) = x(j);
        return v;
      };
      h(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * step(i) * step(j));
      h(j, i) = h(i, j);
    }
  }
  return h;
}

Minimum bfgs(const Objective& f, const Eigen::VectorXd& start, const BfgsOptions& opts) {
  const auto n = start.size();
  Minimum out;
  Eigen::VectorXd x = start;
  double fx = f(x);
  Eigen::VectorXd g = fd_gradient(f, x, opts.fd_step);
  Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(n, n);
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= opts.grad_tol * (1 + std::abs(fx))) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd dir = -inv_h * g;
    if (dir.dot(g) >= 0) {
      inv_h.setIdentity();
      dir = -g;
    }
    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, step *= 0.5) {
      x_new = x + step * dir;
      f_new = f(x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * step * g.dot(dir)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const Eigen::VectorXd g_new = fd_gradient(f, x_new, opts.fd_step);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      inv_h = (id - rho * s * y.transpose()) * inv_h * (id - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    const bool stalled = std::abs(fx - f_new) <= 1e-15 * (1 + std::abs(fx));
    x = x_new;
    fx = f_new;
    g = g_new;
    if (stalled) {
      out.converged = g.lpNorm<Eigen::Infinity>() <= 1e3 * opts.grad_tol * (1 + std::abs(fx));
      break;
    }
  }
  out.x = x;
  out.value = fx;
  out.iterations = it;
  return out;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, int iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations; ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace boss::optim
