#include "boss/normalizer.hpp"

#include "boss/errors.hpp"
#include "boss/numeric.hpp"
#include "boss/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

namespace boss {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_eval(const LogDensityFn& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  if (std::isnan(v)) throw EvaluationError("normalizer: NaN surrogate value at " + format_vector(x));
  return v;
}

Eigen::VectorXd eval_on(const LogDensityFn& f, const TensorGrid& grid) {
  Eigen::VectorXd v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) v(i) = safe_eval(f, grid.point(i));
  return v;
}

int default_table_points(int d) { return d == 1 ? 1024 : d == 2 ? 128 : 32; }
int default_scan_points(int d) { return d == 1 ? 256 : d == 2 ? 48 : 16; }

// Cumulative marginal CDFs of a tabulated density on its grid.
std::vector<Eigen::VectorXd> marginal_cdfs_of(const TensorGrid& grid, const Eigen::VectorXd& density) {
  std::vector<Eigen::VectorXd> out;
  for (int j = 0; j < grid.dims(); ++j) {
    Eigen::VectorXd c = cumulative_trapezoid(grid.axes[static_cast<std::size_t>(j)], grid.marginal(density, j));
    const double total = c(c.size() - 1);
    if (total > 0) c /= total;
    out.push_back(std::move(c));
  }
  return out;
}

double interp_clamped(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x) {
  const auto n = xs.size();
  if (x <= xs(0)) return ys(0);
  if (x >= xs(n - 1)) return ys(n - 1);
  const auto hi = std::upper_bound(xs.data(), xs.data() + n, x) - xs.data();
  const auto lo = hi - 1;
  const double t = (x - xs(lo)) / (xs(hi) - xs(lo));
  return ys(lo) + t * (ys(hi) - ys(lo));
}

// Best few points of a coarse scan, most probable first.
std::vector<Eigen::VectorXd> scan_starts(const LogDensityFn& f, const SearchSpace& space, int per_dim, int count) {
  const TensorGrid scan = TensorGrid::regular(space, per_dim);
  const Eigen::VectorXd v = eval_on(f, scan);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v(a) > v(b); });
  std::vector<Eigen::VectorXd> out;
  for (Eigen::Index idx : order) {
    if (static_cast<int>(out.size()) >= count || !std::isfinite(v(idx))) break;
    const Eigen::VectorXd p = scan.point(idx);
    bool near = false;
    for (const auto& q : out) near = near || ((p - q).array().abs() / space.width().array()).maxCoeff() < 0.05;
    if (!near) out.push_back(p);
  }
  if (out.empty()) throw DegenerateDensity("normalizer: surrogate is -inf on every scan point");
  return out;
}

}  // namespace

std::string to_string(NormalizerMethod m) {
  switch (m) {
    case NormalizerMethod::Grid: return "grid";
    case NormalizerMethod::Aghq: return "aghq";
    case NormalizerMethod::Mcmc: return "mcmc";
  }
  return "grid";
}

NormalizerMethod parse_normalizer(const std::string& name) {
  if (name == "grid") return NormalizerMethod::Grid;
  if (name == "aghq") return NormalizerMethod::Aghq;
  if (name == "mcmc") return NormalizerMethod::Mcmc;
  throw InvalidArgument("unknown normalizer '" + name + "' (expected grid, aghq or mcmc)");
}

DomainTransform DomainTransform::logistic(const SearchSpace& space) {
  const Eigen::VectorXd lo = space.lower(), w = space.width();
  DomainTransform t;
  t.forward = [lo, w](const Eigen::VectorXd& a) {
    Eigen::VectorXd out(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out(i) = lo(i) + w(i) / (1 + std::exp(-a(i)));
    return out;
  };
  t.inverse = [lo, w](const Eigen::VectorXd& a) {
    Eigen::VectorXd out(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double s = (a(i) - lo(i)) / w(i);
      out(i) = std::log(s) - std::log1p(-s);
    }
    return out;
  };
  t.log_jacobian = [w](const Eigen::VectorXd& a) {
    double acc = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      // log s + log(1 - s) = -softplus(-a) - softplus(a)
      const double x = a(i);
      const double sp_pos = x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
      const double sp_neg = sp_pos - x;
      acc += std::log(w(i)) - sp_pos - sp_neg;
    }
    return acc;
  };
  return t;
}

TensorGrid TensorGrid::regular(const SearchSpace& space, int points_per_dim) {
  if (points_per_dim < 2) throw InvalidArgument("TensorGrid: need at least two points per dimension");
  TensorGrid g;
  for (int j = 0; j < space.dims(); ++j)
    g.axes.push_back(Eigen::VectorXd::LinSpaced(points_per_dim, space.lower()(j), space.upper()(j)));
  return g;
}

Eigen::Index TensorGrid::size() const {
  Eigen::Index n = 1;
  for (const auto& a : axes) n *= a.size();
  return n;
}

Eigen::VectorXd TensorGrid::point(Eigen::Index flat) const {
  Eigen::VectorXd p(dims());
  for (int j = 0; j < dims(); ++j) {
    const auto& a = axes[static_cast<std::size_t>(j)];
    p(j) = a(flat % a.size());
    flat /= a.size();
  }
  return p;
}

Eigen::VectorXd TensorGrid::log_weights() const {
  Eigen::VectorXd lw = Eigen::VectorXd::Zero(size());
  Eigen::Index stride = 1;
  for (const auto& a : axes) {
    const Eigen::VectorXd w = trapezoid_weights(a).array().log();
    for (Eigen::Index i = 0; i < lw.size(); ++i) lw(i) += w((i / stride) % a.size());
    stride *= a.size();
  }
  return lw;
}

double TensorGrid::interpolate(const Eigen::VectorXd& values, const Eigen::VectorXd& x) const {
  const int d = dims();
  std::vector<Eigen::Index> base(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const auto& a = axes[static_cast<std::size_t>(j)];
    const auto n = a.size();
    if (x(j) < a(0) || x(j) > a(n - 1)) return 0.0;
    auto hi = std::upper_bound(a.data(), a.data() + n, x(j)) - a.data();
    if (hi >= n) hi = n - 1;
    base[static_cast<std::size_t>(j)] = hi - 1;
    frac[static_cast<std::size_t>(j)] = (x(j) - a(hi - 1)) / (a(hi) - a(hi - 1));
  }
  double acc = 0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1;
    Eigen::Index flat = 0, stride = 1;
    for (int j = 0; j < d; ++j) {
      const bool up = (corner >> j) & 1;
      const double f = frac[static_cast<std::size_t>(j)];
      w *= up ? f : 1 - f;
      flat += (base[static_cast<std::size_t>(j)] + (up ? 1 : 0)) * stride;
      stride *= axes[static_cast<std::size_t>(j)].size();
    }
    if (w != 0) acc += w * values(flat);
  }
  return acc;
}

Eigen::VectorXd TensorGrid::marginal(const Eigen::VectorXd& values, int j) const {
  const auto& target = axes[static_cast<std::size_t>(j)];
  std::vector<Eigen::VectorXd> w;
  for (const auto& a : axes) w.push_back(trapezoid_weights(a));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(target.size());
  for (Eigen::Index i = 0; i < size(); ++i) {
    Eigen::Index rest = i, mine = 0;
    double weight = 1;
    for (int m = 0; m < dims(); ++m) {
      const auto n = axes[static_cast<std::size_t>(m)].size();
      const auto idx = rest % n;
      rest /= n;
      if (m == j) mine = idx;
      else weight *= w[static_cast<std::size_t>(m)](idx);
    }
    out(mine) += weight * values(i);
  }
  return out;
}

double NormalizedSurrogate::density(const Eigen::VectorXd& alpha) const {
  if (!space.contains(alpha)) return 0.0;
  switch (method) {
    case NormalizerMethod::Grid: return std::max(0.0, table_grid.interpolate(table_density, alpha));
    case NormalizerMethod::Aghq: return std::exp(log_surrogate(alpha) - log_norm_const);
    case NormalizerMethod::Mcmc: {
      Eigen::Index flat = 0, stride = 1;
      const int bins = mcmc->bins_per_dim;
      for (int j = 0; j < dims(); ++j) {
        auto b = static_cast<Eigen::Index>(std::floor((alpha(j) - space.lower()(j)) / space.width()(j) * bins));
        b = std::clamp<Eigen::Index>(b, 0, bins - 1);
        flat += b * stride;
        stride *= bins;
      }
      return mcmc->histogram(flat);
    }
  }
  return 0.0;
}

double NormalizedSurrogate::log_density(const Eigen::VectorXd& alpha) const {
  if (method == NormalizerMethod::Aghq && space.contains(alpha)) return log_surrogate(alpha) - log_norm_const;
  const double p = density(alpha);
  return p > 0 ? std::log(p) : kNegInf;
}

double NormalizedSurrogate::cdf(double alpha) const {
  if (dims() != 1) throw InvalidArgument("NormalizedSurrogate::cdf is defined for 1-D surrogates only");
  return marginal_cdf(0, alpha);
}

double NormalizedSurrogate::marginal_cdf(int j, double x) const {
  if (j < 0 || j >= dims()) throw InvalidArgument("marginal_cdf: coordinate out of range");
  if (x <= space.lower()(j)) return 0.0;
  if (x >= space.upper()(j)) return 1.0;
  if (method == NormalizerMethod::Mcmc) {
    const auto& s = mcmc->sorted_marginals[static_cast<std::size_t>(j)];
    const auto count = std::upper_bound(s.data(), s.data() + s.size(), x) - s.data();
    return static_cast<double>(count) / static_cast<double>(s.size());
  }
  const auto& axis = table_grid.axes[static_cast<std::size_t>(j)];
  return interp_clamped(axis, marginal_cdfs[static_cast<std::size_t>(j)], x);
}

DensityTable NormalizedSurrogate::marginal_table(int j, const Eigen::VectorXd& grid) const {
  if (j < 0 || j >= dims()) throw InvalidArgument("marginal_table: coordinate out of range");
  Eigen::VectorXd dens(grid.size());
  if (method == NormalizerMethod::Mcmc) {
    const int bins = mcmc->bins_per_dim;
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(bins);
    const auto& s = mcmc->sorted_marginals[static_cast<std::size_t>(j)];
    const double lo = space.lower()(j), w = space.width()(j);
    for (Eigen::Index i = 0; i < s.size(); ++i)
      counts(std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor((s(i) - lo) / w * bins)), 0, bins - 1)) += 1;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const auto b = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor((grid(i) - lo) / w * bins)), 0,
                                              bins - 1);
      dens(i) = counts(b);
    }
  } else {
    const auto& axis = table_grid.axes[static_cast<std::size_t>(j)];
    const Eigen::VectorXd m = table_grid.marginal(table_density, j);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      dens(i) = grid(i) < axis(0) || grid(i) > axis(axis.size() - 1) ? 0.0 : interp_clamped(axis, m, grid(i));
  }
  return DensityTable::from_density(grid, std::move(dens));
}

void NormalizedSurrogate::write_csv(std::ostream& os) const {
  const int d = dims();
  for (int j = 0; j < d; ++j) os << "alpha_" << j + 1 << ',';
  os << "log_density,density";
  if (d == 1) os << ",cdf";
  os << '\n';
  for (Eigen::Index i = 0; i < table_grid.size(); ++i) {
    const Eigen::VectorXd p = table_grid.point(i);
    for (int j = 0; j < d; ++j) os << format_double(p(j)) << ',';
    const double dens = table_density(i);
    const double ld = method == NormalizerMethod::Aghq ? log_surrogate(p) - log_norm_const
                                                       : (dens > 0 ? std::log(dens) : kNegInf);
    os << format_double(ld) << ',' << format_double(dens);
    if (d == 1) os << ',' << format_double(method == NormalizerMethod::Mcmc ? marginal_cdf(0, p(0)) : marginal_cdfs[0](i));
    os << '\n';
  }
}

NormalizedSurrogate normalize_grid(const LogDensityFn& f_bo, const SearchSpace& space, int points_per_dim) {
  if (points_per_dim < 16) throw InvalidArgument("normalize_grid: points_per_dim must be at least 16");
  NormalizedSurrogate out;
  out.method = NormalizerMethod::Grid;
  out.space = space;
  out.log_surrogate = f_bo;
  out.table_grid = TensorGrid::regular(space, points_per_dim);
  const Eigen::VectorXd f = eval_on(f_bo, out.table_grid);
  if (f.maxCoeff() == kNegInf) throw DegenerateDensity("normalize_grid: surrogate is -inf on the whole grid");
  if (!f.allFinite() && (f.array() == std::numeric_limits<double>::infinity()).any())
    throw EvaluationError("normalize_grid: surrogate is +inf on the grid");
  out.log_norm_const = log_sum_exp(f + out.table_grid.log_weights());
  out.table_density = (f.array() - out.log_norm_const).exp();
  out.marginal_cdfs = marginal_cdfs_of(out.table_grid, out.table_density);
  return out;
}

NormalizedSurrogate normalize_aghq(const LogDensityFn& f_bo, const SearchSpace& space, int k,
                                   const DomainTransform& transform, const AghqNormalizerOptions& opts) {
  const int d = space.dims();
  const auto f_t = [&](const Eigen::VectorXd& a_prime) {
    const Eigen::VectorXd a = transform.forward(a_prime);
    return safe_eval(f_bo, a) + transform.log_jacobian(a_prime);
  };
  const optim::Objective neg = [&](const Eigen::VectorXd& a_prime) {
    const double v = f_t(a_prime);
    return std::isfinite(v) ? -v : std::numeric_limits<double>::infinity();
  };

  const int scan_n = opts.scan_points_per_dim > 0 ? opts.scan_points_per_dim : default_scan_points(d);
  const Eigen::VectorXd margin = 1e-6 * space.width();
  optim::Minimum best;
  best.value = std::numeric_limits<double>::infinity();
  bool any_converged = false;
  for (const auto& start : scan_starts(f_bo, space, scan_n, 3)) {
    const Eigen::VectorXd inside = start.cwiseMax(space.lower() + margin).cwiseMin(space.upper() - margin);
    const optim::Minimum m = optim::bfgs(neg, transform.inverse(inside));
    any_converged = any_converged || m.converged;
    if (m.value < best.value) best = m;
  }
  if (!any_converged || !std::isfinite(best.value))
    throw ConvergenceError("normalize_aghq: mode search did not converge (best at " +
                           format_vector(transform.forward(best.x)) + ")");

  const Eigen::MatrixXd neg_hessian = optim::fd_hessian(neg, best.x, opts.hessian_step);
  NormalizedSurrogate out;
  out.method = NormalizerMethod::Aghq;
  out.space = space;
  out.log_surrogate = f_bo;
  out.transform = transform;
  out.aghq = aghq_normalize<double>(f_t, best.x, neg_hessian, k);
  out.log_norm_const = out.aghq->log_norm_const;

  const int table_n = opts.table_points_per_dim > 0 ? opts.table_points_per_dim : default_table_points(d);
  out.table_grid = TensorGrid::regular(space, table_n);
  out.table_density = (eval_on(f_bo, out.table_grid).array() - out.log_norm_const).exp();
  out.marginal_cdfs = marginal_cdfs_of(out.table_grid, out.table_density);
  return out;
}

NormalizedSurrogate normalize_aghq(const LogDensityFn& f_bo, const SearchSpace& space, int k) {
  return normalize_aghq(f_bo, space, k, DomainTransform::logistic(space));
}

NormalizedSurrogate normalize_mcmc(const LogDensityFn& f_bo, const SearchSpace& space, int n_samples, int burn_in,
                                   double step_scale, std::uint64_t seed) {
  if (n_samples < 1000) throw InvalidArgument("normalize_mcmc: n_samples must be at least 1000");
  if (burn_in < 0) throw InvalidArgument("normalize_mcmc: burn_in must be non-negative");
  if (!(step_scale > 0)) throw InvalidArgument("normalize_mcmc: step_scale must be positive");
  const int d = space.dims();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double step = step_scale * space.diameter();

  Eigen::VectorXd x = scan_starts(f_bo, space, default_scan_points(d), 1).front();
  double fx = safe_eval(f_bo, x);
  McmcDiagnostics diag;
  diag.samples.resize(d, n_samples);
  diag.step_scale = step_scale;
  diag.burn_in = burn_in;
  diag.seed = seed;
  diag.bins_per_dim = d <= 2 ? 256 : 64;
  long accepted = 0;
  for (int it = 0; it < burn_in + n_samples; ++it) {
    Eigen::VectorXd prop(d);
    for (int j = 0; j < d; ++j) prop(j) = x(j) + step * normal(rng);
    prop = space.reflect(prop);
    const double fp = safe_eval(f_bo, prop);
    const double u = unif(rng);
    if (fp != kNegInf && std::log(u) < fp - fx) {
      x = prop;
      fx = fp;
      if (it >= burn_in) ++accepted;
    }
    if (it >= burn_in) diag.samples.col(it - burn_in) = x;
  }
  diag.acceptance_rate = static_cast<double>(accepted) / n_samples;
  diag.warning = diag.acceptance_rate < 0.05 || diag.acceptance_rate > 0.95;

  const int bins = diag.bins_per_dim;
  NormalizedSurrogate out;
  out.method = NormalizerMethod::Mcmc;
  out.space = space;
  out.log_surrogate = f_bo;
  for (int j = 0; j < d; ++j) {
    const double lo = space.lower()(j), w = space.width()(j);
    out.table_grid.axes.push_back(
        Eigen::VectorXd::LinSpaced(bins, lo + 0.5 * w / bins, space.upper()(j) - 0.5 * w / bins));
    Eigen::VectorXd sorted = diag.samples.row(j).transpose();
    std::sort(sorted.data(), sorted.data() + sorted.size());
    diag.sorted_marginals.push_back(std::move(sorted));
  }
  double bin_volume = 1;
  for (int j = 0; j < d; ++j) bin_volume *= space.width()(j) / bins;
  diag.histogram = Eigen::VectorXd::Zero(out.table_grid.size());
  for (int s = 0; s < n_samples; ++s) {
    Eigen::Index flat = 0, stride = 1;
    for (int j = 0; j < d; ++j) {
      auto b = static_cast<Eigen::Index>(
          std::floor((diag.samples(j, s) - space.lower()(j)) / space.width()(j) * bins));
      flat += std::clamp<Eigen::Index>(b, 0, bins - 1) * stride;
      stride *= bins;
    }
    diag.histogram(flat) += 1;
  }
  diag.histogram /= n_samples * bin_volume;

  // Surrogate mass over the bins the chain visited.
  std::vector<double> visited;
  for (Eigen::Index i = 0; i < diag.histogram.size(); ++i)
    if (diag.histogram(i) > 0) visited.push_back(safe_eval(f_bo, out.table_grid.point(i)) + std::log(bin_volume));
  out.log_norm_const = log_sum_exp(Eigen::Map<Eigen::VectorXd>(visited.data(), static_cast<Eigen::Index>(visited.size())));
  out.table_density = diag.histogram;
  out.mcmc = std::move(diag);
  return out;
}

}  // namespace boss
