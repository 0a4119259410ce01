#include "boss/bo_engine.hpp"

#include "boss/optim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <ostream>

namespace boss {

SearchSpace::SearchSpace(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) throw InvalidArgument("SearchSpace: bound dimensions differ");
  if (lower_.size() < 1 || lower_.size() > 3) throw InvalidArgument("SearchSpace: dimension must be 1, 2 or 3");
  for (Eigen::Index i = 0; i < lower_.size(); ++i)
    if (!(lower_(i) < upper_(i)) || !std::isfinite(lower_(i)) || !std::isfinite(upper_(i)))
      throw InvalidArgument("SearchSpace: need finite lower < upper in every dimension");
}

bool SearchSpace::contains(const Eigen::VectorXd& x) const {
  if (x.size() != lower_.size()) return false;
  return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
}

Eigen::VectorXd SearchSpace::clamp(Eigen::VectorXd x) const {
  return x.cwiseMax(lower_).cwiseMin(upper_);
}

Eigen::VectorXd SearchSpace::reflect(Eigen::VectorXd x) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) < lower_(i)) x(i) = 2 * lower_(i) - x(i);
    if (x(i) > upper_(i)) x(i) = 2 * upper_(i) - x(i);
  }
  return clamp(std::move(x));
}

std::vector<Eigen::VectorXd> default_initial_points(const SearchSpace& space, int count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("default_initial_points: count must be positive");
  const int d = space.dims();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(count), Eigen::VectorXd(d));
  if (d == 1) {
    for (int i = 0; i < count; ++i) {
      const double u = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
      pts[static_cast<std::size_t>(i)](0) = space.lower()(0) + u * space.width()(0);
    }
    return pts;
  }
  std::mt19937_64 rng(seed);
  for (int j = 0; j < d; ++j) {
    std::vector<int> perm(static_cast<std::size_t>(count));
    std::iota(perm.begin(), perm.end(), 0);
    if (j > 0) std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < count; ++i)
      pts[static_cast<std::size_t>(i)](j) =
          space.lower()(j) + (perm[static_cast<std::size_t>(i)] + 0.5) / count * space.width()(j);
  }
  return pts;
}

bool RunLedger::any_refresh_warning() const {
  return std::any_of(refreshes_.begin(), refreshes_.end(), [](const RefreshRecord& r) { return r.warning; });
}

void RunLedger::write_csv(std::ostream& os, bool include_timing) const {
  const int d = entries_.empty() ? 0 : static_cast<int>(entries_.front().alpha.size());
  os << "iter";
  for (int j = 0; j < d; ++j) os << ",alpha_" << (j + 1);
  os << ",f_value,cumulative_evals";
  if (include_timing) os << ",wall_ms";
  os << ",refresh_flag\n";
  for (const auto& e : entries_) {
    os << e.iter;
    for (int j = 0; j < d; ++j) os << ',' << format_double(e.alpha(j));
    os << ',' << format_double(e.f_value) << ',' << e.cumulative_evals;
    if (include_timing) os << ',' << format_double(e.wall_ms);
    os << ',' << (e.refresh ? 1 : 0) << '\n';
  }
}

double ucb_gamma(int t, double delta) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 2.0 * std::log(static_cast<double>(t) * t * pi2 / (6.0 * delta));
}

double ucb(const GpPosterior<double>& gp, int t, double delta, const Eigen::VectorXd& query, bool use_sd) {
  if (t < 1) throw InvalidArgument("ucb: iteration index must be >= 1");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("ucb: delta must lie in (0, 1)");
  const auto pred = gp.predict(query);
  const double spread = use_sd ? std::sqrt(pred.variance) : pred.variance;
  return pred.mean + std::sqrt(ucb_gamma(t, delta)) * spread;
}

namespace {

double radical_inverse(std::uint64_t index, int base) {
  double result = 0, f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

constexpr int kHaltonBases[] = {2, 3, 5};

}  // namespace

Eigen::VectorXd maximize_af(const GpPosterior<double>& gp, int t, double delta, const SearchSpace& space, int budget,
                            std::mt19937_64& rng, bool use_sd) {
  if (budget < 1) throw InvalidArgument("maximize_af: budget must be positive");
  const int d = space.dims();
  auto af = [&](const Eigen::VectorXd& q) { return ucb(gp, t, delta, q, use_sd); };

  // Randomly shifted Halton points (Cranley-Patterson rotation).
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd shift(d);
  for (int j = 0; j < d; ++j) shift(j) = unif(rng);

  struct Scored {
    Eigen::VectorXd x;
    double value;
  };
  std::vector<Scored> cands;
  cands.reserve(static_cast<std::size_t>(budget));
  for (int i = 0; i < budget; ++i) {
    Eigen::VectorXd x(d);
    for (int j = 0; j < d; ++j) {
      double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, kHaltonBases[j]) + shift(j);
      u -= std::floor(u);
      x(j) = space.lower()(j) + u * space.width()(j);
    }
    cands.push_back({x, af(x)});
  }
  const std::size_t keep = std::min<std::size_t>(3, cands.size());
  std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end(),
                    [](const Scored& a, const Scored& b) { return a.value > b.value; });

  const double spacing = 2.0 / std::pow(static_cast<double>(budget), 1.0 / d);
  Scored best = cands.front();
  for (std::size_t c = 0; c < keep; ++c) {
    Scored cur = cands[c];
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (int j = 0; j < d; ++j) {
        const double half = spacing * space.width()(j);
        const double lo = std::max(space.lower()(j), cur.x(j) - half);
        const double hi = std::min(space.upper()(j), cur.x(j) + half);
        Eigen::VectorXd probe = cur.x;
        const double arg = optim::golden_section_max(
            [&](double v) {
              probe(j) = v;
              return af(probe);
            },
            lo, hi, 40);
        // Golden section stops short of a boundary maximum; try the ends too.
        for (double v : {arg, lo, hi}) {
          probe(j) = v;
          const double val = af(probe);
          if (val > cur.value) cur = {probe, val};
        }
      }
    }
    if (cur.value > best.value) best = cur;
  }
  return space.clamp(best.x);
}

namespace {

using Clock = std::chrono::steady_clock;

struct CachedObjective {
  const LogDensityFn& fn;
  std::map<std::vector<double>, double> cache;

  // Returns {value, was_fresh}.
  std::pair<double, bool> operator()(const Eigen::VectorXd& a) {
    std::vector<double> key(a.data(), a.data() + a.size());
    if (auto it = cache.find(key); it != cache.end()) return {it->second, false};
    const double v = fn(a);
    if (!std::isfinite(v)) throw EvaluationError("run_boss: non-finite objective at alpha = " + format_vector(a));
    cache.emplace(std::move(key), v);
    return {v, true};
  }
};

}  // namespace

BossRun run_boss(const LogDensityFn& objective, const SearchSpace& space, const BoConfig& cfg) {
  const int d = space.dims();
  const auto m = static_cast<int>(cfg.initial_points.size());
  if (m < 1) throw InvalidArgument("run_boss: at least one initial point is required");
  if (cfg.iterations < m) throw InvalidArgument("run_boss: iterations B is smaller than the number of initial points");
  if (!(cfg.delta > 0 && cfg.delta < 1)) throw InvalidArgument("run_boss: delta must lie in (0, 1)");
  if (cfg.refresh_every < 1) throw InvalidArgument("run_boss: refresh_every must be positive");
  for (const auto& p : cfg.initial_points)
    if (!space.contains(p)) throw InvalidArgument("run_boss: initial point outside the search space " + format_vector(p));

  const int budget = cfg.af_candidates > 0 ? cfg.af_candidates : 512 * d;
  const double diam = space.diameter();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  BossRun run;
  CachedObjective eval{objective, {}};
  SeKernelParams<double> params;

  auto evaluate = [&](const Eigen::VectorXd& a) {
    const auto start = Clock::now();
    const auto [v, fresh] = eval(a);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    run.design.add(a, v);
    const int count = run.ledger.evaluations() + (fresh ? 1 : 0);
    run.ledger.record({static_cast<int>(run.design.size()), a, v, count, ms, false});
  };

  auto maybe_refresh = [&]() {
    const int t = static_cast<int>(run.design.size());
    if (t < m || t < 2 || t % cfg.refresh_every != 0) return;
    const auto grid = default_hyper_grid<double>(diam, run.design, cfg.hyper_grid_size);
    const auto r = refresh_hyperparams(run.design, params, grid);
    params = r.params;
    run.ledger.record_refresh({t, params, r.log_likelihood, r.warning});
    run.ledger.mark_last_refresh();
  };

  for (const auto& p : cfg.initial_points) {
    if (run.design.min_distance_to(p) <= kMinPointSeparation) throw InvalidArgument("run_boss: duplicate initial point");
    evaluate(p);
  }

  // Zero-mean GP on values centred by the mean of the initial evaluations.
  double mean0 = 0;
  for (double v : run.design.values) mean0 += v;
  run.design.center_offset = mean0 / m;
  params = {diam / 10.0, std::max(centered_sd(run.design), 1.0), cfg.noise_var};
  maybe_refresh();

  for (int t = m; t < cfg.iterations; ++t) {
    const auto gp = GpPosterior<double>::condition(params, run.design);
    Eigen::VectorXd next = maximize_af(gp, t, cfg.delta, space, budget, rng, cfg.ucb_use_sd);
    while (run.design.min_distance_to(next) <= kMinPointSeparation) {
      Eigen::VectorXd dir(d);
      for (int j = 0; j < d; ++j) dir(j) = normal(rng);
      if (dir.norm() == 0) continue;
      next = space.reflect(next + 1e-6 * diam * dir.normalized());
    }
    evaluate(next);
    maybe_refresh();
  }

  run.surrogate = SurrogateFn{GpPosterior<double>::condition(params, run.design)};
  return run;
}

}  // namespace boss
