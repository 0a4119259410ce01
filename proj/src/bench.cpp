#include "boss/bench.hpp"

#include "boss/diagnostics.hpp"
#include "boss/errors.hpp"
#include "boss/io.hpp"
#include "boss/numeric.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

namespace boss {

namespace {

using json = nlohmann::json;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Eigen::VectorXd unit(Eigen::Index size, Eigen::Index i) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(size);
  e(i) = 1;
  return e;
}

DensityTable table_1d(const NormalizedSurrogate& s) {
  return DensityTable::from_density(s.table_grid.axes[0], s.table_density);
}

json ledger_json(const RunLedger& ledger) {
  json times = json::array();
  for (const auto& e : ledger.entries()) times.push_back(e.wall_ms);
  return {{"evaluations", ledger.evaluations()},
          {"eval_wall_ms", times},
          {"hyperparameter_trace", io::refresh_trace_json(ledger)},
          {"refresh_warning", ledger.any_refresh_warning()}};
}

json surrogate_json(const NormalizedSurrogate& s) {
  json j{{"method", to_string(s.method)}, {"log_norm_const", s.log_norm_const}};
  if (s.aghq) j["aghq"] = {{"nodes", s.aghq->size()}, {"transform", "logistic"}};
  if (s.mcmc)
    j["mcmc"] = {{"sampler", "random-walk Metropolis, Gaussian proposal, reflecting boundary"},
                 {"samples", s.mcmc->samples.cols()},
                 {"burn_in", s.mcmc->burn_in},
                 {"step_scale", s.mcmc->step_scale},
                 {"seed", s.mcmc->seed},
                 {"bins_per_dim", s.mcmc->bins_per_dim},
                 {"acceptance_rate", s.mcmc->acceptance_rate},
                 {"warning", s.mcmc->warning}};
  return j;
}

void write_mixtures(const std::string& dir, const std::vector<MixtureSummary>& latent,
                    const std::vector<MixtureSummary>& theta) {
  for (std::size_t i = 0; i < latent.size(); ++i) {
    if (i == 0) io::write_file(io::join(dir, "mixture.csv"), [&](std::ostream& os) { write_mixture_csv(os, latent[i]); });
    io::write_file(io::join(dir, "mixture_" + latent[i].label + ".csv"),
                   [&](std::ostream& os) { write_mixture_csv(os, latent[i]); });
  }
  for (const auto& t : theta)
    io::write_file(io::join(dir, "mixture_" + t.label + ".csv"), [&](std::ostream& os) { write_mixture_csv(os, t); });
}

json mixtures_json(const std::vector<MixtureSummary>& v) {
  json j = json::array();
  for (const auto& s : v) j.push_back(io::mixture_json(s));
  return j;
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

}  // namespace

// ---------------------------------------------------------------------------
// Sim 1: closed-form log posteriors on [0, 10].

double Sim1Report::median_kl(const std::string& function, int budget) const {
  std::vector<double> v;
  for (const auto& c : cells)
    if (c.function == function && c.budget == budget) v.push_back(c.kl);
  return median(v);
}

double Sim1Report::median_ks(const std::string& function, int budget) const {
  std::vector<double> v;
  for (const auto& c : cells)
    if (c.function == function && c.budget == budget) v.push_back(c.ks);
  return median(v);
}

json Sim1Report::to_json(const Sim1Options& opts) const {
  json j;
  j["config"] = {{"subcommand", "sim1"},     {"budgets", opts.budgets},         {"seeds", opts.seeds},
                 {"functions", opts.functions}, {"initial_count", opts.initial_count},
                 {"grid_points", opts.grid_points}, {"delta", opts.delta},    {"refresh_every", opts.refresh_every}};
  json summary = json::array();
  for (const auto& f : opts.functions)
    for (int b : opts.budgets)
      summary.push_back({{"function", f}, {"B", b}, {"median_kl", median_kl(f, b)}, {"median_ks", median_ks(f, b)}});
  j["summary"] = summary;
  json cs = json::array();
  for (const auto& c : cells)
    cs.push_back({{"function", c.function}, {"B", c.budget}, {"seed", c.seed}, {"kl", c.kl}, {"ks", c.ks},
                  {"evaluations", c.evaluations}, {"wall_ms", c.wall_ms}});
  j["cells"] = cs;
  return j;
}

Sim1Report run_sim1(const Sim1Options& opts) {
  Sim1Report report;
  const bool write = !opts.out_dir.empty();
  if (write) io::ensure_directory(opts.out_dir);
  for (const auto& name : opts.functions) {
    const AnalyticPosterior post = analytic_posterior(name);
    const NormalizedSurrogate truth = normalize_grid(post.log_density, post.space, opts.grid_points);
    const DensityTable q = table_1d(truth);
    if (write)
      io::write_file(io::join(opts.out_dir, name + "_truth.csv"), [&](std::ostream& os) { truth.write_csv(os); });
    for (int budget : opts.budgets) {
      for (std::uint64_t seed : opts.seeds) {
        Stopwatch sw;
        BoConfig cfg;
        cfg.iterations = budget;
        cfg.delta = opts.delta;
        cfg.refresh_every = opts.refresh_every;
        cfg.seed = seed;
        cfg.initial_points = default_initial_points(post.space, opts.initial_count, seed);
        const BossRun run = run_boss(post.log_density, post.space, cfg);
        const NormalizedSurrogate approx = normalize_grid(run.surrogate, post.space, opts.grid_points);
        const DensityTable p = table_1d(approx);
        Sim1Cell cell{name, budget, seed, kl_divergence(p, q), ks_distance(p, q), run.ledger.evaluations(), sw.ms()};
        if (write) {
          const std::string stem = io::join(opts.out_dir, name + "_B" + std::to_string(budget) + "_" + seed_tag(seed));
          io::write_file(stem + "_design.csv", [&](std::ostream& os) { run.ledger.write_csv(os, false); });
          io::write_file(stem + "_posterior.csv", [&](std::ostream& os) { approx.write_csv(os); });
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  if (write) {
    io::write_file(io::join(opts.out_dir, "sim1_cells.csv"), [&](std::ostream& os) {
      os << "function,B,seed,kl,ks,evaluations\n";
      for (const auto& c : report.cells)
        os << c.function << ',' << c.budget << ',' << c.seed << ',' << format_double(c.kl) << ','
           << format_double(c.ks) << ',' << c.evaluations << '\n';
    });
    io::write_file(io::join(opts.out_dir, "report.json"),
                   [&](std::ostream& os) { os << report.to_json(opts).dump(2) << '\n'; });
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sim 2: Poisson regression with an unknown period.

json Sim2Report::to_json(const Sim2Options& opts) const {
  json j;
  j["config"] = {{"subcommand", "sim2"},          {"budgets", opts.budgets},
                 {"seeds", opts.seeds},            {"initial_count", opts.initial_count},
                 {"oracle_points", opts.oracle_points}, {"grid_points", opts.grid_points},
                 {"mixture_k", opts.mixture_k},    {"k_theta", opts.k_theta},
                 {"n_obs", opts.n_obs},            {"delta", opts.delta},
                 {"refresh_every", opts.refresh_every}};
  json cs = json::array();
  for (const auto& c : cells)
    cs.push_back({{"seed", c.seed},
                  {"B", c.budget},
                  {"ks", c.ks},
                  {"kl", c.kl},
                  {"boss_evals", c.boss_evals},
                  {"oracle_evals", c.oracle_evals},
                  {"boss_ms", c.boss_ms},
                  {"oracle_ms", c.oracle_ms},
                  {"runtime_ratio", c.runtime_ratio},
                  {"latent", mixtures_json(c.latent)},
                  {"theta", mixtures_json(c.theta)}});
  j["cells"] = cs;
  return j;
}

Sim2Report run_sim2(const Sim2Options& opts) {
  Sim2Report report;
  const bool write = !opts.out_dir.empty();
  if (write) io::ensure_directory(opts.out_dir);
  for (std::uint64_t seed : opts.seeds) {
    const PeriodicPoissonSample sample = simulate_periodic_poisson(seed, opts.n_obs);
    const ConditionalModel model = periodic_poisson_model(sample.data);
    const SearchSpace& space = model.space;
    const std::string dir = write ? io::join(opts.out_dir, seed_tag(seed)) : std::string();
    if (write) {
      io::ensure_directory(dir);
      io::write_file(io::join(dir, "data.csv"), [&](std::ostream& os) { write_dataset_csv(os, sample.data); });
    }

    // Grid oracle, shared by every budget for this seed.
    FitCounter oracle_fits;
    const LogDensityFn oracle_f = conditional_log_posterior(model, opts.k_theta, &oracle_fits);
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(opts.oracle_points, space.lower()(0), space.upper()(0));
    Eigen::VectorXd oracle_vals(grid.size());
    Stopwatch oracle_sw;
    for (Eigen::Index i = 0; i < grid.size(); ++i) oracle_vals(i) = oracle_f(Eigen::VectorXd::Constant(1, grid(i)));
    const double oracle_ms = oracle_sw.ms();
    const DensityTable oracle = DensityTable::from_log_density(grid, oracle_vals);
    if (write)
      io::write_file(io::join(dir, "oracle.csv"), [&](std::ostream& os) {
        os << "alpha_1,log_posterior,density,cdf\n";
        for (Eigen::Index i = 0; i < grid.size(); ++i)
          os << format_double(grid(i)) << ',' << format_double(oracle_vals(i)) << ',' << format_double(oracle.density(i))
             << ',' << format_double(oracle.cdf(i)) << '\n';
      });

    for (int budget : opts.budgets) {
      FitCounter fits;
      const LogDensityFn f = conditional_log_posterior(model, opts.k_theta, &fits);
      Stopwatch sw;
      BoConfig cfg;
      cfg.iterations = budget;
      cfg.delta = opts.delta;
      cfg.refresh_every = opts.refresh_every;
      cfg.seed = seed;
      cfg.initial_points = default_initial_points(space, opts.initial_count, seed);
      const BossRun run = run_boss(f, space, cfg);
      const NormalizedSurrogate approx = normalize_grid(run.surrogate, space, opts.grid_points);
      const NormalizedSurrogate quad = normalize_aghq(run.surrogate, space, opts.mixture_k);
      const MixtureInference inference = infer_mixture(model, quad, opts.mixture_k, opts.k_theta, &fits);
      Sim2Cell cell;
      cell.boss_ms = sw.ms();
      cell.seed = seed;
      cell.budget = budget;
      cell.boss_evals = evaluation_ledger(run.ledger, opts.mixture_k, 1, fits.count);
      cell.oracle_evals = oracle_fits.count;
      cell.oracle_ms = oracle_ms;
      cell.runtime_ratio = cell.boss_ms / oracle_ms;
      const DensityTable p = approx.marginal_table(0, grid);
      cell.ks = ks_distance(p, oracle);
      cell.kl = kl_divergence(p, oracle);
      const Eigen::Index latent_dim = inference.node_fits.front().latent_modes.front().size();
      for (std::size_t i = 0; i < model.latent_names.size(); ++i)
        cell.latent.push_back(
            mix_latent(inference, unit(latent_dim, static_cast<Eigen::Index>(i)), model.latent_names[i]));
      cell.theta = mix_theta(inference);
      for (std::size_t i = 0; i < cell.theta.size(); ++i) cell.theta[i].label = model.theta_names[i];

      if (write) {
        const std::string stem = io::join(dir, "B" + std::to_string(budget));
        io::ensure_directory(stem);
        io::write_file(io::join(stem, "design.csv"), [&](std::ostream& os) { run.ledger.write_csv(os, false); });
        io::write_file(io::join(stem, "posterior.csv"), [&](std::ostream& os) { approx.write_csv(os); });
        write_mixtures(stem, cell.latent, cell.theta);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  if (write) {
    io::write_file(io::join(opts.out_dir, "sim2_cells.csv"), [&](std::ostream& os) {
      os << "seed,B,ks,kl,boss_evals,oracle_evals\n";
      for (const auto& c : report.cells)
        os << c.seed << ',' << c.budget << ',' << format_double(c.ks) << ',' << format_double(c.kl) << ','
           << c.boss_evals << ',' << c.oracle_evals << '\n';
    });
    io::write_file(io::join(opts.out_dir, "report.json"),
                   [&](std::ostream& os) { os << report.to_json(opts).dump(2) << '\n'; });
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sim 4: Plummer profile with two shape parameters.

json Sim4Report::to_json(const Sim4Options& opts) const {
  json j;
  j["config"] = {{"subcommand", "sim4"},
                 {"B", opts.budget},
                 {"seeds", opts.seeds},
                 {"initial_count", opts.initial_count},
                 {"oracle_points_per_dim", opts.oracle_points_per_dim},
                 {"mcmc_samples", opts.mcmc_samples},
                 {"mcmc_burn_in", opts.mcmc_burn_in},
                 {"mcmc_step_scale", opts.mcmc_step_scale},
                 {"mixture_k", opts.mixture_k},
                 {"k_theta", opts.k_theta},
                 {"delta", opts.delta},
                 {"refresh_every", opts.refresh_every}};
  json cs = json::array();
  for (const auto& c : cells)
    cs.push_back({{"seed", c.seed},
                  {"marginal_ks", io::to_json(c.marginal_ks)},
                  {"surrogate_mode", io::to_json(c.surrogate_mode)},
                  {"oracle_mode", io::to_json(c.oracle_mode)},
                  {"acceptance_rate", c.acceptance_rate},
                  {"mcmc_warning", c.mcmc_warning},
                  {"boss_evals", c.boss_evals},
                  {"recorded_fits", c.recorded_fits},
                  {"oracle_gamma_mean", c.oracle_gamma_mean},
                  {"latent", mixtures_json(c.latent)},
                  {"boss_ms", c.boss_ms},
                  {"oracle_ms", c.oracle_ms}});
  j["cells"] = cs;
  return j;
}

Sim4Report run_sim4(const Sim4Options& opts) {
  Sim4Report report;
  const bool write = !opts.out_dir.empty();
  if (write) io::ensure_directory(opts.out_dir);
  for (std::uint64_t seed : opts.seeds) {
    const Dataset data = simulate_plummer(seed);
    const ConditionalModel model = plummer_model(data);
    const SearchSpace& space = model.space;
    const std::string dir = write ? io::join(opts.out_dir, seed_tag(seed)) : std::string();
    if (write) {
      io::ensure_directory(dir);
      io::write_file(io::join(dir, "data.csv"), [&](std::ostream& os) { write_dataset_csv(os, data); });
    }
    Sim4Cell cell;
    cell.seed = seed;

    // 2-D grid oracle from the same conjugate fits.
    const TensorGrid grid = TensorGrid::regular(space, opts.oracle_points_per_dim);
    Eigen::VectorXd log_post(grid.size()), gamma_mean(grid.size());
    Stopwatch oracle_sw;
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd a = grid.point(i);
      const LgmFit fit = fit_lgm(model.build(a), opts.k_theta);
      log_post(i) = fit.log_marginal_likelihood + model.alpha_log_prior(a);
      gamma_mean(i) = latent_conditional(fit, unit(2, 1)).mean();
    }
    cell.oracle_ms = oracle_sw.ms();
    Eigen::Index best = 0;
    log_post.maxCoeff(&best);
    cell.oracle_mode = grid.point(best);
    const Eigen::VectorXd mass = ((log_post.array() - log_post(best)).exp() * grid.log_weights().array().exp()).matrix();
    cell.oracle_gamma_mean = mass.dot(gamma_mean) / mass.sum();
    const Eigen::VectorXd joint = (log_post.array() - log_post(best)).exp();
    std::vector<DensityTable> oracle_marginals;
    for (int j = 0; j < 2; ++j)
      oracle_marginals.push_back(DensityTable::from_density(grid.axes[static_cast<std::size_t>(j)], grid.marginal(joint, j)));

    FitCounter fits;
    const LogDensityFn f = conditional_log_posterior(model, opts.k_theta, &fits);
    Stopwatch sw;
    BoConfig cfg;
    cfg.iterations = opts.budget;
    cfg.delta = opts.delta;
    cfg.refresh_every = opts.refresh_every;
    cfg.seed = seed;
    cfg.initial_points = default_initial_points(space, opts.initial_count, seed);
    const BossRun run = run_boss(f, space, cfg);
    const NormalizedSurrogate sampled =
        normalize_mcmc(run.surrogate, space, opts.mcmc_samples, opts.mcmc_burn_in, opts.mcmc_step_scale, seed);
    const NormalizedSurrogate quad = normalize_aghq(run.surrogate, space, opts.mixture_k);
    const MixtureInference inference = infer_mixture(model, quad, opts.mixture_k, opts.k_theta, &fits);
    cell.boss_ms = sw.ms();
    cell.recorded_fits = fits.count;
    cell.boss_evals = evaluation_ledger(run.ledger, opts.mixture_k, 2, fits.count);
    cell.acceptance_rate = sampled.mcmc->acceptance_rate;
    cell.mcmc_warning = sampled.mcmc->warning;
    for (int j = 0; j < 2; ++j)
      cell.marginal_ks(j) = ks_distance(oracle_marginals[static_cast<std::size_t>(j)],
                                        [&](double x) { return sampled.marginal_cdf(j, x); });
    Eigen::Index sbest = 0;
    Eigen::VectorXd f_bo(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) f_bo(i) = run.surrogate(grid.point(i));
    f_bo.maxCoeff(&sbest);
    cell.surrogate_mode = grid.point(sbest);
    cell.latent.push_back(mix_latent(inference, unit(2, 0), model.latent_names[0]));
    cell.latent.push_back(mix_latent(inference, unit(2, 1), model.latent_names[1]));

    if (write) {
      io::write_file(io::join(dir, "design.csv"), [&](std::ostream& os) { run.ledger.write_csv(os, false); });
      io::write_file(io::join(dir, "posterior.csv"), [&](std::ostream& os) { sampled.write_csv(os); });
      io::write_file(io::join(dir, "oracle.csv"), [&](std::ostream& os) {
        os << "alpha_1,alpha_2,log_posterior,gamma_mean\n";
        for (Eigen::Index i = 0; i < grid.size(); ++i) {
          const Eigen::VectorXd a = grid.point(i);
          os << format_double(a(0)) << ',' << format_double(a(1)) << ',' << format_double(log_post(i)) << ','
             << format_double(gamma_mean(i)) << '\n';
        }
      });
      write_mixtures(dir, cell.latent, {});
    }
    report.cells.push_back(std::move(cell));
  }
  if (write) {
    io::write_file(io::join(opts.out_dir, "sim4_cells.csv"), [&](std::ostream& os) {
      os << "seed,ks_R,ks_beta,mode_R,mode_beta,oracle_mode_R,oracle_mode_beta,boss_evals\n";
      for (const auto& c : report.cells)
        os << c.seed << ',' << format_double(c.marginal_ks(0)) << ',' << format_double(c.marginal_ks(1)) << ','
           << format_double(c.surrogate_mode(0)) << ',' << format_double(c.surrogate_mode(1)) << ','
           << format_double(c.oracle_mode(0)) << ',' << format_double(c.oracle_mode(1)) << ',' << c.boss_evals << '\n';
    });
    io::write_file(io::join(opts.out_dir, "report.json"),
                   [&](std::ostream& os) { os << report.to_json(opts).dump(2) << '\n'; });
  }
  return report;
}

// ---------------------------------------------------------------------------
// Generic pipeline.

PipelineResult run_pipeline(const PipelineOptions& opts) {
  std::optional<ConditionalModel> lgm;
  LogDensityFn objective;
  SearchSpace space;
  FitCounter fits;

  if (opts.model.rfind("analytic:", 0) == 0) {
    if (!opts.data_path.empty()) throw InvalidArgument("data: analytic models take no dataset");
    const AnalyticPosterior post = analytic_posterior(opts.model.substr(9));
    objective = post.log_density;
    space = post.space;
  } else if (opts.model == "periodic-poisson" || opts.model == "plummer") {
    Dataset data;
    if (!opts.data_path.empty()) {
      try {
        data = read_dataset_csv_file(opts.data_path);
      } catch (const std::exception& e) {
        throw InvalidArgument(std::string("data: ") + e.what());
      }
    } else {
      data = opts.model == "plummer" ? simulate_plummer(opts.seed) : simulate_periodic_poisson(opts.seed).data;
    }
    lgm = opts.model == "plummer" ? plummer_model(data) : periodic_poisson_model(data);
    objective = conditional_log_posterior(*lgm, opts.k_theta, &fits);
    space = lgm->space;
  } else {
    throw InvalidArgument("model: unknown model id '" + opts.model +
                          "' (expected analytic:simple|medium|hard, periodic-poisson or plummer)");
  }
  if (opts.bounds) {
    if (opts.bounds->dims() != space.dims())
      throw InvalidArgument("bounds: model has " + std::to_string(space.dims()) + " dimensions, got " +
                            std::to_string(opts.bounds->dims()));
    space = *opts.bounds;
  }
  const int d = space.dims();

  BoConfig cfg;
  cfg.iterations = opts.iterations;
  cfg.delta = opts.delta;
  cfg.refresh_every = opts.refresh_every;
  cfg.seed = opts.seed;
  const int m = opts.initial_count > 0 ? opts.initial_count : (d == 1 ? 3 : 20);
  cfg.initial_points = opts.initial_points.empty() ? default_initial_points(space, m, opts.seed) : opts.initial_points;
  for (const auto& p : cfg.initial_points)
    if (p.size() != d || !space.contains(p)) throw InvalidArgument("init: point " + format_vector(p) + " is outside the bounds");
  if (opts.iterations < static_cast<int>(cfg.initial_points.size()))
    throw InvalidArgument("iters: B must be at least the number of initial points");

  PipelineResult out;
  json phases;
  Stopwatch sw;
  out.run = run_boss(objective, space, cfg);
  phases["bo_ms"] = sw.ms();

  const int quad_k = opts.quad_k > 0 ? opts.quad_k : (d == 1 ? 10 : 4);
  sw = Stopwatch();
  switch (opts.normalizer) {
    case NormalizerMethod::Grid:
      out.surrogate = normalize_grid(out.run.surrogate, space, opts.grid_points > 0 ? opts.grid_points : (d == 1 ? 1024 : 128));
      break;
    case NormalizerMethod::Aghq: out.surrogate = normalize_aghq(out.run.surrogate, space, quad_k); break;
    case NormalizerMethod::Mcmc:
      out.surrogate = normalize_mcmc(out.run.surrogate, space, opts.mcmc_samples, opts.mcmc_samples / 10,
                                     opts.mcmc_step_scale, opts.seed);
      break;
  }
  phases["normalize_ms"] = sw.ms();

  if (lgm) {
    sw = Stopwatch();
    const NormalizedSurrogate quad = opts.normalizer == NormalizerMethod::Aghq
                                         ? out.surrogate
                                         : normalize_aghq(out.run.surrogate, space, quad_k);
    const MixtureInference inference = infer_mixture(*lgm, quad, quad_k, opts.k_theta, &fits);
    const Eigen::Index p = inference.node_fits.front().latent_modes.front().size();
    for (std::size_t i = 0; i < lgm->latent_names.size(); ++i)
      out.latent.push_back(mix_latent(inference, unit(p, static_cast<Eigen::Index>(i)), lgm->latent_names[i]));
    out.theta = mix_theta(inference);
    for (std::size_t i = 0; i < out.theta.size(); ++i) out.theta[i].label = lgm->theta_names[i];
    out.recorded_fits = fits.count;
    out.ledger_total = evaluation_ledger(out.run.ledger, quad_k, d, fits.count);
    phases["mixture_ms"] = sw.ms();
  }

  json init = json::array();
  for (const auto& p : cfg.initial_points) init.push_back(io::to_json(p));
  out.report["config"] = {{"subcommand", "boss"},
                          {"model", opts.model},
                          {"data", opts.data_path},
                          {"bounds", {{"lower", io::to_json(space.lower())}, {"upper", io::to_json(space.upper())}}},
                          {"init", init},
                          {"iters", opts.iterations},
                          {"delta", opts.delta},
                          {"refresh_every", opts.refresh_every},
                          {"normalizer", to_string(opts.normalizer)},
                          {"grid_points", opts.grid_points},
                          {"quad_k", quad_k},
                          {"mcmc_samples", opts.mcmc_samples},
                          {"k_theta", opts.k_theta},
                          {"seed", opts.seed}};
  out.report["ledger"] = ledger_json(out.run.ledger);
  out.report["surrogate"] = surrogate_json(out.surrogate);
  out.report["wall_ms"] = phases;
  if (lgm) {
    out.report["evaluations"] = {{"recorded_fits", out.recorded_fits}, {"B_plus_k_pow_d", out.ledger_total}};
    out.report["latent"] = mixtures_json(out.latent);
    out.report["theta"] = mixtures_json(out.theta);
  }

  if (!opts.out_dir.empty()) {
    io::ensure_directory(opts.out_dir);
    io::write_file(io::join(opts.out_dir, "design.csv"), [&](std::ostream& os) { out.run.ledger.write_csv(os, false); });
    io::write_file(io::join(opts.out_dir, "posterior.csv"), [&](std::ostream& os) { out.surrogate.write_csv(os); });
    out.report["posterior_table"] = io::join(opts.out_dir, "posterior.csv");
    if (lgm) write_mixtures(opts.out_dir, out.latent, out.theta);
    io::write_file(io::join(opts.out_dir, "report.json"), [&](std::ostream& os) { os << out.report.dump(2) << '\n'; });
  }
  return out;
}

}  // namespace boss
