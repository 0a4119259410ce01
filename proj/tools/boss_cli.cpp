// boss: sequential-design posterior approximation for conditional LGMs.
//
//   boss sim1 --iters 10,30,80 --seeds 0,1,2 --out out/sim1
//   boss sim2 --iters 80 --seeds 1 --out out/sim2
//   boss sim4 --iters 100 --seeds 1 --out out/sim4
//   boss boss --model plummer --iters 100 --normalizer mcmc --quad-k 4 --out out/plummer
//
// Any subcommand accepts --config file.json whose keys are the long flag
// names without dashes; flags given on the command line win.

#include "boss/bench.hpp"
#include "boss/errors.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

struct Flags {
  std::string config;
  std::string model;
  std::string data;
  std::string bounds;
  std::string init;
  int init_count = 0;
  std::string iters;
  double delta = 0.01;
  int refresh_every = 10;
  std::string normalizer;
  int grid_points = 0;
  int quad_k = 0;
  int mcmc_samples = 0;
  std::string seeds;
  std::string out;
};

// Merged view of config-file values and command-line flags.
class Settings {
 public:
  Settings(const CLI::App& app, json file) : app_(app), file_(std::move(file)) {
    static const std::vector<std::string> known{"model", "data", "bounds", "init", "init-count", "iters", "delta",
                                                "refresh-every", "normalizer", "grid-points", "quad-k",
                                                "mcmc-samples", "seed", "seeds", "out"};
    for (const auto& item : file_.items())
      if (std::find(known.begin(), known.end(), item.key()) == known.end())
        throw boss::InvalidArgument("config: unknown key '" + item.key() + "'");
  }

  bool given(const std::string& name) const {
    return app_.get_option("--" + name)->count() > 0 || file_.contains(name) ||
           (name == "seeds" && file_.contains("seed"));
  }

  std::string text(const std::string& name, const std::string& cli_value) const {
    if (app_.get_option("--" + name)->count() > 0) return cli_value;
    std::string key = name == "seeds" && !file_.contains("seeds") ? "seed" : name;
    if (!file_.contains(key)) return {};
    const json& v = file_.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
      return s;
    }
    return v.dump();
  }

  template <typename T>
  T number(const std::string& name, T cli_value, T fallback) const {
    if (app_.get_option("--" + name)->count() > 0) return cli_value;
    if (!file_.contains(name)) return fallback;
    try {
      return file_.at(name).get<T>();
    } catch (const std::exception&) {
      throw boss::InvalidArgument("config: field '" + name + "' has the wrong type");
    }
  }

 private:
  const CLI::App& app_;
  json file_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& field) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw boss::InvalidArgument(field + ": '" + s + "' is not a number");
  }
}

std::vector<int> parse_ints(const std::string& s, const std::string& field) {
  std::vector<int> out;
  for (const auto& p : split(s, ',')) {
    const double v = parse_double(p, field);
    if (v != static_cast<int>(v)) throw boss::InvalidArgument(field + ": '" + p + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw boss::InvalidArgument(field + ": empty list");
  return out;
}

std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> out;
  for (int v : parse_ints(s, "seeds")) {
    if (v < 0) throw boss::InvalidArgument("seeds: must be non-negative");
    out.push_back(static_cast<std::uint64_t>(v));
  }
  return out;
}

boss::SearchSpace parse_bounds(const std::string& s) {
  const auto parts = split(s, ',');
  Eigen::VectorXd lo(static_cast<Eigen::Index>(parts.size())), hi(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto lu = split(parts[i], ':');
    if (lu.size() != 2) throw boss::InvalidArgument("bounds: expected l:u, got '" + parts[i] + "'");
    lo(static_cast<Eigen::Index>(i)) = parse_double(lu[0], "bounds");
    hi(static_cast<Eigen::Index>(i)) = parse_double(lu[1], "bounds");
  }
  try {
    return boss::SearchSpace(lo, hi);
  } catch (const std::exception& e) {
    throw boss::InvalidArgument(std::string("bounds: ") + e.what());
  }
}

std::vector<Eigen::VectorXd> parse_init(const std::string& s) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& point : split(s, ';')) {
    const auto coords = split(point, ',');
    Eigen::VectorXd p(static_cast<Eigen::Index>(coords.size()));
    for (std::size_t i = 0; i < coords.size(); ++i) p(static_cast<Eigen::Index>(i)) = parse_double(coords[i], "init");
    out.push_back(p);
  }
  return out;
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw boss::InvalidArgument("config: cannot open " + path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw boss::InvalidArgument("config: top level must be an object");
    return j;
  } catch (const json::parse_error& e) {
    throw boss::InvalidArgument(std::string("config: ") + e.what());
  }
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file");
  sub->add_option("--model", f.model, "analytic:{simple,medium,hard}, periodic-poisson or plummer");
  sub->add_option("--data", f.data, "dataset CSV with columns x (or r) and y");
  sub->add_option("--bounds", f.bounds, "search box l1:u1[,l2:u2]");
  sub->add_option("--init", f.init, "initial points a1;a2;... (coordinates comma separated)");
  sub->add_option("--init-count", f.init_count, "number of default initial points");
  sub->add_option("--iters", f.iters, "B, or a comma-separated list of B for sim1/sim2");
  sub->add_option("--delta", f.delta, "UCB confidence parameter");
  sub->add_option("--refresh-every", f.refresh_every, "hyperparameter refresh period B_A");
  sub->add_option("--normalizer", f.normalizer, "grid, aghq or mcmc");
  sub->add_option("--grid-points", f.grid_points, "grid normalizer points per dimension");
  sub->add_option("--quad-k", f.quad_k, "mixture quadrature points per dimension");
  sub->add_option("--mcmc-samples", f.mcmc_samples, "Metropolis samples after burn-in");
  sub->add_option("--seed,--seeds", f.seeds, "seed or comma-separated seeds");
  sub->add_option("--out", f.out, "output directory");
}

void report_cells(const json& report) {
  if (report.contains("summary")) std::cout << report["summary"].dump(2) << '\n';
  else if (report.contains("cells")) std::cout << report["cells"].dump(2) << '\n';
  else std::cout << report.dump(2) << '\n';
}

int run(const std::string& name, const CLI::App& app, const Flags& f) {
  const Settings s(app, load_config(f.config));
  const std::string out = s.text("out", f.out);
  const std::string seeds = s.text("seeds", f.seeds);
  const std::string iters = s.text("iters", f.iters);

  if (name == "sim1") {
    boss::Sim1Options o;
    if (!iters.empty()) o.budgets = parse_ints(iters, "iters");
    if (!seeds.empty()) o.seeds = parse_seeds(seeds);
    o.initial_count = s.number("init-count", f.init_count, o.initial_count);
    o.grid_points = s.number("grid-points", f.grid_points, o.grid_points);
    o.delta = s.number("delta", f.delta, o.delta);
    o.refresh_every = s.number("refresh-every", f.refresh_every, o.refresh_every);
    o.out_dir = out;
    const auto r = boss::run_sim1(o);
    report_cells(r.to_json(o));
    return 0;
  }
  if (name == "sim2") {
    boss::Sim2Options o;
    if (!iters.empty()) o.budgets = parse_ints(iters, "iters");
    if (!seeds.empty()) o.seeds = parse_seeds(seeds);
    o.initial_count = s.number("init-count", f.init_count, o.initial_count);
    o.grid_points = s.number("grid-points", f.grid_points, o.grid_points);
    o.mixture_k = s.number("quad-k", f.quad_k, o.mixture_k);
    o.delta = s.number("delta", f.delta, o.delta);
    o.refresh_every = s.number("refresh-every", f.refresh_every, o.refresh_every);
    o.out_dir = out;
    const auto r = boss::run_sim2(o);
    report_cells(r.to_json(o));
    return 0;
  }
  if (name == "sim4") {
    boss::Sim4Options o;
    if (!iters.empty()) {
      const auto b = parse_ints(iters, "iters");
      if (b.size() != 1) throw boss::InvalidArgument("iters: sim4 takes a single B");
      o.budget = b.front();
    }
    if (!seeds.empty()) o.seeds = parse_seeds(seeds);
    o.initial_count = s.number("init-count", f.init_count, o.initial_count);
    o.mixture_k = s.number("quad-k", f.quad_k, o.mixture_k);
    o.mcmc_samples = s.number("mcmc-samples", f.mcmc_samples, o.mcmc_samples);
    o.delta = s.number("delta", f.delta, o.delta);
    o.refresh_every = s.number("refresh-every", f.refresh_every, o.refresh_every);
    o.out_dir = out;
    const auto r = boss::run_sim4(o);
    report_cells(r.to_json(o));
    return 0;
  }

  boss::PipelineOptions o;
  const std::string model = s.text("model", f.model);
  if (!model.empty()) o.model = model;
  o.data_path = s.text("data", f.data);
  if (s.given("data") && o.data_path.empty()) throw boss::InvalidArgument("data: empty dataset path");
  const std::string bounds = s.text("bounds", f.bounds);
  if (!bounds.empty()) o.bounds = parse_bounds(bounds);
  const std::string init = s.text("init", f.init);
  if (!init.empty()) o.initial_points = parse_init(init);
  o.initial_count = s.number("init-count", f.init_count, 0);
  if (!iters.empty()) {
    const auto b = parse_ints(iters, "iters");
    if (b.size() != 1) throw boss::InvalidArgument("iters: boss takes a single B");
    o.iterations = b.front();
  }
  o.delta = s.number("delta", f.delta, o.delta);
  o.refresh_every = s.number("refresh-every", f.refresh_every, o.refresh_every);
  const std::string norm = s.text("normalizer", f.normalizer);
  if (!norm.empty()) o.normalizer = boss::parse_normalizer(norm);
  o.grid_points = s.number("grid-points", f.grid_points, 0);
  o.quad_k = s.number("quad-k", f.quad_k, 0);
  o.mcmc_samples = s.number("mcmc-samples", f.mcmc_samples, o.mcmc_samples);
  if (!seeds.empty()) {
    const auto v = parse_seeds(seeds);
    if (v.size() != 1) throw boss::InvalidArgument("seed: boss takes a single seed");
    o.seed = v.front();
  }
  o.out_dir = out;
  const auto r = boss::run_pipeline(o);
  report_cells(r.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GP-guided surrogate posteriors for conditional latent Gaussian models"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<std::pair<std::string, CLI::App*>> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"sim1", "analytic 1-D targets: KL/KS against the exact posterior over budgets and seeds"},
      {"sim2", "periodic Poisson model: surrogate vs 800-point grid oracle"},
      {"sim4", "2-D Plummer model: surrogate vs 100 x 100 grid oracle and MCMC"},
      {"boss", "one end-to-end run on a chosen model"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    subs.emplace_back(name, sub);
  }
  CLI11_PARSE(app, argc, argv);
  for (const auto& [name, sub] : subs) {
    if (!sub->parsed()) continue;
    try {
      return run(name, *sub, flags);
    } catch (const boss::InvalidArgument& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
  }
  return 1;
}
