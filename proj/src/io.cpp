#include "boss/io.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace boss::io {

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path);
}

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

nlohmann::json mixture_json(const MixtureSummary& s) {
  nlohmann::json j;
  j["label"] = s.label;
  j["mean"] = s.mean();
  j["sd"] = s.sd();
  j["quantiles"] = {{"0.025", s.quantile(0.025)}, {"0.5", s.quantile(0.5)}, {"0.975", s.quantile(0.975)}};
  j["nodes"] = s.nodes.size();
  return j;
}

nlohmann::json refresh_trace_json(const RunLedger& ledger) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : ledger.refreshes())
    j.push_back({{"after_evals", r.after_evals},
                 {"length_scale", r.params.length_scale},
                 {"sd", r.params.sd},
                 {"log_likelihood", r.log_likelihood},
                 {"warning", r.warning}});
  return j;
}

}  // namespace boss::io
