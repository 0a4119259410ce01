#pragma once

// Report plumbing: output directories, text files and JSON fragments.

#include "boss/bo_engine.hpp"
#include "boss/posterior_mix.hpp"

#include <json.hpp>

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>

namespace boss::io {

void ensure_directory(const std::string& dir);
std::string join(const std::string& dir, const std::string& name);

// Writes through a stream callback; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& body);

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json mixture_json(const MixtureSummary& summary);
nlohmann::json refresh_trace_json(const RunLedger& ledger);

}  // namespace boss::io
