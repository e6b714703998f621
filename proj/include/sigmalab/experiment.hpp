#ifndef SIGMALAB_EXPERIMENT_HPP
#define SIGMALAB_EXPERIMENT_HPP

#include <json.hpp>
#include <string>
#include <vector>

#include "sigmalab/config.hpp"

namespace sigmalab::experiment {

using Json = nlohmann::ordered_json;

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct RunResult {
  Json summary;
  std::vector<Check> checks;
  std::vector<std::string> files;  ///< written under the output directory
  bool pass() const;
};

/// Runs the configured experiment and writes summary.json plus CSV files to
/// cfg.output_dir. config_hash goes into the summary verbatim.
RunResult run(const config::ExperimentConfig& cfg, const std::string& config_hash);

/// Same, without touching the file system.
RunResult evaluate(const config::ExperimentConfig& cfg, const std::string& config_hash,
                   std::vector<std::pair<std::string, std::string>>* files = nullptr);

/// {"error": {type, field, message, exit_code}}.
Json error_json(const std::string& type, const std::string& field, const std::string& message, int exit_code);

}  // namespace sigmalab::experiment

#endif
