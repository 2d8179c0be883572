#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mbpm/classify.hpp"
#include "mbpm/model.hpp"

namespace mbpm {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "mbpm-lab";

// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

struct ExperimentConfig {
  std::string suite;
  std::optional<std::size_t> n;           // horizon (suite default when absent)
  std::optional<std::size_t> replicates;  // replicates, or one-step samples for "moments"
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::optional<State> state;             // evaluation state for "moments"
  std::map<std::string, double> thresholds;
  std::vector<double> probe_magnitudes;
  double dt = 1e-3;
  double time = 1.0;
  std::string timestamp;                  // report header; current UTC time when empty
};

// Keys: suite, n, replicates, seed, workers, state, thresholds,
// probe_magnitudes, dt, time, timestamp. Throws SpecError naming the field.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc);

struct Artifact {
  std::string name;
  std::string content;
};

struct Report {
  nlohmann::json doc;
  bool passed = false;
  std::vector<Artifact> artifacts;

  std::string dump() const;
  // Writes report.json and the artifacts into dir (created if missing).
  void write(const std::string& dir) const;
};

// Runs one suite. Throws InfeasibleError when the suite does not apply to the
// model, ArgumentError for bad configuration.
Report run_suite(const ModelSpec& spec, const ExperimentConfig& config);

nlohmann::json to_json(const GrowthVerdict& g);

}  // namespace mbpm
