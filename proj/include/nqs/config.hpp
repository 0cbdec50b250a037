#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nqs/optimizer.hpp"
#include "nqs/supervised.hpp"

namespace nqs {

struct AnnealSpec {
  std::vector<std::vector<double>> path;
  unsigned epochs_per_step = 200;
  std::string start_checkpoint;  // empty: train at path.front() first
};

struct SweepSpec {
  std::string parameter;
  std::vector<double> values;
};

struct ExperimentConfig {
  TrainingRun run;
  std::string out_dir;
  std::optional<SweepSpec> sweep;
  std::optional<AnnealSpec> anneal;
  unsigned instances = 12;
  unsigned threads = 0;  // 0: hardware concurrency
};

// Strict parsers: unknown keys are rejected (ConfigError), every run must
// carry an explicit seed. A manifest document (object with a "config" key)
// is unwrapped transparently so any run can be reproduced from its manifest.
ExperimentConfig parse_experiment_config(const nlohmann::json&);
ExperimentConfig load_experiment_config(const std::string& path);
nlohmann::json experiment_config_to_json(const ExperimentConfig&);

// Index of the named sweep parameter in the model parameter vector.
std::size_t sweep_parameter_index(const std::string& model_name,
                                  std::size_t arity,
                                  const std::string& parameter);

struct SupervisedConfig {
  SupervisedRun run;
  std::string out_dir;
  unsigned threads = 0;
};

SupervisedConfig parse_supervised_config(const nlohmann::json&);
SupervisedConfig load_supervised_config(const std::string& path);
nlohmann::json supervised_config_to_json(const SupervisedConfig&);

}  // namespace nqs
