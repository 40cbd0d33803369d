#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cpsys {

// One reproducible theorem-verification run. Every experiment writes
// <out_dir>/<name>.csv (UTF-8, header row, deterministic formatting) and a
// JSON sidecar <name>.json with the config, summary values and content hash.
struct ExperimentConfig {
  std::string name;
  int n = 2;
  int degree = 2;
  uint64_t seed = 1;
  std::string mode = "exact";  // "exact" or "float"
  std::vector<double> t_values = {1e-2, 5e-3, 2.5e-3};
  int sigma_samples = 200;
  std::string out_dir = ".";
};

const std::vector<std::string>& experiment_names();

// Returns 0 when all thresholds pass, 2 when a threshold is violated.
// Errors surface as exceptions (the CLI maps them to exit code 1).
int run_experiment(const ExperimentConfig& cfg);

std::string config_canonical_string(const ExperimentConfig& cfg);

}  // namespace cpsys
