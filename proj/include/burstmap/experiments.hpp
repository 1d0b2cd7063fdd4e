#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "burstmap/config.hpp"
#include "burstmap/integrator.hpp"

namespace burstmap {

#ifndef BURSTMAP_VERSION
#define BURSTMAP_VERSION "0.0.0"
#endif
inline constexpr const char* kToolVersion = BURSTMAP_VERSION;

// A common periodic kick train applied to uncoupled cells after a few free
// cycles. Kicks arrive every (1 + tau) periods.
struct KickedPopulationOptions {
  int n_cells = 30;
  double amplitude = 0.5;
  double tau = 0.1;
  int n_kicks = 40;
  // > 0: initial phases drawn uniformly from [0, cluster_width); otherwise
  // evenly spread over the circle.
  double cluster_width = 0.02;
  int pre_cycles = 3;
  int w_bar_window = 10;
  int record_cell = -1;  // >= 0: keep that cell's trajectory, sampled every time unit
  NoiseConfig noise;
  std::uint64_t seed = 0;
  IntegratorOptions integrator;
};

struct KickedPopulation {
  PopulationResult result;
  std::vector<double> initial_phases;
  double period = 0.0;  // measured mean period under noise, else reference
};

KickedPopulation kicked_population(const ModelParams& params,
                                   const KickedPopulationOptions& options = {});

struct Artifact {
  std::string name;
  std::string content;
};

struct ExperimentOutput {
  std::vector<Artifact> artifacts;
  json summary = json::object();
  json resolved_options = json::object();
};

const std::vector<std::string>& experiment_names();

// Runs the experiment in memory. Throws ConfigError for bad options and
// module errors otherwise.
ExperimentOutput run_experiment(const RunConfig& config);

// Run manifest; `output` may be null when the run failed.
json make_manifest(const RunConfig& config, const ExperimentOutput* output,
                   const std::string& error);

// Runs, writes artifacts and manifest.json into config.out, returns the
// process exit status (0 ok, 2 config error, 1 other failure).
int run(const RunConfig& config, std::ostream& log);

}  // namespace burstmap
