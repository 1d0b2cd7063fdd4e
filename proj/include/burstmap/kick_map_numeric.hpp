#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "burstmap/integrator.hpp"
#include "burstmap/kick_map.hpp"

namespace burstmap {

struct MapSample {
  double theta_in = 0.0;
  double theta_out = 0.0;
  double dispersion = 0.0;  // circular standard deviation over realizations
  int n_realizations = 0;
  bool valid = true;
  std::string reason;
};

// Which instant of a burst marks phase zero in extracted maps.
enum class PhaseMarker {
  LastSpike,  // last upward zero crossing of Re z: spike-count plateaus appear
  BurstEnd,   // the |z| hysteresis event: continuous in the kick phase
};

struct ExtractOptions {
  int n_realizations = 1;
  // The output phase is read at the n-th post-kick burst.
  int relax_bursts = 2;
  PhaseMarker marker = PhaseMarker::LastSpike;
  // Time unit of phases; <= 0 measures it (mean noisy period with noise,
  // else the reference cycle period).
  double period = 0.0;
  std::uint64_t seed = 0;  // master seed; realizations use substreams
  int threads = 0;
  IntegratorOptions integrator;
};

// Kicks a cell prepared at each phase of `theta_grid` and compares its
// burst timing with a co-simulated unkicked cell sharing the same noise.
std::vector<MapSample> extract_map(const ModelParams& params, double A,
                                   std::span<const double> theta_grid,
                                   const NoiseConfig& noise = {},
                                   const ExtractOptions& options = {});

// n uniform points, with the points in [0, refine_hi) refined `refine`
// times. Sorted, within [0, 1).
std::vector<double> default_theta_grid(double refine_hi, int n = 200, int refine = 4);

struct Plateau {
  double lo = 0.0;
  double hi = 0.0;  // theta_in of the first and last sample of the run
  int samples = 0;
};

// Maximal runs of consecutive valid samples in [lo, hi) whose outputs differ
// by less than `tol` and are flat relative to the grid spacing (|dF/dtheta|
// below `max_slope`). Needs at least 400 samples in the window.
std::vector<Plateau> plateaus(std::span<const MapSample> samples, double lo,
                              double hi, double tol = 1e-3, double max_slope = 0.1);
int plateau_census(std::span<const MapSample> samples, double lo, double hi);
double plateau_arc_length(std::span<const Plateau> runs);

struct MapAgreement {
  int compared = 0;
  int within = 0;
  int excluded = 0;  // samples inside excluded plateau runs, or invalid
  double fraction() const { return compared ? static_cast<double>(within) / compared : 0.0; }
};

// Counts valid samples whose output lies within `tol` (on the circle) of
// map(theta_in). Samples inside any of `exclude` are skipped.
MapAgreement compare_map(const KickMap& map, std::span<const MapSample> samples,
                         double tol, std::span<const Plateau> exclude = {});

// Circular mean and circular standard deviation of phases.
void circular_stats(std::span<const double> phases, double* mean, double* sd);

}  // namespace burstmap
