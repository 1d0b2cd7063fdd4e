#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "burstmap/integrator.hpp"
#include "burstmap/kick_map.hpp"
#include "burstmap/model.hpp"

namespace burstmap {

struct SequenceKick {
  double amplitude = 0.0;
  double tau = 0.0;  // delay to the next kick, in burst periods
};
using KickSequence = std::vector<SequenceKick>;

class CompositionInvalid : public std::invalid_argument {
 public:
  CompositionInvalid(const std::string& what, double lo, double hi)
      : std::invalid_argument(what), lo(lo), hi(hi) {}
  double lo;  // offending theta interval of the kick that was checked
  double hi;
};

// outer o inner as a single map. The partition holds the inner borders and
// every preimage of an outer border or of the wrap point.
KickMap compose(const KickMap& inner, const KickMap& outer);

// Phases at which a kick of amplitude A leaves the cell silent for longer
// than `tau` burst periods. Empty when the kick is valid on the whole circle.
std::vector<std::pair<double, double>> invalid_intervals(double A, double tau,
                                                         const BurstModel& model);

// F_{A_n, tau_n} o ... o F_{A_1, tau_1}. Every kick but the last must let
// the cell reach spiking before the next kick arrives.
KickMap compose_sequence(const KickSequence& seq, const BurstModel& model);

// F_{A2, tau1 - tau2} o F_{A1, tau2}.
KickMap doublet_map(double A1, double tau1, double A2, double tau2,
                    const BurstModel& model);

struct DbsOptions {
  int n_cells = 20;
  double strong_amplitude = 1.5;
  double strong_period = 1.4;  // in reference periods
  double weak_amplitude = 0.5;
  double weak_delay = 0.375;   // after each strong kick, in reference periods
  double w_threshold = 0.9;
  int max_sync_kicks = 50;
  int weak_kicks = 20;         // strong periods simulated after switch-on
  int w_bar_window = 5;        // strong periods per W-bar average
  NoiseConfig noise;
  std::uint64_t seed = 0;
  IntegratorOptions integrator;
};

struct DbsResult {
  std::vector<std::vector<double>> raster;
  // W at each strong kick (just before it) and its running average.
  std::vector<double> kick_times;
  std::vector<double> w;
  std::vector<double> w_bar;
  int switch_on_kick = -1;  // index into kick_times of the first weak kick period
  double switch_on_time = 0.0;
  double min_w_bar_after = 1.0;
  double period = 0.0;
};

// Strong train until W-bar exceeds the threshold, then strong plus weak.
// Initial phases are uniform (desynchronized). Throws NumericError when the
// strong train does not synchronize within max_sync_kicks.
DbsResult dbs_demo(const ModelParams& params, const DbsOptions& options = {});

}  // namespace burstmap
