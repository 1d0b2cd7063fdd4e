#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "burstmap/model.hpp"

namespace burstmap {

// Fast variable z = x + i v and slow variable y.
struct CellState {
  double x = 0.0;
  double v = 0.0;
  double y = 0.0;

  double radius() const;
};

// An instantaneous translation of Re z by `amplitude` at `time`.
struct Kick {
  double time = 0.0;
  double amplitude = 0.0;
};

// Periodic kicks at offset, offset + period, ...
struct KickTrain {
  double amplitude = 0.0;
  double period = 1.0;
  double offset = 0.0;

  // Kick times that fall in [0, duration).
  std::vector<Kick> expand(double duration) const;
};

// How a noise sample xi_i ~ N(0, sqrt(dt)) moves Re z at t = i * dt.
enum class NoiseForm {
  // Displacement eta * xi_i: a delta train, white noise of intensity eta.
  Impulse,
  // Displacement eta * xi_i * dt: the sample acts as a forcing held over one
  // grid step, white noise of intensity eta * dt. Reproduces the published
  // noisy period statistics; see README.
  HeldForcing,
};

// Discrete noise kicks at times i * dt (i >= 1) with i.i.d. normal samples
// of standard deviation sqrt(dt), acting on Re z only.
struct NoiseConfig {
  double eta = 0.0;
  double dt = 0.05;
  std::uint64_t seed = 0;
  NoiseForm form = NoiseForm::HeldForcing;

  bool active() const { return eta > 0.0; }
  // Re z displacement per unit sample.
  double impulse_scale() const {
    return form == NoiseForm::HeldForcing ? eta * dt : eta;
  }
  // Intensity of the white noise the kick train approximates.
  double white_noise_intensity() const { return impulse_scale(); }
};

struct EventThresholds {
  double upper = 1.0;  // |z| must exceed this to arm the detector
  double lower = 0.2;  // a burst ends when |z| then falls below this
};

struct IntegratorOptions {
  double abs_tol = 1e-6;
  double rel_tol = 1e-6;
  double max_step = 0.05;
  double divergence_radius = 100.0;
  // 0 records every accepted step, > 0 records at most once per interval,
  // < 0 records nothing but the endpoints.
  double sample_interval = 0.0;
  EventThresholds thresholds;
  // Stop as soon as this many burst-termination events were seen (0: never).
  int stop_after_events = 0;
};

// Moment the detector armed (|z| crossed `upper` upward) in a burst.
struct JumpUp {
  double time = 0.0;
  double y = 0.0;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<double> z_re;
  std::vector<double> z_im;
  std::vector<double> y;
  // Burst-termination times (phase-zero crossings).
  std::vector<double> events;
  std::vector<JumpUp> jump_ups;
  // Upward zero crossings of Re z between a jump-up and the matching event.
  std::vector<int> spikes_per_burst;
  // Time of the last such crossing in each burst (the event time if none).
  std::vector<double> last_spikes;
  CellState final_state;
  double final_time = 0.0;
};

class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Integrates the kicked (and optionally noisy) normal form from t = 0 for
// `duration`. Kicks need not be sorted. Impulses are applied exactly between
// adaptive Dormand-Prince 5(4) segments.
TrajectoryRecord integrate(const ModelParams& params, const CellState& initial,
                           double duration, std::span<const Kick> kicks,
                           const NoiseConfig& noise = {},
                           const IntegratorOptions& options = {});

TrajectoryRecord integrate(const ModelParams& params, const CellState& initial,
                           double duration, const KickTrain& train,
                           const NoiseConfig& noise = {},
                           const IntegratorOptions& options = {});

// Post-hoc event detection on recorded samples, using the same hysteresis
// pair and linear interpolation of |z| between samples.
std::vector<double> detect_burst_end(const TrajectoryRecord& trajectory,
                                     const EventThresholds& thresholds = {});

// The noise impulses the integrator applies for `noise` over [0, duration).
std::vector<Kick> noise_kicks(const NoiseConfig& noise, double duration);

struct PeriodStats {
  double mean = 0.0;
  double cv = 0.0;
  std::vector<double> intervals;
  std::vector<double> jump_up_values;
  CellState phase_zero_state;  // state at the last recorded event
};

class InsufficientEvents : public std::runtime_error {
 public:
  InsufficientEvents(int wanted, int achieved);
  int achieved() const { return achieved_; }

 private:
  int achieved_;
};

// Mean and coefficient of variation of n_cycles inter-event intervals,
// after discarding `transient` initial cycles.
PeriodStats period_stats(const ModelParams& params, const NoiseConfig& noise,
                         int n_cycles = 150, int transient = 2,
                         const IntegratorOptions& options = {});

// A state sitting on the noise-free burst cycle right at a termination
// event, together with the measured period.
struct ReferenceCycle {
  CellState phase_zero;
  double period = 0.0;
  double silent_time = 0.0;  // event to next jump-up
  double jump_up_y = 0.0;
  int spikes_per_burst = 0;
};
ReferenceCycle reference_cycle(const ModelParams& params,
                               const IntegratorOptions& options = {});

// State of a cell prepared at phase `theta` by running from the phase-zero
// state for theta * period.
CellState state_at_phase(const ModelParams& params, const ReferenceCycle& ref,
                         double theta, const NoiseConfig& noise = {},
                         const IntegratorOptions& options = {});

struct PopulationConfig {
  int n_cells = 30;
  std::vector<double> initial_phases;  // size n_cells
  std::vector<Kick> kicks;
  NoiseConfig noise;       // seed is the master seed; cells get substreams
  double duration = 0.0;
  double period = 0.0;      // phase unit; 0: the reference period
  double bin_length = 0.0;  // 0: the phase unit
  int w_bar_window = 10;    // bins averaged into the W-bar trace
  int record_cell = -1;     // >= 0: keep that cell's sampled trajectory
  double record_interval = 1.0;
};

struct PopulationResult {
  std::vector<std::vector<double>> raster;  // per-cell event times
  std::vector<double> bin_times;
  std::vector<double> w;      // instantaneous W per bin
  std::vector<double> w_bar;  // windowed average of w
  double period = 0.0;
  TrajectoryRecord recorded;  // empty unless record_cell was set
};

// Simulates uncoupled cells receiving common kicks. Phases for the synchrony
// trace are the elapsed time since each cell's last event over the period.
PopulationResult simulate_population(const ModelParams& params,
                                     const PopulationConfig& config,
                                     const ReferenceCycle& ref,
                                     const IntegratorOptions& options = {});

}  // namespace burstmap
