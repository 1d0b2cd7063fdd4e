#include "burstmap/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "burstmap/map_dynamics.hpp"
#include "burstmap/numerics.hpp"
#include "burstmap/parallel.hpp"

namespace burstmap {
namespace {

using Vec3 = std::array<double, 3>;

Vec3 to_vec(const CellState& s) { return {s.x, s.v, s.y}; }
CellState to_state(const Vec3& u) { return {u[0], u[1], u[2]}; }

struct Rhs {
  ModelParams p;

  Vec3 operator()(const Vec3& u) const {
    const double x = u[0], v = u[1], y = u[2];
    const double r2 = x * x + v * v;
    const double g = y + 2.0 * r2 - r2 * r2;  // real radial factor
    return {g * x - p.w * v, g * v + p.w * x, p.epsilon * (p.a - r2 - p.b * y)};
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

Vec3 axpy(const Vec3& u, double h, std::initializer_list<std::pair<double,
          const Vec3*>> terms) {
  Vec3 out = u;
  for (const auto& [coef, k] : terms) {
    for (int i = 0; i < 3; ++i) out[i] += h * coef * (*k)[i];
  }
  return out;
}

// Cubic Hermite interpolant of the state on one accepted step.
struct StepInterpolant {
  double t0, h;
  Vec3 u0, f0, u1, f1;

  Vec3 at(double t) const {
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
      out[i] = h00 * u0[i] + h10 * h * f0[i] + h01 * u1[i] + h11 * h * f1[i];
    }
    return out;
  }

  double radius_at(double t) const {
    const Vec3 u = at(t);
    return std::hypot(u[0], u[1]);
  }

  // Time in [t0, t0 + h] where radius crosses `level`, assuming opposite
  // sides at the ends.
  // Time in [t0, t0 + h] where Re z crosses zero upward.
  double zero_crossing() const {
    double lo = t0, hi = t0 + h;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (at(mid)[0] < 0.0) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }

  double crossing(double level) const {
    double lo = t0, hi = t0 + h;
    const bool rising = radius_at(lo) < level;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      const bool below = radius_at(mid) < level;
      if (below == rising) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }
};

struct Detector {
  EventThresholds thr;
  bool armed = false;
  int spikes = 0;
  TrajectoryRecord* rec = nullptr;
  double last_spike = 0.0;

  void arm(double t, double y) {
    armed = true;
    spikes = 0;
    rec->jump_ups.push_back({t, y});
  }

  void fire(double t) {
    armed = false;
    rec->events.push_back(t);
    rec->spikes_per_burst.push_back(spikes);
    rec->last_spikes.push_back(spikes > 0 ? last_spike : t);
  }

  // Smooth segment described by the interpolant.
  void on_step(const StepInterpolant& seg) {
    const double r0 = std::hypot(seg.u0[0], seg.u0[1]);
    const double r1 = std::hypot(seg.u1[0], seg.u1[1]);
    if (!armed && r1 > thr.upper) {
      const double tc = r0 < thr.upper ? seg.crossing(thr.upper) : seg.t0;
      arm(tc, seg.at(tc)[2]);
    }
    if (armed) {
      if (seg.u0[0] < 0.0 && seg.u1[0] >= 0.0 && r1 > 0.5) {
        ++spikes;
        last_spike = seg.zero_crossing();
      }
      if (r1 < thr.lower) {
        const double tc = r0 >= thr.lower ? seg.crossing(thr.lower) : seg.t0;
        fire(tc);
      }
    }
  }

  // Instantaneous jump of the state at time t.
  void on_impulse(double t, const Vec3& before, const Vec3& after) {
    const double r0 = std::hypot(before[0], before[1]);
    const double r1 = std::hypot(after[0], after[1]);
    if (!armed && r1 > thr.upper) arm(t, after[2]);
    if (armed && r1 < thr.lower && r0 >= thr.lower) fire(t);
  }
};

void record_sample(TrajectoryRecord& rec, double t, const Vec3& u) {
  rec.times.push_back(t);
  rec.z_re.push_back(u[0]);
  rec.z_im.push_back(u[1]);
  rec.y.push_back(u[2]);
}

}  // namespace

double CellState::radius() const { return std::hypot(x, v); }

std::vector<Kick> KickTrain::expand(double duration) const {
  if (!(period > 0.0)) throw std::invalid_argument("kick period must be > 0");
  std::vector<Kick> out;
  for (long n = 0;; ++n) {
    const double t = offset + static_cast<double>(n) * period;
    if (t >= duration) break;
    if (t >= 0.0) out.push_back({t, amplitude});
  }
  return out;
}

std::vector<Kick> noise_kicks(const NoiseConfig& noise, double duration) {
  std::vector<Kick> out;
  if (!noise.active()) return out;
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise.dt));
  for (long i = 1;; ++i) {
    const double t = static_cast<double>(i) * noise.dt;
    if (t >= duration) break;
    out.push_back({t, noise.impulse_scale() * normal(rng)});
  }
  return out;
}

TrajectoryRecord integrate(const ModelParams& params, const CellState& initial,
                           double duration, std::span<const Kick> kicks,
                           const NoiseConfig& noise,
                           const IntegratorOptions& opt) {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
  Vec3 u = to_vec(initial);
  for (double c : u) {
    if (!std::isfinite(c)) throw IntegrationError("non-finite initial state");
  }

  std::vector<Kick> sorted(kicks.begin(), kicks.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Kick& l, const Kick& r) { return l.time < r.time; });
  std::size_t next_kick = 0;
  while (next_kick < sorted.size() && sorted[next_kick].time < 0.0) ++next_kick;

  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise.dt));
  long noise_index = 1;

  const Rhs rhs{params};
  TrajectoryRecord rec;
  Detector det{opt.thresholds, false, 0, &rec, 0.0};

  double t = 0.0;
  double last_sample = 0.0;
  record_sample(rec, t, u);
  Vec3 f = rhs(u);
  double h = std::min(opt.max_step, 1e-3);

  auto check_state = [&](const Vec3& s, double at) {
    const double r = std::hypot(s[0], s[1]);
    if (!std::isfinite(r) || !std::isfinite(s[2])) {
      std::ostringstream msg;
      msg << "integrate: non-finite state at t=" << at;
      throw IntegrationError(msg.str());
    }
    if (r > opt.divergence_radius) {
      std::ostringstream msg;
      msg << "integrate: |z|=" << r << " exceeds " << opt.divergence_radius
          << " at t=" << at;
      throw IntegrationError(msg.str());
    }
  };

  auto stop_requested = [&] {
    return opt.stop_after_events > 0 &&
           static_cast<int>(rec.events.size()) >= opt.stop_after_events;
  };

  while (t < duration && !stop_requested()) {
    double t_next = duration;
    if (next_kick < sorted.size()) t_next = std::min(t_next, sorted[next_kick].time);
    if (noise.active()) {
      t_next = std::min(t_next, static_cast<double>(noise_index) * noise.dt);
    }

    // Smooth flow on [t, t_next].
    while (t < t_next && !stop_requested()) {
      h = std::min(h, opt.max_step);
      bool last = false;
      if (t + h >= t_next - 1e-12 * std::max(1.0, std::fabs(t_next))) {
        h = t_next - t;
        last = true;
      }
      const Vec3& k1 = f;
      const Vec3 k2 = rhs(axpy(u, h, {{a21, &k1}}));
      const Vec3 k3 = rhs(axpy(u, h, {{a31, &k1}, {a32, &k2}}));
      const Vec3 k4 = rhs(axpy(u, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Vec3 k5 =
          rhs(axpy(u, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Vec3 k6 = rhs(axpy(
          u, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      const Vec3 u1 = axpy(
          u, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      const Vec3 k7 = rhs(u1);
      double err = 0.0;
      for (int i = 0; i < 3; ++i) {
        const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                              e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc =
            opt.abs_tol + opt.rel_tol * std::max(std::fabs(u[i]), std::fabs(u1[i]));
        err += (e / sc) * (e / sc);
      }
      err = std::sqrt(err / 3.0);
      if (!std::isfinite(err)) {
        check_state(u1, t + h);
        err = 1e10;
      }
      if (err <= 1.0) {
        const double t1 = last ? t_next : t + h;
        check_state(u1, t1);
        const StepInterpolant seg{t, t1 - t, u, f, u1, k7};
        det.on_step(seg);
        t = t1;
        u = u1;
        f = k7;
        if (opt.sample_interval == 0.0 ||
            (opt.sample_interval > 0.0 && t - last_sample >= opt.sample_interval)) {
          record_sample(rec, t, u);
          last_sample = t;
        }
        const double grow =
            err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        if (!last) h *= grow;
        else h = std::max(h, std::min(opt.max_step, h * grow));
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
        if (h < 1e-14) throw IntegrationError("integrate: step size underflow");
      }
    }
    if (stop_requested() || t >= duration) break;

    // Impulses at t_next.
    const Vec3 before = u;
    bool kicked = false;
    while (next_kick < sorted.size() && sorted[next_kick].time <= t) {
      u[0] += sorted[next_kick].amplitude;
      ++next_kick;
      kicked = true;
    }
    if (noise.active() &&
        static_cast<double>(noise_index) * noise.dt <= t) {
      u[0] += noise.impulse_scale() * normal(rng);
      ++noise_index;
      kicked = true;
    }
    if (kicked) {
      check_state(u, t);
      det.on_impulse(t, before, u);
      f = rhs(u);
    }
  }

  if (rec.times.back() != t) record_sample(rec, t, u);
  rec.final_state = to_state(u);
  rec.final_time = t;
  return rec;
}

TrajectoryRecord integrate(const ModelParams& params, const CellState& initial,
                           double duration, const KickTrain& train,
                           const NoiseConfig& noise,
                           const IntegratorOptions& options) {
  const auto kicks = train.expand(duration);
  return integrate(params, initial, duration, kicks, noise, options);
}

std::vector<double> detect_burst_end(const TrajectoryRecord& tr,
                                     const EventThresholds& thr) {
  std::vector<double> events;
  bool armed = false;
  const std::size_t n = tr.times.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::hypot(tr.z_re[i], tr.z_im[i]);
    if (!armed && r > thr.upper) armed = true;
    if (armed && r < thr.lower && i > 0) {
      const double r0 = std::hypot(tr.z_re[i - 1], tr.z_im[i - 1]);
      double te = tr.times[i];
      if (r0 >= thr.lower && r0 != r) {
        const double frac = (r0 - thr.lower) / (r0 - r);
        te = tr.times[i - 1] + frac * (tr.times[i] - tr.times[i - 1]);
      }
      events.push_back(te);
      armed = false;
    }
  }
  return events;
}

InsufficientEvents::InsufficientEvents(int wanted, int achieved)
    : std::runtime_error("period_stats: wanted " + std::to_string(wanted) +
                         " cycles, achieved " + std::to_string(achieved)),
      achieved_(achieved) {}

PeriodStats period_stats(const ModelParams& params, const NoiseConfig& noise,
                         int n_cycles, int transient,
                         const IntegratorOptions& options) {
  if (n_cycles < 10) throw std::invalid_argument("period_stats: n_cycles >= 10");
  const BurstModel model(params);
  IntegratorOptions opt = options;
  opt.sample_interval = -1.0;
  const int wanted_events = n_cycles + transient + 1;
  opt.stop_after_events = wanted_events;
  const double duration = (wanted_events + 5) * model.geometry().T * 1.5;
  const CellState start{0.5, 0.0, -0.5};
  const auto rec = integrate(params, start, duration, std::span<const Kick>{}, noise, opt);
  const int have = static_cast<int>(rec.events.size()) - transient - 1;
  if (have < n_cycles) throw InsufficientEvents(n_cycles, std::max(have, 0));

  PeriodStats st;
  for (int i = transient; i < transient + n_cycles; ++i) {
    st.intervals.push_back(rec.events[i + 1] - rec.events[i]);
  }
  double sum = 0.0;
  for (double d : st.intervals) sum += d;
  st.mean = sum / n_cycles;
  double var = 0.0;
  for (double d : st.intervals) var += (d - st.mean) * (d - st.mean);
  var /= (n_cycles - 1);
  st.cv = std::sqrt(var) / st.mean;
  // Jump-ups that open the measured cycles.
  for (const auto& j : rec.jump_ups) {
    if (j.time > rec.events[transient] && j.time < rec.events.back()) {
      st.jump_up_values.push_back(j.y);
    }
  }
  st.phase_zero_state = rec.final_state;
  return st;
}

ReferenceCycle reference_cycle(const ModelParams& params,
                               const IntegratorOptions& options) {
  const BurstModel model(params);
  IntegratorOptions opt = options;
  opt.sample_interval = -1.0;
  opt.stop_after_events = 4;
  const CellState start{0.5, 0.0, -0.5};
  const auto warm = integrate(params, start, 10.0 * model.geometry().T, std::span<const Kick>{}, NoiseConfig{}, opt);
  if (warm.events.size() < 4) throw InsufficientEvents(4, static_cast<int>(warm.events.size()));

  ReferenceCycle ref;
  ref.phase_zero = warm.final_state;
  // One more cycle from the phase-zero state gives the period.
  opt.stop_after_events = 1;
  const auto cyc = integrate(params, ref.phase_zero, 3.0 * model.geometry().T, std::span<const Kick>{}, NoiseConfig{}, opt);
  if (cyc.events.empty()) throw InsufficientEvents(1, 0);
  ref.period = cyc.events.front();
  if (!cyc.jump_ups.empty()) {
    ref.silent_time = cyc.jump_ups.front().time;
    ref.jump_up_y = cyc.jump_ups.front().y;
  }
  ref.spikes_per_burst = cyc.spikes_per_burst.front();
  return ref;
}

CellState state_at_phase(const ModelParams& params, const ReferenceCycle& ref,
                         double theta, const NoiseConfig& noise,
                         const IntegratorOptions& options) {
  const double t = wrap_phase(theta) * ref.period;
  if (t <= 0.0) return ref.phase_zero;
  IntegratorOptions opt = options;
  opt.sample_interval = -1.0;
  opt.stop_after_events = 0;
  return integrate(params, ref.phase_zero, t, std::span<const Kick>{}, noise, opt).final_state;
}

PopulationResult simulate_population(const ModelParams& params,
                                     const PopulationConfig& cfg,
                                     const ReferenceCycle& ref,
                                     const IntegratorOptions& options) {
  if (cfg.n_cells < 1) throw std::invalid_argument("population needs n_cells >= 1");
  if (static_cast<int>(cfg.initial_phases.size()) != cfg.n_cells) {
    throw std::invalid_argument("initial_phases must have n_cells entries");
  }
  const std::size_t n = static_cast<std::size_t>(cfg.n_cells);
  PopulationResult res;
  res.period = cfg.period > 0.0 ? cfg.period : ref.period;
  res.raster.resize(n);

  IntegratorOptions opt = options;
  opt.sample_interval = -1.0;
  opt.stop_after_events = 0;

  parallel_for(n, [&](std::size_t i) {
    NoiseConfig prep = cfg.noise;
    prep.seed = derive_seed(cfg.noise.seed, 1, i);
    NoiseConfig run = cfg.noise;
    run.seed = derive_seed(cfg.noise.seed, 2, i);
    const CellState s0 =
        state_at_phase(params, ref, cfg.initial_phases[i], prep, opt);
    IntegratorOptions o = opt;
    const bool keep = static_cast<int>(i) == cfg.record_cell;
    if (keep) o.sample_interval = cfg.record_interval;
    auto rec = integrate(params, s0, cfg.duration, cfg.kicks, run, o);
    res.raster[i] = rec.events;
    if (keep) res.recorded = std::move(rec);
  });

  const double bin = cfg.bin_length > 0.0 ? cfg.bin_length : res.period;
  std::vector<double> phases(n);
  for (double tb = bin; tb <= cfg.duration + 1e-9; tb += bin) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ev = res.raster[i];
      const auto it = std::upper_bound(ev.begin(), ev.end(), tb);
      if (it == ev.begin()) {
        phases[i] = wrap_phase(cfg.initial_phases[i] + tb / res.period);
      } else {
        phases[i] = wrap_phase((tb - *(it - 1)) / res.period);
      }
    }
    res.bin_times.push_back(tb);
    res.w.push_back(synchrony(phases).W);
  }
  const std::size_t win = static_cast<std::size_t>(std::max(1, cfg.w_bar_window));
  for (std::size_t j = 0; j < res.w.size(); ++j) {
    const std::size_t lo = j + 1 >= win ? j + 1 - win : 0;
    double s = 0.0;
    for (std::size_t k = lo; k <= j; ++k) s += res.w[k];
    res.w_bar.push_back(s / static_cast<double>(j - lo + 1));
  }
  return res;
}

}  // namespace burstmap
