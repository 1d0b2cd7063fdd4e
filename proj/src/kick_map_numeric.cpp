#include "burstmap/kick_map_numeric.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "burstmap/numerics.hpp"
#include "burstmap/parallel.hpp"

namespace burstmap {

void circular_stats(std::span<const double> phases, double* mean, double* sd) {
  std::complex<double> s{0.0, 0.0};
  for (double p : phases) s += std::polar(1.0, 2.0 * std::numbers::pi * p);
  s /= static_cast<double>(phases.size());
  const double r = std::min(1.0, std::abs(s));
  if (mean) *mean = wrap_phase(std::arg(s) / (2.0 * std::numbers::pi));
  if (sd) *sd = r > 0.0 ? std::sqrt(-2.0 * std::log(r)) / (2.0 * std::numbers::pi) : 1.0;
}

std::vector<MapSample> extract_map(const ModelParams& params, double A,
                                   std::span<const double> theta_grid,
                                   const NoiseConfig& noise,
                                   const ExtractOptions& opt) {
  if (opt.relax_bursts < 1) throw std::invalid_argument("relax_bursts must be >= 1");
  const int n_real = std::max(1, noise.active() ? opt.n_realizations : 1);
  IntegratorOptions io = opt.integrator;
  io.sample_interval = -1.0;

  const ReferenceCycle ref = reference_cycle(params, io);
  double T = opt.period;
  if (!(T > 0.0)) {
    if (noise.active()) {
      NoiseConfig nc = noise;
      nc.seed = derive_seed(opt.seed, 100, 0);
      T = period_stats(params, nc, 150, 2, io).mean;
    } else {
      T = ref.period;
    }
  }
  const double horizon = (opt.relax_bursts + 2) * T;

  const std::size_t n = theta_grid.size();
  const std::size_t jobs = n * static_cast<std::size_t>(n_real);
  std::vector<double> outs(jobs, 0.0);
  std::vector<std::string> errors(jobs);

  parallel_for(jobs, [&](std::size_t job) {
    const std::size_t i = job / static_cast<std::size_t>(n_real);
    const std::size_t r = job % static_cast<std::size_t>(n_real);
    const double theta = wrap_phase(theta_grid[i]);
    NoiseConfig prep = noise, run = noise;
    prep.seed = derive_seed(opt.seed, 2 * r, i);
    run.seed = derive_seed(opt.seed, 2 * r + 1, i);

    IntegratorOptions o = io;
    CellState s = ref.phase_zero;
    if (theta * T > 0.0) {
      o.stop_after_events = 0;
      s = integrate(params, ref.phase_zero, theta * T, std::span<const Kick>{}, prep, o)
              .final_state;
    }
    const Kick kick{0.0, A};
    o.stop_after_events = opt.relax_bursts;
    const auto kicked = integrate(params, s, horizon, std::span<const Kick>(&kick, 1), run, o);
    o.stop_after_events = opt.relax_bursts + 1;
    const auto unkicked = integrate(params, s, horizon, std::span<const Kick>{}, run, o);

    const auto& km = opt.marker == PhaseMarker::LastSpike ? kicked.last_spikes : kicked.events;
    const auto& um = opt.marker == PhaseMarker::LastSpike ? unkicked.last_spikes : unkicked.events;
    if (static_cast<int>(km.size()) < opt.relax_bursts || um.empty()) {
      errors[job] = "fewer than " + std::to_string(opt.relax_bursts) +
                    " post-kick burst ends detected";
      return;
    }
    const double tk = km[static_cast<std::size_t>(opt.relax_bursts) - 1];
    double best = um.front();
    for (double t : um) {
      if (std::fabs(t - tk) < std::fabs(best - tk)) best = t;
    }
    outs[job] = wrap_phase(theta + (best - tk) / T);
  }, opt.threads);

  std::vector<MapSample> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    MapSample& m = samples[i];
    m.theta_in = wrap_phase(theta_grid[i]);
    std::vector<double> ok;
    for (int r = 0; r < n_real; ++r) {
      const std::size_t job = i * static_cast<std::size_t>(n_real) + r;
      if (errors[job].empty()) ok.push_back(outs[job]);
      else m.reason = errors[job];
    }
    m.n_realizations = static_cast<int>(ok.size());
    if (ok.empty()) {
      m.valid = false;
      continue;
    }
    circular_stats(ok, &m.theta_out, &m.dispersion);
    if (ok.size() == 1) m.dispersion = 0.0;
  }
  return samples;
}

std::vector<double> default_theta_grid(double refine_hi, int n, int refine) {
  if (n < 1 || refine < 1) throw std::invalid_argument("grid sizes must be positive");
  std::vector<double> out;
  const double h = 1.0 / n;
  for (int j = 0; j < n; ++j) {
    const double lo = j * h;
    const int sub = lo < refine_hi ? refine : 1;
    for (int k = 0; k < sub; ++k) out.push_back(lo + h * (k + 0.5) / sub);
  }
  return out;
}

std::vector<Plateau> plateaus(std::span<const MapSample> samples, double lo,
                              double hi, double tol, double max_slope) {
  std::vector<const MapSample*> win;
  for (const auto& s : samples) {
    if (s.valid && s.theta_in >= lo && s.theta_in < hi) win.push_back(&s);
  }
  if (win.size() < 400) {
    throw std::invalid_argument("plateau census needs >= 400 samples in the window, got " +
                                std::to_string(win.size()));
  }
  std::sort(win.begin(), win.end(),
            [](const MapSample* a, const MapSample* b) { return a->theta_in < b->theta_in; });
  std::vector<Plateau> runs;
  Plateau cur{win[0]->theta_in, win[0]->theta_in, 1};
  const auto flush = [&] {
    if (cur.samples >= 2) runs.push_back(cur);
  };
  for (std::size_t j = 1; j < win.size(); ++j) {
    const double dout = circular_distance(win[j]->theta_out, win[j - 1]->theta_out);
    const double din = win[j]->theta_in - win[j - 1]->theta_in;
    if (dout < tol && dout <= max_slope * din) {
      cur.hi = win[j]->theta_in;
      ++cur.samples;
    } else {
      flush();
      cur = {win[j]->theta_in, win[j]->theta_in, 1};
    }
  }
  flush();
  return runs;
}

int plateau_census(std::span<const MapSample> samples, double lo, double hi) {
  return static_cast<int>(plateaus(samples, lo, hi).size());
}

double plateau_arc_length(std::span<const Plateau> runs) {
  double s = 0.0;
  for (const auto& p : runs) s += p.hi - p.lo;
  return s;
}

MapAgreement compare_map(const KickMap& map, std::span<const MapSample> samples,
                         double tol, std::span<const Plateau> exclude) {
  MapAgreement a;
  for (const auto& s : samples) {
    const bool skip = !s.valid || std::any_of(exclude.begin(), exclude.end(), [&](const Plateau& p) {
      return s.theta_in >= p.lo && s.theta_in <= p.hi;
    });
    if (skip) {
      ++a.excluded;
      continue;
    }
    ++a.compared;
    if (circular_distance(map(s.theta_in), s.theta_out) <= tol) ++a.within;
  }
  return a;
}

}  // namespace burstmap
