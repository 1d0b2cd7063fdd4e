#include "burstmap/composition.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "burstmap/map_dynamics.hpp"
#include "burstmap/numerics.hpp"

namespace burstmap {
namespace {

constexpr double kMinPiece = 1e-14;

KickMap identity_map() {
  MapBranch b{0.0, 1.0, BranchKind::Identity, [](double t) { return t; },
              [](double) { return 1.0; }};
  return KickMap({b});
}

KickMap primitive(double A, const BurstModel& model) {
  if (A < 0.0) throw std::invalid_argument("kick amplitude must be >= 0");
  return A == 0.0 ? identity_map() : build_kick_map(A, model);
}

}  // namespace

KickMap compose(const KickMap& inner, const KickMap& outer) {
  auto in = std::make_shared<const KickMap>(inner);
  auto out = std::make_shared<const KickMap>(outer);
  std::vector<double> levels{0.0};
  for (double b : outer.borders()) levels.push_back(b);

  const auto value = [in, out](double th) {
    const double g = in->lift(th);
    return out->lift(wrap_phase(g)) + std::floor(g);
  };
  const auto slope = [in, out](double th) {
    return out->derivative(wrap_phase(in->lift(th))) * in->derivative(th);
  };

  std::vector<MapBranch> pieces;
  for (const auto& b : inner.branches()) {
    const auto g = [&](double th) { return b.value(th) + inner.shift(); };
    const double g_lo = g(b.lo), g_hi = g(b.hi);
    const double lo = std::min(g_lo, g_hi), hi = std::max(g_lo, g_hi);
    std::vector<double> cuts;
    for (double c : levels) {
      for (double k = std::ceil(lo - c); c + k < hi; k += 1.0) {
        const double level = c + k;
        if (!(level > lo)) continue;
        const double th = brent_root([&](double t) { return g(t) - level; }, b.lo, b.hi);
        if (th - b.lo > kMinPiece && b.hi - th > kMinPiece) cuts.push_back(th);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    double left = b.lo;
    cuts.push_back(b.hi);
    for (double c : cuts) {
      if (c - left <= kMinPiece && c != b.hi) continue;
      pieces.push_back({left, c, BranchKind::Composite, value, slope});
      left = c;
    }
  }
  return KickMap(std::move(pieces));
}

std::vector<std::pair<double, double>> invalid_intervals(double A, double tau,
                                                         const BurstModel& model) {
  std::vector<std::pair<double, double>> bad;
  if (A <= 0.0) return bad;
  const double tw = theta_w(A, model);
  if (tw <= 0.0) return bad;
  const double T = model.geometry().T;
  // Silent time after the kick, in periods, minus the delay to the next kick.
  const auto excess = [&](double th) {
    const double y = model.h_S(th * T);
    return (model.h_S_inv(model.jump_up(y)) - th * T) / T - tau;
  };
  const int n = 2000;
  const auto edge = [&](double a, double b) {
    return brent_root(excess, a, b);
  };
  double start = excess(0.0) >= 0.0 ? 0.0 : -1.0;
  double prev_x = 0.0, prev_f = excess(0.0);
  for (int k = 1; k <= n; ++k) {
    const double x = k == n ? tw * (1.0 - 1e-12) : tw * k / n;
    const double f = excess(x);
    if (prev_f < 0.0 && f >= 0.0) start = edge(prev_x, x);
    if (prev_f >= 0.0 && f < 0.0 && start >= 0.0) {
      bad.emplace_back(start, edge(prev_x, x));
      start = -1.0;
    }
    prev_x = x;
    prev_f = f;
  }
  if (start >= 0.0) bad.emplace_back(start, tw);
  return bad;
}

KickMap compose_sequence(const KickSequence& seq, const BurstModel& model) {
  if (seq.empty()) throw std::invalid_argument("kick sequence is empty");
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (!(seq[n].tau > 0.0)) {
      std::ostringstream msg;
      msg << "kick " << n << ": tau must be > 0, got " << seq[n].tau;
      throw std::invalid_argument(msg.str());
    }
    if (n + 1 == seq.size()) break;
    const auto bad = invalid_intervals(seq[n].amplitude, seq[n].tau, model);
    if (!bad.empty()) {
      std::ostringstream msg;
      msg << "kick " << n << " (A=" << seq[n].amplitude << ", tau=" << seq[n].tau
          << ") does not reach spiking before the next kick for theta in ["
          << bad.front().first << ", " << bad.front().second << ")";
      throw CompositionInvalid(msg.str(), bad.front().first, bad.front().second);
    }
  }
  KickMap acc = primitive(seq[0].amplitude, model).shifted(seq[0].tau);
  for (std::size_t n = 1; n < seq.size(); ++n) {
    acc = compose(acc, primitive(seq[n].amplitude, model).shifted(seq[n].tau));
  }
  return acc;
}

KickMap doublet_map(double A1, double tau1, double A2, double tau2,
                    const BurstModel& model) {
  if (!(tau2 > 0.0 && tau2 < tau1)) {
    throw std::invalid_argument("doublet needs 0 < tau2 < tau1");
  }
  return compose_sequence({{A1, tau2}, {A2, tau1 - tau2}}, model);
}

DbsResult dbs_demo(const ModelParams& params, const DbsOptions& opt) {
  if (opt.n_cells < 2) throw std::invalid_argument("dbs_demo needs n_cells >= 2");
  if (opt.max_sync_kicks < 1 || opt.weak_kicks < 1) {
    throw std::invalid_argument("dbs_demo kick counts must be positive");
  }
  IntegratorOptions io = opt.integrator;
  const ReferenceCycle ref = reference_cycle(params, io);
  const double T = ref.period;
  const double P = opt.strong_period * T;

  PopulationConfig cfg;
  cfg.n_cells = opt.n_cells;
  cfg.initial_phases = uniform_phases(opt.n_cells);
  cfg.noise = opt.noise;
  cfg.noise.seed = opt.seed;
  cfg.bin_length = P;
  cfg.w_bar_window = opt.w_bar_window;

  const auto run = [&](int n_strong, int weak_from) {
    cfg.kicks.clear();
    for (int j = 0; j < n_strong; ++j) {
      cfg.kicks.push_back({j * P, opt.strong_amplitude});
      if (j >= weak_from) cfg.kicks.push_back({j * P + opt.weak_delay * T, opt.weak_amplitude});
    }
    cfg.duration = n_strong * P;
    return simulate_population(params, cfg, ref, io);
  };

  // Bin j ends at strong kick j + 1, so a window is judged before that kick.
  const PopulationResult sync = run(opt.max_sync_kicks, opt.max_sync_kicks);
  int reached = -1;
  for (std::size_t j = static_cast<std::size_t>(opt.w_bar_window) - 1; j < sync.w_bar.size(); ++j) {
    if (sync.w_bar[j] > opt.w_threshold) {
      reached = static_cast<int>(j);
      break;
    }
  }
  if (reached < 0) {
    std::ostringstream msg;
    msg << "dbs_demo: strong train did not raise W-bar above " << opt.w_threshold
        << " within " << opt.max_sync_kicks << " kicks (max "
        << *std::max_element(sync.w_bar.begin(), sync.w_bar.end()) << ")";
    throw NumericError(msg.str());
  }
  const int first_weak = reached + 1;
  const PopulationResult full = run(first_weak + opt.weak_kicks, first_weak);

  DbsResult res;
  res.raster = full.raster;
  res.kick_times = full.bin_times;
  res.w = full.w;
  res.w_bar = full.w_bar;
  res.switch_on_kick = first_weak;
  res.switch_on_time = first_weak * P;
  res.period = T;
  for (std::size_t j = static_cast<std::size_t>(first_weak); j < full.w_bar.size(); ++j) {
    res.min_w_bar_after = std::min(res.min_w_bar_after, full.w_bar[j]);
  }
  return res;
}

}  // namespace burstmap
