#include "burstmap/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <random>

#include "burstmap/composition.hpp"
#include "burstmap/io.hpp"
#include "burstmap/kick_map.hpp"
#include "burstmap/kick_map_numeric.hpp"
#include "burstmap/map_dynamics.hpp"
#include "burstmap/numerics.hpp"
#include "burstmap/parallel.hpp"
#include "burstmap/stochastic.hpp"
#include "burstmap/svg.hpp"

namespace burstmap {

KickedPopulation kicked_population(const ModelParams& params,
                                   const KickedPopulationOptions& opt) {
  if (opt.n_cells < 1 || opt.n_kicks < 1) {
    throw std::invalid_argument("kicked_population needs cells and kicks");
  }
  const ReferenceCycle ref = reference_cycle(params, opt.integrator);
  KickedPopulation out;
  out.period = ref.period;
  if (opt.noise.active()) {
    NoiseConfig nc = opt.noise;
    nc.seed = derive_seed(opt.seed, 10, 0);
    out.period = period_stats(params, nc, 150, 2, opt.integrator).mean;
  }
  const double T = out.period;

  if (opt.cluster_width > 0.0) {
    std::mt19937_64 rng(derive_seed(opt.seed, 11, 0));
    std::uniform_real_distribution<double> u(0.0, opt.cluster_width);
    for (int i = 0; i < opt.n_cells; ++i) out.initial_phases.push_back(u(rng));
  } else {
    out.initial_phases = uniform_phases(opt.n_cells);
  }

  PopulationConfig cfg;
  cfg.n_cells = opt.n_cells;
  cfg.initial_phases = out.initial_phases;
  cfg.noise = opt.noise;
  cfg.noise.seed = derive_seed(opt.seed, 12, 0);
  cfg.period = T;
  cfg.w_bar_window = opt.w_bar_window;
  cfg.record_cell = opt.record_cell;
  const double start = opt.pre_cycles * T, gap = (1.0 + opt.tau) * T;
  for (int j = 0; j < opt.n_kicks; ++j) cfg.kicks.push_back({start + j * gap, opt.amplitude});
  cfg.duration = start + opt.n_kicks * gap;
  out.result = simulate_population(params, cfg, ref, opt.integrator);
  return out;
}

namespace {

// Experiment options: defaults merged with user values; unknown keys and
// type mismatches are configuration errors.
class Options {
 public:
  Options(const json& user, json defaults) : j_(std::move(defaults)) {
    for (const auto& [k, v] : user.items()) {
      if (!j_.contains(k)) throw ConfigError("unknown option '" + k + "'");
      if (j_[k].is_number() != v.is_number() || j_[k].is_array() != v.is_array() ||
          j_[k].is_boolean() != v.is_boolean() || j_[k].is_string() != v.is_string()) {
        throw ConfigError("option '" + k + "' has the wrong type");
      }
      j_[k] = v;
    }
  }
  double num(const char* k) const { return j_.at(k).get<double>(); }
  int integer(const char* k) const {
    const double v = num(k);
    if (v != std::floor(v)) throw ConfigError(std::string("option '") + k + "' must be an integer");
    return static_cast<int>(v);
  }
  int positive(const char* k) const {
    const int v = integer(k);
    if (v < 1) throw ConfigError(std::string("option '") + k + "' must be >= 1");
    return v;
  }
  bool flag(const char* k) const { return j_.at(k).get<bool>(); }
  std::string str(const char* k) const { return j_.at(k).get<std::string>(); }
  std::vector<double> list(const char* k) const {
    auto v = j_.at(k).get<std::vector<double>>();
    if (v.empty()) throw ConfigError(std::string("option '") + k + "' must not be empty");
    return v;
  }
  const json& resolved() const { return j_; }

 private:
  json j_;
};

NoiseConfig noise_from(const Options& o, std::uint64_t seed) {
  NoiseConfig n;
  n.eta = o.num("eta");
  if (n.eta < 0.0) throw ConfigError("option 'eta' must be >= 0");
  n.dt = o.num("noise_dt");
  if (!(n.dt > 0.0)) throw ConfigError("option 'noise_dt' must be > 0");
  const std::string form = o.str("noise_form");
  if (form == "held") n.form = NoiseForm::HeldForcing;
  else if (form == "impulse") n.form = NoiseForm::Impulse;
  else throw ConfigError("option 'noise_form' must be 'held' or 'impulse'");
  n.seed = seed;
  return n;
}

json with_noise(json d) {
  d["eta"] = 0.0;
  d["noise_dt"] = 0.05;
  d["noise_form"] = "held";
  return d;
}

// Breaks for plotting a reduced circle map sampled at `xs`: declared
// discontinuities plus the places where the lift crosses an integer.
std::vector<double> plot_breaks(const KickMap& map, const std::vector<double>& xs,
                                const std::vector<double>& ys) {
  std::vector<double> br = map.discontinuities();
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (std::fabs(ys[i] - ys[i - 1]) > 0.5) br.push_back(0.5 * (xs[i] + xs[i - 1]));
  }
  std::sort(br.begin(), br.end());
  return br;
}

const char* kPalette[] = {"#1f4e9a", "#c0392b", "#2e8b57", "#8e44ad", "#d35400"};

Series raster_series(const std::vector<std::vector<double>>& raster) {
  Series s;
  s.style = SeriesStyle::Points;
  s.color = "#000000";
  for (std::size_t i = 0; i < raster.size(); ++i) {
    for (double t : raster[i]) {
      s.x.push_back(t);
      s.y.push_back(static_cast<double>(i));
    }
  }
  return s;
}

Table raster_table(const std::vector<std::vector<double>>& raster) {
  Table t{{"cell_id", "event_time"}, {}};
  for (std::size_t i = 0; i < raster.size(); ++i)
    for (double e : raster[i]) t.add({static_cast<double>(i), e});
  return t;
}

// ---- simulate ------------------------------------------------------------

ExperimentOutput run_simulate(const RunConfig& cfg, const ModelParams& p) {
  const Options o(cfg.options, with_noise({{"cells", 30}, {"amplitude", 0.5}, {"tau", 0.1},
                                           {"kicks", 40}, {"cluster_width", 0.02},
                                           {"pre_cycles", 3}, {"w_bar_window", 10}}));
  KickedPopulationOptions k;
  k.n_cells = o.positive("cells");
  k.amplitude = o.num("amplitude");
  k.tau = o.num("tau");
  k.n_kicks = o.positive("kicks");
  k.cluster_width = o.num("cluster_width");
  k.pre_cycles = o.integer("pre_cycles");
  k.w_bar_window = o.positive("w_bar_window");
  k.noise = noise_from(o, 0);
  k.seed = cfg.seed;
  k.record_cell = 0;
  if (k.pre_cycles < 0) throw ConfigError("option 'pre_cycles' must be >= 0");
  const KickedPopulation pop = kicked_population(p, k);
  const auto& r = pop.result;
  const auto& tr = r.recorded;
  Table traj{{"t", "z_re", "z_im", "y"}, {}};
  for (std::size_t j = 0; j < tr.times.size(); ++j) {
    traj.add({tr.times[j], tr.z_re[j], tr.z_im[j], tr.y[j]});
  }

  Table w{{"time", "W", "W_bar"}, {}};
  for (std::size_t j = 0; j < r.w.size(); ++j) w.add({r.bin_times[j], r.w[j], r.w_bar[j]});

  Series ws{"W-bar", r.bin_times, r.w_bar, SeriesStyle::Line, kPalette[1], {}};
  Panel top{"raster", "time", "cell", {raster_series(r.raster)}, {}, {}};
  Panel bottom{"synchrony", "time", "W-bar", {ws}, {}, std::pair{0.0, 1.0}};
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"raster.csv", to_csv(raster_table(r.raster))},
                   {"wbar.csv", to_csv(w)},
                   {"trajectory.csv", to_csv(traj)},
                   {"simulate.svg", emit_svg({top, bottom})}};
  out.summary = {{"period", pop.period},
                 {"final_w_bar", r.w_bar.empty() ? 0.0 : r.w_bar.back()},
                 {"bins", r.w.size()}};
  return out;
}

// ---- kickmap -------------------------------------------------------------

ExperimentOutput run_kickmap(const RunConfig& cfg, const ModelParams& p) {
  const Options o(cfg.options, with_noise({{"amplitudes", {0.1, 0.5, 1.5}},
                                           {"points", 2000},
                                           {"tau", 0.0},
                                           {"extract", false},
                                           {"extract_points", 200},
                                           {"realizations", 1},
                                           {"tolerance", 0.05}}));
  const BurstModel model(p);
  const auto amps = o.list("amplitudes");
  const int n = o.positive("points");
  const double tau = o.num("tau");
  const NoiseConfig noise = noise_from(o, 0);

  Table t{{"A", "theta", "F", "slope", "branch"}, {}};
  Table ex{{"A", "theta_in", "theta_out", "dispersion", "valid"}, {}};
  Panel panel{"kick maps", "theta", "F(theta)", {}, std::pair{0.0, 1.0}, std::pair{0.0, 1.0}};
  json per = json::array();
  for (std::size_t a = 0; a < amps.size(); ++a) {
    const double A = amps[a];
    const KickMap map = build_kick_map(A, model).shifted(tau);
    Series s{"A=" + format_double(A), {}, {}, SeriesStyle::Line, kPalette[a % 5], {}};
    for (int i = 0; i < n; ++i) {
      const double th = (i + 0.5) / n;
      const double f = map(th);
      t.add({A, th, f, map.derivative(th), static_cast<double>(map.branch_index(th))});
      s.x.push_back(th);
      s.y.push_back(f);
    }
    s.breaks = plot_breaks(map, s.x, s.y);
    panel.series.push_back(s);
    json info = {{"A", A},
                 {"theta_w", map.theta_w},
                 {"theta_c", map.theta_c},
                 {"tau_C", tau_C(A, model)},
                 {"silent_fraction", map.silent_fraction},
                 {"branches", map.branches().size()}};
    if (o.flag("extract")) {
      ExtractOptions eo;
      eo.n_realizations = o.positive("realizations");
      eo.seed = derive_seed(cfg.seed, 41, a);
      const auto grid = default_theta_grid(0.2, o.positive("extract_points"));
      const auto samples = extract_map(p, A, grid, noise, eo);
      Series pts{"extracted A=" + format_double(A), {}, {}, SeriesStyle::Points,
                 kPalette[a % 5], {}};
      for (const auto& m : samples) {
        ex.add({A, m.theta_in, m.theta_out, m.dispersion, m.valid ? 1.0 : 0.0});
        if (m.valid) {
          pts.x.push_back(m.theta_in);
          pts.y.push_back(wrap_phase(m.theta_out + tau));
        }
      }
      panel.series.push_back(pts);
      const auto agree = compare_map(build_kick_map(A, model), samples, o.num("tolerance"));
      info["agreement"] = agree.fraction();
      info["compared"] = agree.compared;
    }
    per.push_back(info);
  }
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts.push_back({"kickmap.csv", to_csv(t)});
  if (o.flag("extract")) out.artifacts.push_back({"extracted.csv", to_csv(ex)});
  out.artifacts.push_back({"kickmap.svg", emit_svg({panel})});
  out.summary = {{"maps", per}};
  return out;
}

// ---- orbit-diagram -------------------------------------------------------

ExperimentOutput run_orbit_diagram(const RunConfig& cfg, const ModelParams& p) {
  const Options o(cfg.options, {{"amplitude", 0.5}, {"tau_min", 0.0}, {"tau_max", 1.0},
                                {"taus", 200}, {"cells", 100}, {"iterations", 150},
                                {"k", 20}, {"ulam_bins", 100}, {"ulam_samples", 50}});
  const BurstModel model(p);
  const double A = o.num("amplitude");
  const int nt = o.positive("taus"), bins = o.positive("ulam_bins");
  const double lo = o.num("tau_min"), hi = o.num("tau_max");
  std::vector<double> taus(static_cast<std::size_t>(nt));
  for (int j = 0; j < nt; ++j) taus[j] = nt == 1 ? lo : lo + (hi - lo) * j / (nt - 1);
  const KickMap map = build_kick_map(A, model);
  const auto rows = orbit_diagram(map, taus, o.positive("cells"), o.positive("iterations"),
                                  o.integer("k"), cfg.threads);

  std::vector<InvariantMeasure> measures(taus.size());
  std::vector<std::string> failures(taus.size());
  const int samples = o.positive("ulam_samples");
  parallel_for(taus.size(), [&](std::size_t j) {
    try {
      measures[j] = ulam_measure(map.shifted(taus[j]), bins, samples);
    } catch (const NumericError& e) {
      failures[j] = e.what();
    }
  }, cfg.threads);

  Table orbits{{"tau", "phase"}, {}}, summary{{"tau", "w_bar", "lambda", "region", "ulam_residual"}, {}};
  Table meas{{"tau", "bin_center", "density"}, {}};
  Series os{"", {}, {}, SeriesStyle::Points, "#000000", {}};
  Series wb{"W-bar", {}, {}, SeriesStyle::Line, kPalette[0], {}};
  Series lam{"lambda", {}, {}, SeriesStyle::Line, kPalette[1], {}};
  Series ms{"", {}, {}, SeriesStyle::Points, kPalette[2], {}};
  int unconverged = 0;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto& r = rows[j];
    for (double ph : r.final_phases) {
      orbits.add({r.tau, ph});
      os.x.push_back(r.tau);
      os.y.push_back(ph);
    }
    const RegionLabel reg = classify_region(A, r.tau, model);
    const double res = failures[j].empty() ? measures[j].residual : NAN;
    summary.add({r.tau, r.w_bar, r.lambda, static_cast<double>(static_cast<int>(reg.region) + 1), res});
    wb.x.push_back(r.tau);
    wb.y.push_back(r.w_bar);
    lam.x.push_back(r.tau);
    lam.y.push_back(r.lambda);
    if (!failures[j].empty()) {
      ++unconverged;
      continue;
    }
    for (int b = 0; b < bins; ++b) {
      const double c = (b + 0.5) / bins, d = measures[j].density[b];
      meas.add({r.tau, c, d});
      if (d * bins >= 1.0) {
        ms.x.push_back(r.tau);
        ms.y.push_back(c);
      }
    }
  }
  const auto xr = std::pair{lo, hi > lo ? hi : lo + 1.0};
  Panel p1{"orbits", "tau", "theta", {os}, xr, std::pair{0.0, 1.0}};
  Panel p2{"W-bar and lambda", "tau", "", {wb, lam}, xr, {}};
  Panel p3{"invariant measure (bins above uniform density)", "tau", "theta", {ms}, xr,
           std::pair{0.0, 1.0}};
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"orbits.csv", to_csv(orbits)},
                   {"summary.csv", to_csv(summary)},
                   {"measure.csv", to_csv(meas)},
                   {"orbit_diagram.svg",
                    emit_svg({p1, p2, p3}, PlotSpec{640, 240, "A=" + format_double(A)})}};
  out.summary = {{"A", A}, {"tau_C", tau_C(A, model)}, {"ulam_unconverged", unconverged}};
  return out;
}

// ---- lyapunov ------------------------------------------------------------

ExperimentOutput run_lyapunov(const RunConfig& cfg, const ModelParams& p) {
  const Options o(cfg.options, {{"amplitude", 0.5}, {"tau", 0.1}, {"seeds", 50},
                                {"iterations", 1000}, {"transient", 100}});
  const BurstModel model(p);
  const double A = o.num("amplitude"), tau = o.num("tau");
  const KickMap base = build_kick_map(A, model);
  const KickMap map = base.shifted(tau);
  const int ns = o.positive("seeds"), iters = o.positive("iterations");
  const int transient = o.integer("transient");
  Table t{{"seed", "theta0", "lambda", "n_terms", "excluded"}, {}};
  Series s{"lambda", {}, {}, SeriesStyle::Points, kPalette[0], {}};
  double lmin = INFINITY, lsum = 0.0;
  for (int k = 0; k < ns; ++k) {
    std::mt19937_64 rng(derive_seed(cfg.seed, 20, static_cast<std::uint64_t>(k)));
    const double th = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto est = lyapunov(map, th, iters, transient);
    t.add({static_cast<double>(k), th, est.lambda, static_cast<double>(est.n_terms),
           static_cast<double>(est.excluded)});
    s.x.push_back(k);
    s.y.push_back(est.lambda);
    lmin = std::min(lmin, est.lambda);
    lsum += est.lambda;
  }
  const LemmaCertificate cert = lemma1_certificate(base, tau);
  std::vector<Series> series{s};
  if (cert.holds) {
    series.push_back({"certified bound", {0.0, ns - 1.0}, {cert.lower_bound, cert.lower_bound},
                      SeriesStyle::Line, kPalette[1], {}});
  }
  const RegionLabel reg = classify_region(A, tau, model);
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"lyapunov.csv", to_csv(t)},
                   {"lyapunov.svg", emit_svg({Panel{"Lyapunov estimates", "seed", "lambda",
                                                  series, {}, {}}})}};
  out.summary = {{"lambda_min", lmin},
                 {"lambda_mean", lsum / ns},
                 {"region", to_string(reg.region)},
                 {"certificate",
                  {{"holds", cert.holds},
                   {"lower_bound", cert.lower_bound},
                   {"slope_lo_expand", cert.slope_lo_expand},
                   {"slope_lo_middle", cert.slope_lo_middle},
                   {"escape_steps", cert.escape_steps},
                   {"failure", cert.failure}}}};
  return out;
}

// ---- ulam ----------------------------------------------------------------

ExperimentOutput run_ulam(const RunConfig& cfg, const ModelParams& p) {
  const Options o(cfg.options, {{"amplitude", 0.5}, {"tau", 0.5}, {"bins", 200},
                                {"samples", 100}, {"tol", 1e-10}, {"max_iter", 100000}});
  const BurstModel model(p);
  const KickMap map = build_kick_map(o.num("amplitude"), model).shifted(o.num("tau"));
  const int bins = o.positive("bins");
  const auto P = ulam_matrix(map, bins, o.positive("samples"));
  double row_err = 0.0;
  for (const auto& row : P) {
    double s = 0.0;
    for (double v : row) s += v;
    row_err = std::max(row_err, std::fabs(s - 1.0));
  }
  const auto m = ulam_measure(map, bins, o.positive("samples"), o.num("tol"),
                              o.positive("max_iter"));
  Table t{{"bin_center", "density"}, {}};
  Series s{"density x bins", {}, {}, SeriesStyle::Line, kPalette[0], {}};
  for (int b = 0; b < bins; ++b) {
    const double c = (b + 0.5) / bins;
    t.add({c, m.density[b]});
    s.x.push_back(c);
    s.y.push_back(m.density[b] * bins);
  }
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"measure.csv", to_csv(t)},
                   {"ulam.svg", emit_svg({Panel{"Ulam invariant density", "theta", "density",
                                              {s}, std::pair{0.0, 1.0}, {}}})}};
  out.summary = {{"residual", m.residual},
                 {"iterations", m.iterations},
                 {"row_sum_error", row_err}};
  return out;
}

// ---- buffer --------------------------------------------------------------

ExperimentOutput run_buffer(const RunConfig& cfg, const ModelParams& p) {
  json d = with_noise({{"amplitude", 0.5}, {"etas", {1e-15, 1e-9, 1e-3}},
                       {"d_B", 10.0}, {"grid", 400}});
  d.erase("eta");
  const Options o(cfg.options, d);
  const double A = o.num("amplitude");
  Table t{{"eta", "mean_period", "cv", "y_J", "y_B", "theta_B", "theta_w", "active"}, {}};
  Table curve{{"eta", "y", "d"}, {}};
  Panel panel{"symmetrized KL divergence", "y", "log10 d", {}, {}, {}};
  json per = json::array();
  const auto etas = o.list("etas");
  for (std::size_t k = 0; k < etas.size(); ++k) {
    json tmp = o.resolved();
    tmp["eta"] = etas[k];
    NoiseConfig nz = noise_from(Options(json::object(), tmp), derive_seed(cfg.seed, 30, k));
    if (!nz.active()) throw ConfigError("buffer needs eta > 0");
    NoisyMapInfo info;
    build_noisy_kick_map(p, nz, A, &info);
    BufferOptions bo;
    bo.d_B = o.num("d_B");
    bo.grid = o.positive("grid");
    bo.threads = cfg.threads;
    const BurstModel noisy(p, info.y_J);
    const BufferResult b = buffer_point(noisy, nz.white_noise_intensity(), A, 0.0, bo);
    const KickMap m = noisy_kick_map_from(p, A, info.y_J, b);
    t.add({etas[k], info.mean_period, info.cv, info.y_J, b.y_B, b.theta_B, m.theta_w,
           b.active ? 1.0 : 0.0});
    Series s{"eta=" + format_double(etas[k]), {}, {}, SeriesStyle::Line, kPalette[k % 5], {}};
    for (const auto& [y, dv] : b.d_curve) {
      curve.add({etas[k], y, dv});
      s.x.push_back(y);
      s.y.push_back(std::log10(std::max(dv, 1e-300)));
    }
    panel.series.push_back(s);
    per.push_back({{"eta", etas[k]}, {"theta_B", b.theta_B}, {"theta_w", m.theta_w},
                   {"y_B", b.y_B}, {"cv", info.cv}, {"mean_period", info.mean_period}});
  }
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"buffer.csv", to_csv(t)},
                   {"divergence.csv", to_csv(curve)},
                   {"buffer.svg", emit_svg({panel})}};
  out.summary = {{"A", A}, {"buffer", per}};
  return out;
}

// ---- dbs-demo ------------------------------------------------------------

ExperimentOutput run_dbs(const RunConfig& cfg, const ModelParams& p) {
  const Options o(cfg.options, with_noise({{"cells", 20},
                                           {"strong_amplitude", 1.5},
                                           {"strong_period", 1.4},
                                           {"weak_amplitude", 0.5},
                                           {"weak_delay", 0.375},
                                           {"w_threshold", 0.9},
                                           {"max_sync_kicks", 50},
                                           {"weak_kicks", 20},
                                           {"w_bar_window", 5}}));
  DbsOptions d;
  d.n_cells = o.positive("cells");
  d.strong_amplitude = o.num("strong_amplitude");
  d.strong_period = o.num("strong_period");
  d.weak_amplitude = o.num("weak_amplitude");
  d.weak_delay = o.num("weak_delay");
  d.w_threshold = o.num("w_threshold");
  d.max_sync_kicks = o.positive("max_sync_kicks");
  d.weak_kicks = o.positive("weak_kicks");
  d.w_bar_window = o.positive("w_bar_window");
  d.noise = noise_from(o, 0);
  d.seed = cfg.seed;
  const DbsResult r = dbs_demo(p, d);

  Table w{{"time", "W", "W_bar", "weak_on"}, {}};
  for (std::size_t j = 0; j < r.w.size(); ++j) {
    w.add({r.kick_times[j], r.w[j], r.w_bar[j],
           static_cast<int>(j) >= r.switch_on_kick ? 1.0 : 0.0});
  }
  Series ws{"W-bar", r.kick_times, r.w_bar, SeriesStyle::Line, kPalette[1], {}};
  Series on{"weak train on", {r.switch_on_time, r.switch_on_time}, {0.0, 1.0},
            SeriesStyle::Line, kPalette[2], {}};
  Panel top{"raster", "time", "cell", {raster_series(r.raster)}, {}, {}};
  Panel bottom{"synchrony", "time", "W-bar", {ws, on}, {}, std::pair{0.0, 1.0}};

  const BurstModel model(p);
  const KickMap strong = build_kick_map(d.strong_amplitude, model).shifted(d.strong_period - 1.0);
  const double map_sync = w_bar(strong, uniform_phases(100));
  json doublet;
  try {
    const KickMap dm = doublet_map(d.strong_amplitude, d.strong_period - 1.0, d.weak_amplitude,
                                   d.weak_delay, model);
    double lmax = -INFINITY;
    for (double th : uniform_phases(20)) lmax = std::max(lmax, lyapunov(dm, th, 1000, 100).lambda);
    doublet = {{"w_bar", w_bar(dm, uniform_phases(100))}, {"lambda_max", lmax}};
  } catch (const std::exception& e) {
    doublet = {{"error", e.what()}};
  }

  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"raster.csv", to_csv(raster_table(r.raster))},
                   {"wbar.csv", to_csv(w)},
                   {"dbs.svg", emit_svg({top, bottom})}};
  out.summary = {{"switch_on_kick", r.switch_on_kick},
                 {"switch_on_time", r.switch_on_time},
                 {"w_bar_at_switch", r.w_bar[static_cast<std::size_t>(r.switch_on_kick) - 1]},
                 {"min_w_bar_after", r.min_w_bar_after},
                 {"period", r.period},
                 {"map_strong_w_bar", map_sync},
                 {"map_doublet", doublet}};
  return out;
}

// ---- noisy-map -----------------------------------------------------------

ExperimentOutput run_noisy_map(const RunConfig& cfg, const ModelParams& p) {
  json d = with_noise({{"amplitude", 0.5}, {"points", 100}, {"realizations", 10},
                       {"tolerance", 0.05}});
  d["eta"] = 1e-3;
  const Options o(cfg.options, d);
  const double A = o.num("amplitude");
  const NoiseConfig nz = noise_from(o, derive_seed(cfg.seed, 40, 0));
  if (!nz.active()) throw ConfigError("noisy-map needs eta > 0");
  NoisyMapInfo info;
  const KickMap map = build_noisy_kick_map(p, nz, A, &info);
  const int n = o.positive("points");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) grid[i] = (i + 0.5) / n;
  ExtractOptions eo;
  eo.n_realizations = o.positive("realizations");
  eo.period = info.mean_period;
  eo.seed = derive_seed(cfg.seed, 41, 0);
  eo.threads = cfg.threads;
  const auto samples = extract_map(p, A, grid, nz, eo);
  const auto agree = compare_map(map, samples, o.num("tolerance"));

  Table t{{"theta", "analytic", "extracted", "dispersion", "valid"}, {}};
  Series an{"analytic (noisy geometry)", {}, {}, SeriesStyle::Line, kPalette[0], {}};
  Series ex{"extracted", {}, {}, SeriesStyle::Points, kPalette[1], {}};
  for (int i = 0; i < 1000; ++i) {
    const double th = (i + 0.5) / 1000;
    an.x.push_back(th);
    an.y.push_back(map(th));
  }
  an.breaks = plot_breaks(map, an.x, an.y);
  for (const auto& s : samples) {
    t.add({s.theta_in, map(s.theta_in), s.theta_out, s.dispersion, s.valid ? 1.0 : 0.0});
    if (s.valid) {
      ex.x.push_back(s.theta_in);
      ex.y.push_back(s.theta_out);
    }
  }
  ExperimentOutput out;
  out.resolved_options = o.resolved();
  out.artifacts = {{"noisy_map.csv", to_csv(t)},
                   {"noisy_map.svg",
                    emit_svg({Panel{"noisy kick map", "theta", "F(theta)", {an, ex},
                                    std::pair{0.0, 1.0}, std::pair{0.0, 1.0}}})}};
  out.summary = {{"agreement", agree.fraction()},
                 {"compared", agree.compared},
                 {"theta_B", info.buffer.theta_B},
                 {"theta_w", map.theta_w},
                 {"y_J", info.y_J},
                 {"cv", info.cv},
                 {"mean_period", info.mean_period}};
  return out;
}

using Runner = std::function<ExperimentOutput(const RunConfig&, const ModelParams&)>;

const std::map<std::string, Runner>& registry() {
  static const std::map<std::string, Runner> r = {
      {"simulate", run_simulate},         {"kickmap", run_kickmap},
      {"orbit-diagram", run_orbit_diagram}, {"lyapunov", run_lyapunov},
      {"ulam", run_ulam},                 {"buffer", run_buffer},
      {"dbs-demo", run_dbs},              {"noisy-map", run_noisy_map},
  };
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

ExperimentOutput run_experiment(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.threads > 0) set_default_thread_count(cfg.threads);
  return registry().at(cfg.experiment)(cfg, cfg.model_params());
}

json make_manifest(const RunConfig& cfg, const ExperimentOutput* out,
                   const std::string& error) {
  json m = {{"tool", "burstmap"},
            {"version", kToolVersion},
            {"experiment", cfg.experiment},
            {"seed", cfg.seed},
            {"config", to_json(cfg)}};
  try {
    const BurstModel model(cfg.model_params());
    const auto& g = model.geometry();
    m["params"] = to_json(model.params());
    m["geometry"] = {{"y_SN", g.y_SN}, {"y_H", g.y_H}, {"y_J", g.y_J},
                     {"T_S", g.T_S},   {"T_P", g.T_P}, {"T", g.T}};
  } catch (const std::exception& e) {
    m["geometry"] = nullptr;
  }
  if (out) {
    json names = json::array();
    for (const auto& a : out->artifacts) names.push_back(a.name);
    m["artifacts"] = names;
    m["summary"] = out->summary;
    m["resolved_options"] = out->resolved_options;
  }
  m["status"] = error.empty() ? "ok" : "error";
  if (!error.empty()) m["error"] = error;
  return m;
}

int run(const RunConfig& cfg, std::ostream& log) {
  const std::filesystem::path dir(cfg.out);
  int status = 0;
  std::string error;
  ExperimentOutput out;
  bool ok = false;
  try {
    out = run_experiment(cfg);
    ok = true;
  } catch (const ConfigError& e) {
    error = std::string("config error: ") + e.what();
    status = 2;
  } catch (const InvalidParams& e) {
    error = std::string("config error: ") + e.what();
    status = 2;
  } catch (const std::exception& e) {
    error = cfg.experiment + ": " + e.what();
    status = 1;
  }
  try {
    if (ok) {
      for (const auto& a : out.artifacts) write_text(dir / a.name, a.content);
    }
    write_text(dir / "manifest.json", dump_stable(make_manifest(cfg, ok ? &out : nullptr, error)));
  } catch (const std::exception& e) {
    log << "error writing outputs: " << e.what() << "\n";
    return 1;
  }
  if (!error.empty()) log << "error: " << error << "\n";
  else log << cfg.experiment << ": wrote " << out.artifacts.size() + 1 << " files to " << dir.string() << "\n";
  return status;
}

}  // namespace burstmap
