#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "burstmap/integrator.hpp"
#include "burstmap/map_dynamics.hpp"

using namespace burstmap;

namespace {

const ReferenceCycle& ref_b0() {
  static const ReferenceCycle r = reference_cycle(preset_b0());
  return r;
}

}  // namespace

TEST_CASE("reference cycle of the linear-ramp preset") {
  const auto& r = ref_b0();
  CHECK(r.period == doctest::Approx(465.0).epsilon(5.0 / 465.0));
  CHECK(r.spikes_per_burst > 10);
  CHECK(r.silent_time > 0.0);
  CHECK(r.silent_time < r.period);
  CHECK(r.jump_up_y > 0.9);
  CHECK(r.phase_zero.radius() < 0.2 + 1e-6);
}

TEST_CASE("free run produces one event per period") {
  const auto& r = ref_b0();
  for (int cycles : {3, 5}) {
    IntegratorOptions o;
    o.sample_interval = -1.0;
    const auto tr = integrate(preset_b0(), r.phase_zero, cycles * r.period + 0.5 * r.period,
                              std::span<const Kick>{}, {}, o);
    REQUIRE(static_cast<int>(tr.events.size()) == cycles);
    for (int k = 0; k < cycles; ++k) {
      CHECK(tr.events[k] == doctest::Approx((k + 1) * r.period).epsilon(1e-4));
    }
    CHECK(tr.jump_ups.size() == tr.events.size());
    CHECK(tr.last_spikes.size() == tr.events.size());
    for (std::size_t k = 0; k < tr.events.size(); ++k) CHECK(tr.last_spikes[k] <= tr.events[k]);
  }
}

TEST_CASE("strong kick on the saddle-node rest state spikes immediately") {
  CellState s{0.0, 0.0, kSaddleNode};
  const Kick k{0.0, 1.5};
  const auto tr = integrate(preset_b0(), s, 20.0, std::span<const Kick>(&k, 1));
  bool exceeded = false;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    if (std::hypot(tr.z_re[i], tr.z_im[i]) > 1.0 && tr.times[i] < 10.0) exceeded = true;
  }
  CHECK(exceeded);
}

TEST_CASE("kicks are exact translations of Re z") {
  const CellState s{0.0, 0.0, -0.5};
  const Kick k{0.0, 0.3};
  IntegratorOptions o;
  const auto tr = integrate(preset_b0(), s, 1e-9, std::span<const Kick>(&k, 1), {}, o);
  CHECK(tr.final_state.x == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(tr.final_state.v == doctest::Approx(0.0));
  CHECK(tr.final_state.y == doctest::Approx(-0.5));
}

TEST_CASE("a weak kick during the slow passage advances the next event") {
  const auto& r = ref_b0();
  IntegratorOptions o;
  o.sample_interval = -1.0;
  o.stop_after_events = 1;
  const auto free = integrate(preset_b0(), r.phase_zero, 2 * r.period, std::span<const Kick>{}, {}, o);
  const Kick k{110.0, 0.5};
  const auto kicked = integrate(preset_b0(), r.phase_zero, 2 * r.period, std::span<const Kick>(&k, 1), {}, o);
  REQUIRE(!free.events.empty());
  REQUIRE(!kicked.events.empty());
  CHECK(kicked.events[0] < free.events[0] - 1.0);
}

TEST_CASE("kick trains expand within the horizon") {
  const KickTrain tr{0.5, 10.0, 2.0};
  const auto ks = tr.expand(35.0);
  REQUIRE(ks.size() == 4);
  CHECK(ks[3].time == doctest::Approx(32.0));
  CHECK(ks[0].amplitude == 0.5);
}

TEST_CASE("event times are insensitive to halving the tolerance") {
  const auto& r = ref_b0();
  IntegratorOptions a, b;
  a.sample_interval = b.sample_interval = -1.0;
  b.abs_tol = a.abs_tol / 2;
  b.rel_tol = a.rel_tol / 2;
  const auto ta = integrate(preset_b0(), r.phase_zero, 3.5 * r.period, std::span<const Kick>{}, {}, a);
  const auto tb = integrate(preset_b0(), r.phase_zero, 3.5 * r.period, std::span<const Kick>{}, {}, b);
  REQUIRE(ta.events.size() == tb.events.size());
  for (std::size_t k = 0; k < ta.events.size(); ++k) {
    CHECK(std::fabs(ta.events[k] - tb.events[k]) < 1e-3);
  }
}

TEST_CASE("post-hoc event detection agrees with the online detector") {
  const auto& r = ref_b0();
  IntegratorOptions o;
  o.sample_interval = 0.0;
  o.max_step = 0.05;
  const auto tr = integrate(preset_b0(), r.phase_zero, 2.5 * r.period, std::span<const Kick>{}, {}, o);
  const auto ev = detect_burst_end(tr);
  REQUIRE(ev.size() == tr.events.size());
  for (std::size_t k = 0; k < ev.size(); ++k) CHECK(std::fabs(ev[k] - tr.events[k]) < 0.05);
}

TEST_CASE("noise streams are reproducible and seed dependent") {
  NoiseConfig n{1e-3, 0.05, 42};
  const auto a = noise_kicks(n, 100.0);
  const auto b = noise_kicks(n, 100.0);
  REQUIRE(a.size() == b.size());
  CHECK(a.size() == 1999);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].amplitude == b[i].amplitude);
  n.seed = 43;
  CHECK(noise_kicks(n, 100.0)[0].amplitude != a[0].amplitude);
  CHECK(a[0].time == doctest::Approx(0.05));

  const auto& r = ref_b0();
  IntegratorOptions o;
  o.sample_interval = -1.0;
  n.seed = 7;
  const auto t1 = integrate(preset_b0(), r.phase_zero, 2.5 * r.period, std::span<const Kick>{}, n, o);
  const auto t2 = integrate(preset_b0(), r.phase_zero, 2.5 * r.period, std::span<const Kick>{}, n, o);
  CHECK(t1.events == t2.events);
}

TEST_CASE("noise shortens the slow passage") {
  double prev = INFINITY;
  for (double eta : {1e-9, 1e-5, 1e-3}) {
    NoiseConfig n{eta, 0.05, 3};
    const auto st = period_stats(preset_b0(), n, 12, 2);
    double med = 0.0;
    auto v = st.jump_up_values;
    std::sort(v.begin(), v.end());
    med = v[v.size() / 2];
    CHECK(med <= prev + 1e-3);
    prev = med;
  }
}

TEST_CASE("strong noise makes the period irregular") {
  NoiseConfig n{1e-1, 0.05, 5};
  const auto st = period_stats(preset_b0(), n, 30, 2);
  CHECK(st.cv > 1e-2);
  CHECK_THROWS_AS(period_stats(preset_b0(), {}, 0, 0), std::invalid_argument);
}

TEST_CASE("a single-cell population is perfectly synchronous") {
  const auto& r = ref_b0();
  PopulationConfig cfg;
  cfg.n_cells = 1;
  cfg.initial_phases = {0.3};
  cfg.duration = 6 * r.period;
  cfg.w_bar_window = 3;
  const auto res = simulate_population(preset_b0(), cfg, r);
  REQUIRE(res.raster.size() == 1);
  CHECK(res.raster[0].size() >= 5);
  REQUIRE(!res.w_bar.empty());
  for (double v : res.w_bar) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("population cells share no hidden state") {
  const auto& r = ref_b0();
  PopulationConfig cfg;
  cfg.n_cells = 3;
  cfg.initial_phases = {0.1, 0.1, 0.6};
  cfg.duration = 3 * r.period;
  cfg.kicks = {{0.5 * r.period, 0.5}};
  const auto res = simulate_population(preset_b0(), cfg, r);
  REQUIRE(res.raster[0].size() == res.raster[1].size());
  for (std::size_t k = 0; k < res.raster[0].size(); ++k) {
    CHECK(res.raster[0][k] == doctest::Approx(res.raster[1][k]));
  }
  CHECK_THROWS_AS(simulate_population(preset_b0(), PopulationConfig{2, {0.1}, {}, {}, 10.0}, r),
                  std::invalid_argument);
}
