#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"

#include "burstmap/kick_map.hpp"
#include "burstmap/stochastic.hpp"
#include "burstmap/map_dynamics.hpp"
#include "burstmap/numerics.hpp"

using namespace burstmap;

namespace {

const BurstModel& b0() {
  static const BurstModel m(preset_b0());
  return m;
}

KickMap rotation(double tau) {
  return KickMap({{0.0, 1.0, BranchKind::Identity, [](double t) { return t; },
                   [](double) { return 1.0; }}},
                 tau);
}

// Attracting fixed point of the strong map by root finding on the middle branch.
double fixed_point(const KickMap& f) {
  const auto& mid = f.branches()[0];
  return brent_root([&](double t) { return mid.value(t) + f.shift() - 1.0 - t; },
                    mid.lo + 1e-12, mid.hi - 1e-12);
}

}  // namespace

TEST_CASE("synchrony measure examples") {
  const std::vector<double> same(10, 0.37);
  auto s = synchrony(same);
  CHECK(s.H == doctest::Approx(0.0));
  CHECK(s.R == doctest::Approx(1.0));
  CHECK(s.W == doctest::Approx(1.0));

  s = synchrony(uniform_phases(16, false));
  CHECK(s.R < 1e-12);
  CHECK(s.H == doctest::Approx(1.0));
  CHECK(s.W < 1e-12);

  std::vector<double> anti(10, 0.1);
  std::fill(anti.begin() + 5, anti.end(), 0.6);
  s = synchrony(anti);
  CHECK(s.R < 1e-12);
  CHECK(s.W > 0.0);
  CHECK(s.W == doctest::Approx(0.5 * (1.0 - s.H)));
  CHECK_THROWS_AS(synchrony(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("synchrony bounds under fuzzing") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> size(1, 60), bins(0, 40);
  std::uniform_real_distribution<double> u(-3.0, 3.0), c(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> p(static_cast<std::size_t>(size(rng)));
    const double width = c(rng);
    for (double& x : p) x = trial % 2 ? u(rng) : width * c(rng);
    const auto s = synchrony(p, bins(rng));
    CHECK((s.H >= 0.0 && s.H <= 1.0));
    CHECK((s.R >= 0.0 && s.R <= 1.0));
    CHECK((s.W >= 0.0 && s.W <= 1.0));
  }
}

TEST_CASE("windowed synchrony") {
  CHECK(w_bar(rotation(0.0).shifted(0.0), uniform_phases(50, false)) < 1e-12);
  CHECK(w_bar(build_kick_map(1.5, b0()).shifted(0.5), uniform_phases(100)) > 0.9);
  CHECK(w_bar(build_kick_map(0.5, b0()).shifted(0.1), uniform_phases(100)) < 0.5);
  const auto tr = iterate_population(rotation(0.25), {0.0, 0.5}, 4);
  REQUIRE(tr.size() == 5);
  CHECK(tr[4][0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(tr[1][1] == doctest::Approx(0.75));
  CHECK_THROWS_AS(w_bar(tr, 10, 2), std::invalid_argument);
  CHECK_THROWS_AS(w_bar(tr, 2, 3), std::invalid_argument);
}

TEST_CASE("orbit diagram") {
  const KickMap f = build_kick_map(0.5, b0());
  const std::vector<double> taus{0.0, 0.1, 0.5};
  const auto rows = orbit_diagram(f, taus, 40, 60, 10);
  REQUIRE(rows.size() == 3);
  const auto init = uniform_phases(40);
  // Without a shift every phase is parked on the neutral identity branch.
  for (std::size_t j = 0; j < init.size(); ++j) {
    const double p = rows[0].final_phases[j];
    CHECK(f(p) == doctest::Approx(p));
    if (init[j] >= f.silent_fraction) CHECK(p == doctest::Approx(init[j]));
  }
  CHECK(rows[1].lambda > 0.0);
  CHECK(rows[2].w_bar > 0.9);
  CHECK(rows[2].lambda < 0.0);
  const auto again = orbit_diagram(f, taus, 40, 60, 10, 1);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(again[i].final_phases == rows[i].final_phases);
}

TEST_CASE("lyapunov exponents") {
  CHECK(lyapunov(rotation(0.0), 0.3).lambda == doctest::Approx(0.0));
  CHECK(lyapunov(rotation(0.0).shifted(0.37), 0.3).lambda == doctest::Approx(0.0));
  const KickMap f = build_kick_map(0.5, b0()).shifted(0.1);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5; ++i) CHECK(lyapunov(f, u(rng), 2000, 100).lambda > 0.0);
  // Orbits started on a border are excluded, not logged.
  const KickMap strong = build_kick_map(1.5, b0());
  const auto e = lyapunov(strong, strong.silent_fraction, 1);
  CHECK(e.excluded == 1);
  CHECK(e.n_terms == 0);
  CHECK_THROWS_AS(lyapunov(f, 0.1, 0), std::invalid_argument);
}

TEST_CASE("lemma certificate") {
  const KickMap f = build_kick_map(0.5, b0());
  const auto ok = lemma1_certificate(f, 0.1);
  CHECK(ok.holds);
  CHECK(ok.lower_bound > 0.0);
  CHECK(ok.escape_steps >= 1);
  CHECK(ok.slope_lo_expand > 1.0);
  CHECK(std::log(ok.slope_lo_expand) > std::fabs(std::log(ok.slope_lo_middle)));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const KickMap g = f.shifted(0.1);
  for (int i = 0; i < 50; ++i) {
    CHECK(lyapunov(g, u(rng), 1000, 100).lambda >= ok.lower_bound - 1e-3);
  }

  const auto bad = lemma1_certificate(f, 0.5);
  CHECK_FALSE(bad.holds);
  CHECK(bad.failure.find("I3") != std::string::npos);
  const auto strong = lemma1_certificate(build_kick_map(1.5, b0()), 0.3);
  CHECK_FALSE(strong.holds);
  CHECK(strong.failure.find("three-branch") != std::string::npos);
  CHECK_FALSE(lemma1_certificate(f, 0.0).holds);
}

TEST_CASE("region III orbits collapse onto one fixed point") {
  const KickMap f = build_kick_map(0.5, b0()).shifted(0.5);
  std::vector<double> init = uniform_phases(100);
  const auto tr = iterate_population(f, init, 400);
  const auto& fin = tr.back();
  for (double p : fin) CHECK(circular_distance(p, fin[0]) < 1e-8);
  CHECK(circular_distance(f(fin[0]), fin[0]) < 1e-8);
}

TEST_CASE("ulam matrix and measure") {
  const auto P = ulam_matrix(build_kick_map(0.5, b0()).shifted(0.2), 200, 50);
  for (const auto& row : P) {
    double s = 0.0;
    for (double v : row) s += v;
    CHECK(std::fabs(s - 1.0) <= 1e-12);
  }
  const auto rot = ulam_measure(rotation(0.5), 2, 10);
  CHECK(rot.density[0] == doctest::Approx(0.5));
  CHECK(rot.density[1] == doctest::Approx(0.5));

  const KickMap strong = build_kick_map(1.5, b0()).shifted(0.5);
  const auto m = ulam_measure(strong);
  CHECK(m.residual < 1e-9);
  double total = 0.0;
  for (double v : m.density) total += v;
  CHECK(total == doctest::Approx(1.0));
  const double fp = fixed_point(strong);
  CHECK(circular_distance(strong(fp), fp) < 1e-10);
  const int n = static_cast<int>(m.density.size());
  const int bin = static_cast<int>(fp * n);
  double near = 0.0;
  for (int d = -1; d <= 1; ++d) near += m.density[static_cast<std::size_t>((bin + d + n) % n)];
  CHECK(near >= 0.9);

  const auto weak = ulam_measure(build_kick_map(0.5, b0()).shifted(0.1));
  const auto support = std::count_if(weak.density.begin(), weak.density.end(),
                                     [](double v) { return v > 1e-6; });
  CHECK(support >= 60);
  CHECK_THROWS_AS(ulam_measure(strong, 50, 10, 1e-300, 2), NumericError);
  CHECK_THROWS_AS(ulam_matrix(rotation(0.1), 0, 1), std::invalid_argument);
}

TEST_CASE("jittered iteration") {
  const KickMap f = build_kick_map(0.5, b0());
  const auto init = uniform_phases(30);
  const auto det = iterate_population(f.shifted(0.1), init, 50);
  const auto jit = jittered_iterate(f, 0.1, 0.0, init, 50, 3);
  for (std::size_t i = 0; i < det.size(); ++i) {
    for (std::size_t c = 0; c < init.size(); ++c) {
      CHECK(circular_distance(det[i][c], jit[i][c]) < 1e-12);
    }
  }
  CHECK(jittered_iterate(f, 0.1, 0.01, init, 20, 3) == jittered_iterate(f, 0.1, 0.01, init, 20, 3));
  CHECK_THROWS_AS(jittered_iterate(f, 0.1, -1.0, init, 5, 0), std::invalid_argument);

  // Jitter smears the orbit diagram of the eta = 1e-3 map: the last 20
  // iterates of all cells cover more of a fine phase grid.
  NoiseConfig nz{1e-3, 0.05, 7};
  NoisyMapInfo info;
  const KickMap g = build_noisy_kick_map(preset_b0(), nz, 0.5, &info);
  const auto occupied = [](const std::vector<std::vector<double>>& tr) {
    std::vector<int> hit(1000, 0);
    int n = 0;
    for (std::size_t i = tr.size() - 20; i < tr.size(); ++i) {
      for (double p : tr[i]) n += hit[static_cast<std::size_t>(p * 1000) % 1000]++ == 0;
    }
    return n;
  };
  double clean = 0.0, noisy = 0.0;
  for (double tau = 0.02; tau < 0.31; tau += 0.02) {
    clean += occupied(jittered_iterate(g, tau, 0.0, uniform_phases(50), 150, 9));
    noisy += occupied(jittered_iterate(g, tau, info.cv, uniform_phases(50), 150, 9));
  }
  CHECK(noisy > clean);
}
