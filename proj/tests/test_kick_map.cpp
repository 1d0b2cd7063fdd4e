#include <cmath>
#include <random>

#include "doctest.h"

#include "burstmap/kick_map.hpp"
#include "burstmap/numerics.hpp"

using namespace burstmap;

namespace {
const BurstModel& b0() {
  static const BurstModel m(preset_b0());
  return m;
}
const BurstModel& b05() {
  static const BurstModel m(preset_b05());
  return m;
}
}  // namespace

TEST_CASE("cutoff phase") {
  CHECK(theta_w(1.5, b0()) == 0.0);
  CHECK(theta_w(1.0, b0()) == 0.0);
  const double T = b0().geometry().T;
  CHECK(theta_w(0.5, b0()) == doctest::Approx(b0().h_S_inv(-0.4375) / T).epsilon(1e-14));
  CHECK(theta_w(0.5, b0()) == doctest::Approx(0.5625 / 0.008 / T).epsilon(1e-12));
  double prev = 1.0;
  for (int i = 1; i < 100; ++i) {
    const double tw = theta_w(i / 100.0, b0());
    CHECK(tw < prev);
    prev = tw;
  }
  CHECK_THROWS(theta_w(0.0, b0()));
}

TEST_CASE("critical phase is where the middle branch has slope -1") {
  for (const BurstModel* m : {&b0(), &b05()}) {
    const auto tc = theta_c(*m);
    REQUIRE(tc.has_value());
    const KickMap strong = build_kick_map(1.5, *m);
    CHECK(strong.derivative(*tc) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(std::fabs(strong.derivative(*tc / 2)) > 1.0);
    CHECK(std::fabs(strong.derivative(2 * *tc)) < 1.0);
    CHECK(strong.theta_c == *tc);
  }
  CHECK(*theta_c(b05()) == doctest::Approx(0.0619).epsilon(0.001 / 0.0619));
}

TEST_CASE("strong map endpoints and identity branch") {
  const KickMap f = build_kick_map(1.5, b0());
  const double ts = b0().geometry().T_S / b0().geometry().T;
  REQUIRE(f.branches().size() == 2);
  CHECK(f.branches()[0].kind == BranchKind::Middle);
  CHECK(f.lift(1e-12) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(f(ts) == doctest::Approx(ts));
  CHECK(f.lift(ts - 1e-12) == doctest::Approx(ts).epsilon(1e-9));
  for (double th : {ts, 0.6, 0.8, 0.999}) CHECK(f(th) == doctest::Approx(th));
  CHECK(f.silent_fraction == doctest::Approx(ts));
}

TEST_CASE("weak map branches") {
  const KickMap f = build_kick_map(0.5, b0());
  REQUIRE(f.branches().size() == 3);
  CHECK(f.branches()[0].kind == BranchKind::Expansive);
  CHECK(f.branches()[1].kind == BranchKind::Middle);
  CHECK(f.branches()[2].kind == BranchKind::Identity);
  CHECK(f.theta_w == doctest::Approx(theta_w(0.5, b0())));
  CHECK(f(0.0) == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 1; i < 100; ++i) {
    const double th = f.theta_w * i / 100.0;
    CHECK(f.lift(th) > th);
  }
  REQUIRE(f.discontinuities().size() >= 1);
}

TEST_CASE("analytic branch slopes match finite differences") {
  for (double A : {0.1, 0.5, 0.9, 1.5}) {
    const KickMap f = build_kick_map(A, b05());
    for (const auto& b : f.branches()) {
      for (int i = 1; i < 10; ++i) {
        const double th = b.lo + (b.hi - b.lo) * i / 10.0, h = 1e-7;
        const double fd = (b.value(th + h) - b.value(th - h)) / (2 * h);
        CHECK(b.slope(th) == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}

TEST_CASE("shift translates the map vertically") {
  const KickMap f = build_kick_map(0.5, b0());
  CHECK(f.shifted(0.0)(0.7) == doctest::Approx(0.7));
  CHECK(f.shifted(0.5)(0.9) == doctest::Approx(0.4));
  CHECK(f.shifted(0.1)(0.05) > 0.15);
  CHECK(f.shifted(1.25).shift() == doctest::Approx(0.25));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double th = u(rng), tau = u(rng);
    CHECK(circular_distance(f.shifted(tau)(th), wrap_phase(f(th) + tau)) < 1e-12);
    CHECK(f.shifted(tau).derivative(th) == f.derivative(th));
  }
}

TEST_CASE("chaos boundary") {
  CHECK(tau_C(1.0, b0()) == 0.0);
  CHECK(tau_C(1.5, b0()) == 0.0);
  CHECK(tau_C(0.999999, b0()) < 1e-3);
  double prev = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double t = tau_C(i / 21.0, b0());
    CHECK(t <= prev);
    prev = t;
  }
  const KickMap f = build_kick_map(0.5, b0());
  CHECK(tau_C(0.5, b0()) == doctest::Approx(1.0 - f.lift(f.theta_w)).epsilon(1e-12));
}

TEST_CASE("parameter regions") {
  CHECK(classify_region(0.5, 0.1, b0()).region == Region::I);
  CHECK(classify_region(0.5, 0.5, b0()).region == Region::III);
  const double tc = tau_C(0.5, b0()), tw = theta_w(0.5, b0());
  CHECK(classify_region(0.5, tc + tw / 2, b0()).region == Region::II);
  const auto at = classify_region(0.5, tc, b0());
  CHECK(at.boundary);
  CHECK(at.region == Region::II);
  CHECK_FALSE(classify_region(0.5, tc + 1e-6, b0()).boundary);
  CHECK(to_string(Region::II) == "II");
}

TEST_CASE("weak maps expand somewhere on the left branch") {
  for (double A : {0.1, 0.3, 0.5, 0.9}) {
    const KickMap f = build_kick_map(A, b0());
    bool found = false;
    for (int i = 1; i < 1000 && !found; ++i) found = f.derivative(f.theta_w * i / 1000.0) > 1.0;
    CHECK(found);
  }
}

TEST_CASE("lemma interval conditions for A = 0.5, tau = 0.1") {
  const KickMap f = build_kick_map(0.5, b0()).shifted(0.1);
  const double tw = f.theta_w, ts = f.silent_fraction;
  for (int i = 0; i <= 200; ++i) {
    const double mid = tw + (ts - tw) * (i + 0.5) / 201.0;
    const double img = f(mid);
    CHECK((img >= ts || img < 1e-12));
    const double id = ts + (1.0 - ts) * (i + 0.5) / 201.0;
    const double img2 = f(id);
    CHECK((img2 < tw || img2 >= ts));
  }
}

TEST_CASE("map construction rejects bad partitions") {
  const auto one = [](double t) { return t; };
  const auto d = [](double) { return 1.0; };
  CHECK_THROWS_AS(KickMap(std::vector<MapBranch>{}), std::invalid_argument);
  CHECK_THROWS_AS(KickMap({{0.0, 0.5, BranchKind::Identity, one, d}}), std::invalid_argument);
  CHECK_THROWS_AS(KickMap({{0.0, 0.5, BranchKind::Identity, one, d},
                           {0.6, 1.0, BranchKind::Identity, one, d}}),
                  std::invalid_argument);
  const KickMap ok({{0.0, 0.5, BranchKind::Identity, one, d},
                    {0.5, 1.0, BranchKind::Identity, one, d}});
  CHECK(ok.branch_index(0.5) == 1);
  CHECK(ok.border_distance(0.45) == doctest::Approx(0.05));
  CHECK(ok.discontinuities().empty());
}
