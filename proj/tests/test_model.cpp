#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "burstmap/model.hpp"
#include "burstmap/numerics.hpp"

using namespace burstmap;

TEST_CASE("branch radii") {
  const auto sn = branch_radii(-1.0);
  CHECK(*sn.r_P == doctest::Approx(1.0));
  CHECK(*sn.r_U == doctest::Approx(1.0));
  const auto h = branch_radii(0.0);
  CHECK(*h.r_P == doctest::Approx(std::sqrt(2.0)));
  CHECK(*h.r_U == doctest::Approx(0.0));
  CHECK(*branch_radii(-0.4375).r_U == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_FALSE(branch_radii(-1.5).r_P.has_value());
  CHECK_FALSE(branch_radii(0.5).r_U.has_value());
}

TEST_CASE("separatrix radius is non-increasing and inverts the cutoff") {
  double prev = 2.0;
  for (int i = 1; i < 1000; ++i) {
    const double r = *branch_radii(-1.0 + i / 1000.0).r_U;
    CHECK(r <= prev);
    prev = r;
  }
  for (int i = 1; i < 100; ++i) {
    const double A = i / 100.0;
    CHECK(std::fabs(*branch_radii(cutoff_slow_value(A)).r_U - A) < 1e-10);
  }
  CHECK(cutoff_slow_value(1.0) == doctest::Approx(-1.0));
  CHECK(cutoff_slow_value(1.5) == doctest::Approx(-1.0));
}

TEST_CASE("presets and parameter validation") {
  CHECK(preset_by_name("b0") == preset_b0());
  CHECK(preset_by_name("b05") == preset_b05());
  CHECK_FALSE(preset_by_name("b1").has_value());
  ModelParams bad = preset_b0();
  bad.a = -0.1;
  try {
    BurstModel m(bad);
    FAIL("expected InvalidParams");
  } catch (const InvalidParams& e) {
    CHECK(std::string(e.what()).find("silent-branch drift") != std::string::npos);
  }
  bad = preset_b0();
  bad.a = 3.0;  // spiking drift a - r_P^2 turns positive
  CHECK_THROWS_WITH_AS(BurstModel{bad}, doctest::Contains("spiking-branch drift"), InvalidParams);
  bad = preset_b0();
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(BurstModel{bad}, InvalidParams);
}

TEST_CASE("linear ramp closed forms") {
  const BurstModel m(preset_b0());
  CHECK(m.h_S(0.0) == doctest::Approx(-1.0));
  CHECK(m.h_S_inv(1.0) == doctest::Approx(250.0).epsilon(1e-14));
  const auto& g = m.geometry();
  CHECK(g.y_J == doctest::Approx(1.0));
  CHECK(g.T_S == doctest::Approx(250.0));
  CHECK(m.h_S(g.T_S) == doctest::Approx(g.y_J));
  CHECK(m.h_P_inv(g.y_J) == doctest::Approx(g.T_S).epsilon(1e-13));
  CHECK(m.h_P_inv(-1.0) == doctest::Approx(g.T).epsilon(1e-13));
  CHECK(m.h_P_inv(-0.5) > m.h_S_inv(-0.5));
  CHECK(g.y_SN < g.y_H);
  CHECK(g.y_H < g.y_J);
  CHECK(g.T_P > 0.0);
  CHECK_THROWS_AS(m.h_P_inv(1.5), DomainError);
  CHECK_THROWS_AS(m.h_P_inv(-1.5), DomainError);
}

TEST_CASE("saturating ramp closed forms") {
  const BurstModel m(preset_b05());
  CHECK(m.h_S(1e6) == doctest::Approx(0.8));
  const auto& g = m.geometry();
  CHECK(m.h_S(g.T_S) == doctest::Approx(g.y_J).epsilon(1e-12));
  CHECK(m.h_P_inv(g.y_J) == doctest::Approx(g.T_S).epsilon(1e-12));
  CHECK(m.h_P_inv(-1.0) == doctest::Approx(g.T).epsilon(1e-12));
}

TEST_CASE("round trips and monotonicity on both presets") {
  for (const auto& p : {preset_b0(), preset_b05()}) {
    const BurstModel m(p);
    const auto& g = m.geometry();
    double prev_s = -INFINITY, prev_p = INFINITY;
    for (int i = 0; i <= 1000; ++i) {
      const double t = g.T_S * i / 1000.0;
      CHECK(std::fabs(m.h_S_inv(m.h_S(t)) - t) < 1e-10 * std::max(1.0, t));
      const double s = m.h_S(t);
      CHECK(s > prev_s);
      prev_s = s;
      const double y = -1.0 + (g.y_J + 1.0) * i / 1000.0;
      const double hp = m.h_P_inv(y);
      if (i > 0) CHECK(hp < prev_p);
      prev_p = hp;
    }
  }
}

TEST_CASE("analytic slopes match finite differences") {
  for (const auto& p : {preset_b0(), preset_b05()}) {
    const BurstModel m(p);
    for (double y : {-0.9, -0.5, -0.1, 0.3}) {
      const double h = 1e-6;
      CHECK(m.h_P_inv_slope(y) ==
            doctest::Approx((m.h_P_inv(y + h) - m.h_P_inv(y - h)) / (2 * h)).epsilon(1e-6));
      CHECK(m.h_S_inv_slope(y) ==
            doctest::Approx((m.h_S_inv(y + h) - m.h_S_inv(y - h)) / (2 * h)).epsilon(1e-6));
    }
    for (double y : {-0.9, -0.5, -0.1}) {
      const double h = 1e-6;
      CHECK(m.jump_up_slope(y) ==
            doctest::Approx((m.jump_up(y + h) - m.jump_up(y - h)) / (2 * h)).epsilon(1e-5));
    }
  }
}

TEST_CASE("jump-up symmetry for the linear ramp") {
  const BurstModel m(preset_b0());
  CHECK(m.jump_up(-1.0) == doctest::Approx(1.0));
  CHECK(std::fabs(m.jump_up(0.0)) < 1e-12);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 0.0);
  for (int i = 0; i < 100; ++i) {
    const double y = u(rng);
    CHECK(std::fabs(m.jump_up(y) + y) <= 1e-12);
  }
}

TEST_CASE("jump-up closed forms match the integral-condition oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.999, -0.001);
  for (const auto& p : {preset_b0(), preset_b05()}) {
    const BurstModel m(p);
    for (int i = 0; i < 20; ++i) {
      const double y = u(rng);
      const double yj = m.jump_up(y);
      CHECK(yj > 0.0);
      CHECK(std::fabs(yj - oracle::jump_up(p.a, p.b, y)) < 1e-8);
    }
  }
}

TEST_CASE("jump-up override shortens the silent passage") {
  const BurstModel m(preset_b0(), 0.4);
  CHECK(m.geometry().y_J == doctest::Approx(0.4));
  CHECK(m.geometry().T_S == doctest::Approx(1.4 / 0.008));
  CHECK(m.h_P_inv(0.4) == doctest::Approx(m.geometry().T_S));
  CHECK_THROWS_AS(BurstModel(preset_b0(), -2.0), InvalidParams);
}

TEST_CASE("silent profile and its integral") {
  for (const auto& p : {preset_b0(), preset_b05()}) {
    const BurstModel m(p);
    const double yi = -0.8, t = 60.0;
    const double num = oracle::gauss_legendre([&](double s) { return m.silent_profile(yi, s); }, 0.0, t);
    CHECK(m.silent_profile_integral(yi, t) == doctest::Approx(num).epsilon(1e-12));
    CHECK(m.silent_time(yi, m.silent_profile(yi, t)) == doctest::Approx(t).epsilon(1e-12));
  }
}
