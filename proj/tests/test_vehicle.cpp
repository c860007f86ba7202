#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "mpnet/vehicle.hpp"

using namespace mpnet;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool angles_wrapped(const DynState16& s) {
  for (double a : {s.phi, s.psi, s.phi_p}) {
    if (!(a >= 0.0 && a < kTwoPi)) return false;
  }
  return true;
}

DynState16 moving(double vx) {
  DynState16 s;
  s.vx = vx;
  s.omega1 = s.omega2 = s.omega3 = s.omega4 = vx / VehicleParams{}.re;
  return s;
}

}  // namespace

TEST_CASE("default parameters and derived constants") {
  const VehicleParams p;
  CHECK(p.a_v_thres() == doctest::Approx(0.403509).epsilon(1e-6));
  CHECK(p.a_v_thres() == -1.0 - 2.0 * -4000.0 / 5700.0);
  CHECK(p.L == 2.69);
  CHECK_NOTHROW(validate(p));
  VehicleParams bad = p;
  bad.m = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = p;
  bad.Ta_min = 10.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("apply_actuator_limits") {
  const VehicleParams p;
  const auto kind = ModelKind::dynamic;
  auto rest = apply_actuator_limits({0.0, 0.0}, {0.0, 0.0}, p, kind);
  REQUIRE(rest);
  CHECK(rest->a0 == 0.0);
  CHECK(rest->a1 == 0.0);

  auto steer = apply_actuator_limits({1.0, 0.0}, {0.0, 0.0}, p, kind);
  CHECK(steer->a0 == doctest::Approx(0.005).epsilon(1e-12));

  const double thres = p.a_v_thres();
  auto throttle = apply_actuator_limits({0.0, 1.0}, {0.0, thres}, p, kind);
  CHECK(throttle->a1 == doctest::Approx(thres + 0.01 * 1700.0 * 2.0 / 5700.0).epsilon(1e-14));
  CHECK(throttle->a1 == doctest::Approx(0.40948).epsilon(1e-5));

  auto brake = apply_actuator_limits({0.0, -1.0}, {0.0, thres}, p, kind);
  CHECK(brake->a1 == doctest::Approx(thres - 0.01 * 4000.0 * 2.0 / 5700.0).epsilon(1e-14));

  auto boxed = apply_actuator_limits({5.0, -5.0}, {0.999, -0.999}, p, kind);
  CHECK(boxed->a0 == 1.0);
  CHECK(boxed->a1 == -1.0);

  CHECK_FALSE(apply_actuator_limits({std::nan(""), 0.0}, {}, p, kind));
  CHECK_FALSE(apply_actuator_limits({0.0, std::numeric_limits<double>::infinity()}, {}, p, kind));
}

TEST_CASE("kinematic velocity channel emulates 7.4 s / 3.8 s") {
  const VehicleParams p;
  const auto r = rate_bounds(p, ModelKind::kinematic);
  const double span = p.vmax - p.vmin;
  CHECK(r.long_up * span / 2.0 == doctest::Approx(100.0 / 3.6 / 7.4));
  CHECK(r.long_down * span / 2.0 == doctest::Approx(-100.0 / 3.6 / 3.8));

  NormControl a{0.0, normalize_velocity(0.0, p)};
  int steps = 0;
  while (map_controls_kinematic(a, p).v < 100.0 / 3.6 - 1e-9) {
    a = *apply_actuator_limits({0.0, 1.0}, a, p, ModelKind::kinematic);
    ++steps;
  }
  CHECK(steps * p.Ts == doctest::Approx(7.4).epsilon(0.01 / 7.4));
}

TEST_CASE("rate limits are never exceeded") {
  const VehicleParams p;
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> raw(-3.0, 3.0);
  for (auto kind : {ModelKind::dynamic, ModelKind::kinematic}) {
    const auto r = rate_bounds(p, kind);
    NormControl prev{0.0, 0.0};
    for (int i = 0; i < 20000; ++i) {
      const NormControl a = *apply_actuator_limits({raw(gen), raw(gen)}, prev, p, kind);
      REQUIRE(std::abs(a.a0 - prev.a0) <= p.Ts * r.steer * (1 + 1e-12));
      REQUIRE(a.a1 - prev.a1 <= p.Ts * r.long_up * (1 + 1e-12));
      REQUIRE(a.a1 - prev.a1 >= p.Ts * r.long_down * (1 + 1e-12));
      REQUIRE(std::abs(a.a0) <= 1.0);
      REQUIRE(std::abs(a.a1) <= 1.0);
      prev = a;
    }
  }
}

TEST_CASE("control mappings") {
  const VehicleParams p;
  auto zero = map_controls_dynamic({0.0, p.a_v_thres()}, p);
  CHECK(zero.delta == 0.0);
  CHECK(zero.Ta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  auto hi = map_controls_dynamic({1.0, 1.0}, p);
  CHECK(hi.delta == doctest::Approx(40.0 * std::numbers::pi / 180.0));
  CHECK(hi.Ta == 1700.0);
  auto lo = map_controls_dynamic({-1.0, -1.0}, p);
  CHECK(lo.delta == doctest::Approx(-40.0 * std::numbers::pi / 180.0));
  CHECK(lo.Ta == -4000.0);

  CHECK(map_controls_kinematic({0.0, -1.0}, p).v == p.vmin);
  CHECK(map_controls_kinematic({0.0, 1.0}, p).v == p.vmax);
  CHECK(map_controls_kinematic({0.0, 0.0}, p).v == doctest::Approx((p.vmin + p.vmax) / 2));
  CHECK(normalize_velocity(map_controls_kinematic({0.0, 0.3}, p).v, p) == doctest::Approx(0.3));
}

TEST_CASE("wrap helpers") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(-1e-20) == 0.0);  // 2*pi - 1e-20 rounds to 2*pi
  CHECK(wrap_angle(kTwoPi) == 0.0);
  CHECK(wrap_angle(-0.5) == doctest::Approx(kTwoPi - 0.5));
  CHECK(wrap_angle(7.0) == doctest::Approx(7.0 - kTwoPi));
  CHECK(wrap_signed(kTwoPi - 0.1) == doctest::Approx(-0.1));
  CHECK(wrap_signed(std::numbers::pi) == std::numbers::pi);
}

TEST_CASE("step_kinematic") {
  const VehicleParams p;
  const NormControl straight{0.0, normalize_velocity(10.0, p)};
  const KinState3 s = step_kinematic({}, straight, p);
  CHECK(s.x == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(s.y == 0.0);
  CHECK(s.phi == 0.0);

  KinState3 turn;
  const NormControl left{0.2, normalize_velocity(10.0, p)};
  double prev_phi = 0.0;
  for (int i = 0; i < 50; ++i) {
    turn = step_kinematic(turn, left, p);
    REQUIRE(turn.phi > prev_phi);
    prev_phi = turn.phi;
  }
}

TEST_CASE("kinematic full circle returns to the start") {
  const VehicleParams p;
  const double v = 10.0;
  const NormControl a{0.25, normalize_velocity(v, p)};
  const auto cmd = map_controls_kinematic(a, p);
  const double dphi = p.Ts * v / p.L * std::tan(cmd.delta);
  const int steps = static_cast<int>(std::lround(kTwoPi / dphi));
  // Pick the velocity so the heading closes exactly after `steps` steps.
  const double v_exact = kTwoPi / steps / p.Ts * p.L / std::tan(cmd.delta);
  const NormControl exact{a.a0, normalize_velocity(v_exact, p)};
  KinState3 s;
  double path = 0.0;
  for (int i = 0; i < steps; ++i) {
    const KinState3 n = step_kinematic(s, exact, p);
    path += pathlength_increment(s.x, s.y, n.x, n.y);
    s = n;
  }
  CHECK(std::hypot(s.x, s.y) <= 1e-3 * path);
  CHECK(std::min(s.phi, kTwoPi - s.phi) < 1e-9);
  // Closed-form radius L / tan(delta).
  CHECK(path / kTwoPi == doctest::Approx(p.L / std::tan(cmd.delta)).epsilon(1e-3));
}

TEST_CASE("kinematic mirror symmetry") {
  const VehicleParams p;
  KinState3 s, m;
  NormControl a{0.0, normalize_velocity(15.0, p)}, b = a;
  for (int i = 0; i < 1000; ++i) {
    const double cmd = std::sin(0.01 * i);
    a = *apply_actuator_limits({cmd, 0.2}, a, p, ModelKind::kinematic);
    b = *apply_actuator_limits({-cmd, 0.2}, b, p, ModelKind::kinematic);
    CHECK(b.a0 == -a.a0);
    s = step_kinematic(s, a, p);
    m = step_kinematic(m, b, p);
    REQUIRE(m.x == doctest::Approx(s.x).epsilon(1e-12));
    REQUIRE(std::abs(m.y + s.y) <= 1e-12 * (1.0 + std::abs(s.x)));
    REQUIRE(std::abs(wrap_signed(m.phi + s.phi)) <= 1e-12);
  }
}

TEST_CASE("full-stop special case is absorbing") {
  const VehicleParams p;
  DynState16 s;
  const NormControl idle{0.0, p.a_v_thres()};
  for (int i = 0; i < 100; ++i) {
    const DynamicStep r = step_dynamic16(s, idle, p);
    REQUIRE_FALSE(r.diverged);
    REQUIRE(r.state.to_array() == DynState16{}.to_array());
    s = r.state;
  }
  // A creeping state with pose offsets keeps its pose and loses all rates.
  DynState16 creep;
  creep.x = 3.0;
  creep.y = -1.0;
  creep.phi = 1.0;
  creep.vx = 0.5 / 3.6;
  creep.omega_phi = 0.2;
  creep.psi = 0.01;
  const DynamicStep r = step_dynamic16(creep, idle, p);
  CHECK(r.state.x == 3.0);
  CHECK(r.state.y == -1.0);
  CHECK(r.state.phi == 1.0);
  const auto z = r.state.to_array();
  for (int i = 3; i < 16; ++i) CHECK(z[i] == 0.0);
}

TEST_CASE("static vertical forces sum to m g") {
  const VehicleParams p;
  const DynamicStep r = step_dynamic16(moving(10.0), {0.0, p.a_v_thres()}, p);
  const double sum = r.forces.Feta[0] + r.forces.Feta[1] + r.forces.Feta[2] + r.forces.Feta[3];
  CHECK(std::abs(sum - 1450.0 * 9.81) <= 1e-9 * 1450.0 * 9.81);
  CHECK(r.forces.Feta[0] == doctest::Approx(0.5 * 1450 * 9.81 * 1.59 / 2.69));
  CHECK(r.forces.Feta[2] == doctest::Approx(0.5 * 1450 * 9.81 * 1.1 / 2.69));
  CHECK(r.state.v_eta == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("low-speed reinitialization") {
  const VehicleParams p;
  const double thres = p.a_v_thres();
  const DynamicStep fwd = step_dynamic16(DynState16{}, {0.0, thres + 0.01}, p);
  CHECK(fwd.state.vx > 0.0);
  CHECK(fwd.state.x > 0.0);
  const DynamicStep rev = step_dynamic16(DynState16{}, {0.0, thres - 0.01}, p);
  CHECK(rev.state.vx < 0.0);
  CHECK(rev.state.x < 0.0);
}

TEST_CASE("Pacejka magnitude bound and angle wrapping over random steps") {
  const VehicleParams p;
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 100000; ++i) {
    DynState16 s = moving(40.0 * unit(gen));
    s.vy = 2.0 * unit(gen);
    s.omega_phi = 0.5 * unit(gen);
    s.phi = wrap_angle(4.0 * unit(gen));
    s.psi = wrap_angle(0.05 * unit(gen));
    s.omega_psi = 0.2 * unit(gen);
    s.phi_p = wrap_angle(0.05 * unit(gen));
    s.omega_phip = 0.2 * unit(gen);
    s.omega1 += 5.0 * unit(gen);
    s.omega3 += 5.0 * unit(gen);
    s.eta = 0.02 * unit(gen);
    s.v_eta = 0.1 * unit(gen);
    const DynamicStep r = step_dynamic16(s, {unit(gen), unit(gen)}, p);
    if (r.diverged) continue;
    REQUIRE(angles_wrapped(r.state));
    for (int j = 0; j < 4; ++j) {
      const double Fz = r.forces.Feta[j];
      if (Fz < 0.0) continue;
      const double Fw = std::hypot(r.forces.Fxw[j], r.forces.Fyw[j]);
      REQUIRE(Fw <= p.D * Fz * (1.0 + 1e-9));
      ++checked;
    }
  }
  CHECK(checked > 300000);
}

TEST_CASE("divergence is reported for non-finite states") {
  const VehicleParams p;
  DynState16 s = moving(10.0);
  s.vy = std::numeric_limits<double>::quiet_NaN();
  CHECK(step_dynamic16(s, {0.0, 0.5}, p).diverged);
  DynState16 inf = moving(10.0);
  inf.omega_phi = std::numeric_limits<double>::infinity();
  CHECK(step_dynamic16(inf, {0.0, 0.5}, p).diverged);
}

TEST_CASE("dynamic mirror symmetry over 500 steps") {
  const VehicleParams p;
  DynState16 s = moving(15.0), m = moving(15.0);
  NormControl a{0.0, p.a_v_thres()}, b = a;
  double y_scale = 1.0;
  for (int i = 0; i < 500; ++i) {
    const double cmd = 0.6 * std::sin(0.02 * i);
    a = *apply_actuator_limits({cmd, 0.55}, a, p, ModelKind::dynamic);
    b = *apply_actuator_limits({-cmd, 0.55}, b, p, ModelKind::dynamic);
    const DynamicStep rs = step_dynamic16(s, a, p);
    const DynamicStep rm = step_dynamic16(m, b, p);
    REQUIRE_FALSE(rs.diverged);
    REQUIRE_FALSE(rm.diverged);
    s = rs.state;
    m = rm.state;
    REQUIRE(angles_wrapped(s));
    y_scale = std::max(y_scale, std::abs(s.y));
    REQUIRE(std::abs(s.y + m.y) <= 1e-9 * y_scale);
    REQUIRE(std::abs(s.x - m.x) <= 1e-9 * std::abs(s.x));
    REQUIRE(std::abs(s.vx - m.vx) <= 1e-9 * std::abs(s.vx));
  }
  CHECK(y_scale > 1.0);  // the manoeuvre actually moved sideways
}

TEST_CASE("longitudinal performance: 0-100 in 7.4 s, 100-0 in 3.8 s") {
  const VehicleParams p;
  DynState16 s;
  NormControl a{0.0, p.a_v_thres()};
  int k = 0;
  while (s.vx < 100.0 / 3.6 && k < 2000) {
    a = *apply_actuator_limits({0.0, 1.0}, a, p, ModelKind::dynamic);
    s = step_dynamic16(s, a, p).state;
    ++k;
  }
  CHECK(k * p.Ts == doctest::Approx(7.4).epsilon(0.3 / 7.4));

  DynState16 b = moving(100.0 / 3.6);
  a = {0.0, p.a_v_thres()};
  k = 0;
  while (b.vx > 0.0 && k < 2000) {
    a = *apply_actuator_limits({0.0, -1.0}, a, p, ModelKind::dynamic);
    b = step_dynamic16(b, a, p).state;
    ++k;
  }
  CHECK(k * p.Ts == doctest::Approx(3.8).epsilon(0.3 / 3.8));
}

TEST_CASE("pathlength_increment") {
  CHECK(pathlength_increment(1.0, 2.0, 1.0, 2.0) == 0.0);
  CHECK(pathlength_increment(0.0, 0.0, 3.0, 4.0) == 5.0);
  const VehicleParams p;
  KinState3 s;
  double total = 0.0;
  const NormControl a{0.0, normalize_velocity(10.0, p)};
  for (int i = 0; i < 100; ++i) {
    const KinState3 n = step_kinematic(s, a, p);
    total += pathlength_increment(s.x, s.y, n.x, n.y);
    s = n;
  }
  CHECK(total == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("step functions are pure") {
  const VehicleParams p;
  DynState16 s = moving(20.0);
  s.vy = 0.3;
  const NormControl a{0.1, 0.6};
  const auto r1 = step_dynamic16(s, a, p);
  const auto r2 = step_dynamic16(s, a, p);
  CHECK(r1.state.to_array() == r2.state.to_array());
}
