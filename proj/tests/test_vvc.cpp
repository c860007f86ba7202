#include <doctest.h>

#include <random>

#include "mpnet/nets.hpp"
#include "mpnet/vvc.hpp"

using namespace mpnet;

namespace {

double velocity_of(double a1, const VvcContext& ctx) { return ctx.vmin + (a1 + 1.0) / 2.0 * (ctx.vmax - ctx.vmin); }

}  // namespace

TEST_CASE("context takes the kinematic channel bounds") {
  const VehicleParams p;
  const VvcContext ctx = VvcContext::make(10.0, p);
  CHECK(ctx.vmin == 0.0);
  CHECK(ctx.vmax == 130.0 / 3.6);
  CHECK(ctx.a_v_thres == doctest::Approx(0.40351).epsilon(1e-5));
  CHECK(kVvcMargin == 5.0 / 3.6);
}

TEST_CASE("dynamic law gives zero torque on target") {
  const VehicleParams p;
  const VvcContext ctx = VvcContext::make(50.0 / 3.6, p);
  const double a1_raw = 0.3;
  const double v = vvc_velocity(a1_raw, ctx);
  CHECK(apply_vvc(a1_raw, v, ctx, -3.0, ModelKind::dynamic) == ctx.a_v_thres);
  // Too fast with a negative gain brakes, too slow accelerates.
  CHECK(apply_vvc(a1_raw, v + 1.0, ctx, -3.0, ModelKind::dynamic) < ctx.a_v_thres);
  CHECK(apply_vvc(a1_raw, v - 1.0, ctx, -3.0, ModelKind::dynamic) > ctx.a_v_thres);
  CHECK(apply_vvc(a1_raw, v - 1.0, ctx, -3.0, ModelKind::dynamic) ==
        ctx.a_v_thres + tanh_approx(-3.0 * (v - 1.0 - v)));
}

TEST_CASE("kinematic projection") {
  const VehicleParams p;
  const VvcContext ctx = VvcContext::make(50.0 / 3.6, p);
  // Inside the corridor: identity.
  const double inside = 2.0 * (50.0 / 130.0) - 1.0 + 0.01;
  CHECK(apply_vvc(inside, 0.0, ctx, 0.0, ModelKind::kinematic) == inside);
  // Full throttle clipped to the upper corridor edge.
  const double top = apply_vvc(1.0, 0.0, ctx, 0.0, ModelKind::kinematic);
  CHECK(top == doctest::Approx(2.0 * 55.0 / 130.0 - 1.0).epsilon(1e-14));
  CHECK(top == doctest::Approx(-0.15385).epsilon(1e-4));
  const double bottom = apply_vvc(-1.0, 0.0, ctx, 0.0, ModelKind::kinematic);
  CHECK(velocity_of(bottom, ctx) == doctest::Approx(45.0 / 3.6).epsilon(1e-14));
}

TEST_CASE("filter invariants over random inputs") {
  const VehicleParams p;
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> a(-3.0, 3.0), vg(0.0, 130.0 / 3.6), vx(-5.0, 45.0), gain(-50.0, 50.0);
  for (int i = 0; i < 100000; ++i) {
    const VvcContext ctx = VvcContext::make(vg(gen), p);
    const double raw = a(gen);
    const double v = vvc_velocity(raw, ctx);
    REQUIRE(v >= ctx.v_goal - kVvcMargin);
    REQUIRE(v <= ctx.v_goal + kVvcMargin);

    const double once = apply_vvc(raw, 0.0, ctx, 0.0, ModelKind::kinematic);
    REQUIRE(velocity_of(once, ctx) >= ctx.v_goal - kVvcMargin - 1e-12);
    REQUIRE(velocity_of(once, ctx) <= ctx.v_goal + kVvcMargin + 1e-12);
    const double twice = apply_vvc(once, 0.0, ctx, 0.0, ModelKind::kinematic);
    REQUIRE(twice == doctest::Approx(once).epsilon(1e-14));

    const double dyn = apply_vvc(raw, vx(gen), ctx, gain(gen), ModelKind::dynamic);
    REQUIRE(dyn >= ctx.a_v_thres - 1.0);
    REQUIRE(dyn <= ctx.a_v_thres + 1.0);
    REQUIRE(apply_vvc(raw, vx(gen), ctx, 0.0, ModelKind::dynamic) == ctx.a_v_thres);
  }
}
