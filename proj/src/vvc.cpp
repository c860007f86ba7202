#include "mpnet/vvc.hpp"

#include <algorithm>

#include "mpnet/nets.hpp"

namespace mpnet {

double vvc_velocity(double a1_raw, const VvcContext& ctx) {
  const double v = ctx.vmin + (a1_raw + 1.0) / 2.0 * (ctx.vmax - ctx.vmin);
  return std::clamp(v, ctx.v_goal - kVvcMargin, ctx.v_goal + kVvcMargin);
}

double apply_vvc(double a1_raw, double vx, const VvcContext& ctx, double gain, ModelKind kind) {
  const double v = vvc_velocity(a1_raw, ctx);
  if (kind == ModelKind::kinematic) {
    // Inside the corridor the projection is the identity; skip the round trip.
    const double v_raw = ctx.vmin + (a1_raw + 1.0) / 2.0 * (ctx.vmax - ctx.vmin);
    if (v == v_raw) return a1_raw;
    return (v - ctx.vmin) / (ctx.vmax - ctx.vmin) * 2.0 - 1.0;
  }
  return ctx.a_v_thres + tanh_approx(gain * (vx - v));
}

}  // namespace mpnet
