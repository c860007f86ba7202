#pragma once

#include "mpnet/vehicle.hpp"

namespace mpnet {

/// Velocity corridor half-width around the goal velocity.
inline constexpr double kVvcMargin = 5.0 / 3.6;

struct VvcContext {
  double v_goal = 0.0;
  double a_v_thres = 0.0;
  double vmin = 0.0;
  double vmax = 0.0;

  static VvcContext make(double v_goal, const VehicleParams& params) {
    return {v_goal, params.a_v_thres(), params.vmin, params.vmax};
  }
};

/// Commanded velocity of the longitudinal channel, projected into the corridor.
double vvc_velocity(double a1_raw, const VvcContext& ctx);

/// Filters the network's longitudinal output. Kinematic: maps the projected
/// velocity back to a normalized command. Dynamic: a_thres + tanh(gain * (vx - v~)).
double apply_vvc(double a1_raw, double vx, const VvcContext& ctx, double gain, ModelKind kind);

}  // namespace mpnet
