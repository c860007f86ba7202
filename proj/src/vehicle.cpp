#include "mpnet/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpnet {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string("vehicle parameter ") + name + " must be positive and finite");
  }
}

}  // namespace

void validate(const VehicleParams& p) {
  for (auto [value, name] : {std::pair{p.Ts, "Ts"}, {p.delta_max, "delta_max"}, {p.ddelta_max, "ddelta_max"},
                             {p.Ta_max, "Ta_max"}, {p.dTa_max, "dTa_max"}, {p.m, "m"}, {p.Iz, "Iz"},
                             {p.Iw, "Iw"}, {p.Ix, "Ix"}, {p.Iy, "Iy"}, {p.lf, "lf"}, {p.lr, "lr"},
                             {p.lw, "lw"}, {p.h, "h"}, {p.re, "re"}, {p.g, "g"}, {p.ks, "ks"}, {p.cs, "cs"},
                             {p.rhoAfcd05, "rhoAfcd05"}, {p.B, "B"}, {p.C, "C"}, {p.D, "D"}, {p.L, "L"},
                             {p.vmax, "vmax"}, {p.kin_accel, "kin_accel"}, {p.kin_decel, "kin_decel"}}) {
    require_positive(value, name);
  }
  if (!(p.Ta_min < 0.0) || !(p.dTa_min < 0.0)) {
    throw std::invalid_argument("vehicle parameters Ta_min and dTa_min must be negative");
  }
  if (!(p.vmin < p.vmax) || !std::isfinite(p.vmin)) {
    throw std::invalid_argument("vehicle parameter vmin must be finite and below vmax");
  }
}

std::array<double, 16> DynState16::to_array() const {
  return {x,     y,          phi,    vx,     vy,     omega_phi, psi, omega_psi,
          phi_p, omega_phip, omega1, omega2, omega3, omega4,    eta, v_eta};
}

DynState16 DynState16::from_array(const std::array<double, 16>& z) {
  return {z[0], z[1], z[2], z[3], z[4], z[5], z[6], z[7], z[8], z[9], z[10], z[11], z[12], z[13], z[14], z[15]};
}

bool DynState16::finite() const {
  const auto z = to_array();
  return std::all_of(z.begin(), z.end(), [](double v) { return std::isfinite(v); });
}

double wrap_angle(double angle) {
  double wrapped = std::fmod(angle, kTwoPi);
  if (wrapped < 0.0) wrapped += kTwoPi;
  if (wrapped >= kTwoPi) wrapped = 0.0;  // -tiny + 2*pi rounding up
  return wrapped;
}

double wrap_signed(double angle) {
  double wrapped = wrap_angle(angle);
  if (wrapped > std::numbers::pi) wrapped -= kTwoPi;
  return wrapped;
}

RateBounds rate_bounds(const VehicleParams& p, ModelKind kind) {
  RateBounds r;
  r.steer = p.ddelta_max / p.delta_max;
  if (kind == ModelKind::dynamic) {
    r.long_up = p.dTa_max * 2.0 / (p.Ta_max - p.Ta_min);
    r.long_down = p.dTa_min * 2.0 / (p.Ta_max - p.Ta_min);
  } else {
    r.long_up = p.kin_accel * 2.0 / (p.vmax - p.vmin);
    r.long_down = -p.kin_decel * 2.0 / (p.vmax - p.vmin);
  }
  return r;
}

std::optional<NormControl> apply_actuator_limits(std::array<double, 2> a_raw, const NormControl& a_prev,
                                                 const VehicleParams& p, ModelKind kind) {
  if (!std::isfinite(a_raw[0]) || !std::isfinite(a_raw[1])) return std::nullopt;
  const RateBounds r = rate_bounds(p, kind);
  NormControl a;
  a.a0 = std::clamp(a_raw[0], a_prev.a0 - p.Ts * r.steer, a_prev.a0 + p.Ts * r.steer);
  a.a1 = std::clamp(a_raw[1], a_prev.a1 + p.Ts * r.long_down, a_prev.a1 + p.Ts * r.long_up);
  a.a0 = std::clamp(a.a0, -1.0, 1.0);
  a.a1 = std::clamp(a.a1, -1.0, 1.0);
  return a;
}

DynamicCommand map_controls_dynamic(const NormControl& a, const VehicleParams& p) {
  return {p.delta_max * a.a0, p.Ta_min + 0.5 * (p.Ta_max - p.Ta_min) * (a.a1 + 1.0)};
}

KinematicCommand map_controls_kinematic(const NormControl& a, const VehicleParams& p) {
  return {p.delta_max * a.a0, p.vmin + (a.a1 + 1.0) / 2.0 * (p.vmax - p.vmin)};
}

double normalize_velocity(double v, const VehicleParams& p) {
  return (v - p.vmin) / (p.vmax - p.vmin) * 2.0 - 1.0;
}

KinState3 step_kinematic(const KinState3& s, const NormControl& a, const VehicleParams& p) {
  const auto [delta, v] = map_controls_kinematic(a, p);
  KinState3 next;
  next.x = s.x + p.Ts * v * std::cos(s.phi);
  next.y = s.y + p.Ts * v * std::sin(s.phi);
  next.phi = wrap_angle(s.phi + p.Ts * v / p.L * std::tan(delta));
  return next;
}

DynamicStep step_dynamic16(const DynState16& s, const NormControl& a, const VehicleParams& p) {
  DynamicStep out;
  auto z = s.to_array();
  ForceBreakdown& f = out.forces;

  const double avthres = p.a_v_thres();
  const double Tamaxmin05 = 0.5 * (p.Ta_max - p.Ta_min);
  const double lf_div_lfplr = p.lf / (p.lf + p.lr);
  const double lr_div_lfplr = p.lr / (p.lf + p.lr);
  const double mg05lr_div_lfplr = 0.5 * p.m * p.g * lr_div_lfplr;
  const double mg05lf_div_lfplr = 0.5 * p.m * p.g * lf_div_lfplr;

  // Full stop: |vx| < 1 km/h with no ac/deceleration command.
  if (z[3] < 1 / 3.6 && z[3] > -1 / 3.6 && a.a1 < avthres + 0.001 && a.a1 > avthres - 0.001) {
    for (int i = 3; i < 16; ++i) z[i] = 0.0;
    const double Feta_front = mg05lr_div_lfplr;
    const double Feta_rear = mg05lf_div_lfplr;
    f.Feta = {Feta_front, Feta_front, Feta_rear, Feta_rear};
    out.state = DynState16::from_array(z);
    return out;
  }

  // Reinitialize vx near zero velocity to keep the slip denominators away from the pole.
  if (z[3] < 0.1 / 3.6 && z[3] > -0.1 / 3.6 && a.a1 > avthres) {
    z[3] = 1 / 3.6;
    z[10] = z[11] = z[12] = z[13] = z[3] / p.re;
  } else if (z[3] < 0.1 / 3.6 && z[3] > -0.1 / 3.6 && a.a1 < avthres) {
    z[3] = -1 / 3.6;
    z[10] = z[11] = z[12] = z[13] = z[3] / p.re;
  }
  const double sign_fb = z[3] < 0 ? -1.0 : 1.0;

  const double delta = p.delta_max * a.a0;
  const double Ta = p.Ta_min + Tamaxmin05 * (a.a1 + 1.0);
  double Ta1 = 0, Ta2 = 0, Tb1 = 0, Tb2 = 0, Tb3 = 0, Tb4 = 0;
  if (Ta >= 0) {
    Ta1 = 0.5 * Ta;
    Ta2 = 0.5 * Ta;
  } else {
    Tb1 = -lf_div_lfplr * Ta;
    Tb2 = -lf_div_lfplr * Ta;
    Tb3 = -lr_div_lfplr * Ta;
    Tb4 = -lr_div_lfplr * Ta;
  }

  const double beta = std::atan2(z[4], z[3]);
  const double Fair = p.rhoAfcd05 * (z[3] * z[3] + z[4] * z[4]);
  const double Fxair = Fair * std::cos(beta);
  const double Fyair = Fair * std::sin(beta);

  const double sin_roll = std::sin(z[6]), cos_roll = std::cos(z[6]);
  const double sin_pitch = std::sin(z[8]), cos_pitch = std::cos(z[8]);
  const double Feta1 = mg05lr_div_lfplr - p.ks * (z[14] - p.lf * sin_pitch + p.lw * sin_roll) -
                       p.cs * (z[15] - z[9] * p.lf * cos_pitch + p.lw * z[7] * cos_roll);
  const double Feta2 = mg05lr_div_lfplr - p.ks * (z[14] - p.lf * sin_pitch - p.lw * sin_roll) -
                       p.cs * (z[15] - z[9] * p.lf * cos_pitch - p.lw * z[7] * cos_roll);
  const double Feta3 = mg05lf_div_lfplr - p.ks * (z[14] + p.lf * sin_pitch + p.lw * sin_roll) -
                       p.cs * (z[15] + z[9] * p.lf * cos_pitch + p.lw * z[7] * cos_roll);
  const double Feta4 = mg05lf_div_lfplr - p.ks * (z[14] + p.lf * sin_pitch - p.lw * sin_roll) -
                       p.cs * (z[15] + z[9] * p.lf * cos_pitch - p.lw * z[7] * cos_roll);

  // Pacejka magic formula in the tire frame; zero force below the slip guard.
  auto tire = [&](double sx, double sy, double Feta, double& Fxw, double& Fyw) {
    const double slip = std::sqrt(sx * sx + sy * sy);
    if (slip > 0.001) {
      const double mf = p.D * std::sin(p.C * std::atan(p.B * slip));
      Fxw = -sign_fb * sx * mf * Feta / slip;
      Fyw = -sign_fb * sy * mf * Feta / slip;
    } else {
      Fxw = 0.0;
      Fyw = 0.0;
    }
    return slip;
  };

  const double cos_beta = std::cos(beta);
  const double cos_bd = std::cos(beta - delta), sin_bd = std::sin(beta - delta);
  const double sin_delta = std::sin(delta), cos_delta = std::cos(delta);

  double Fxw1, Fyw1, Fxw2, Fyw2, Fxw3, Fyw3, Fxw4, Fyw4;
  const double v1x = z[3] * cos_bd / cos_beta + z[5] * p.lf * sin_delta - z[5] * p.lw * cos_bd / cos_beta;
  const double s1x = (v1x - z[10] * p.re) / v1x;
  const double s1y = (z[3] * sin_bd / cos_beta + z[5] * p.lf * cos_delta + z[5] * p.lw * sin_bd / cos_beta) / v1x;
  f.slip[0] = tire(s1x, s1y, Feta1, Fxw1, Fyw1);

  const double v2x = z[3] * cos_bd / cos_beta + z[5] * p.lf * sin_delta + z[5] * p.lw * cos_bd / cos_beta;
  const double s2x = (v2x - z[11] * p.re) / v2x;
  const double s2y = (z[3] * sin_bd / cos_beta + z[5] * p.lf * cos_delta - z[5] * p.lw * sin_bd / cos_beta) / v2x;
  f.slip[1] = tire(s2x, s2y, Feta2, Fxw2, Fyw2);

  const double v3x = z[3] - z[5] * p.lw;
  const double s3x = (v3x - z[12] * p.re) / v3x;
  const double s3y = (z[4] - z[5] * p.lr) / v3x;
  f.slip[2] = tire(s3x, s3y, Feta3, Fxw3, Fyw3);

  const double v4x = z[3] + z[5] * p.lw;
  const double s4x = (v4x - z[13] * p.re) / v4x;
  const double s4y = (z[4] - z[5] * p.lr) / v4x;
  f.slip[3] = tire(s4x, s4y, Feta4, Fxw4, Fyw4);

  // Vehicle-aligned frame.
  const double Fx1 = (Fxw1 * cos_delta - Fyw1 * sin_delta) * cos_pitch - Feta1 * sin_pitch;
  const double Fx2 = (Fxw2 * cos_delta - Fyw2 * sin_delta) * cos_pitch - Feta2 * sin_pitch;
  const double Fx3 = Fxw3 * cos_pitch - Feta3 * sin_pitch;
  const double Fx4 = Fxw4 * cos_pitch - Feta4 * sin_pitch;
  const double Fy1 = (Fxw1 * cos_delta - Fyw1 * sin_delta) * sin_roll * sin_pitch +
                     (Fyw1 * cos_delta + Fxw1 * sin_delta) * cos_roll + Feta1 * sin_roll * cos_pitch;
  const double Fy2 = (Fxw2 * cos_delta - Fyw2 * sin_delta) * sin_roll * sin_pitch +
                     (Fyw2 * cos_delta + Fxw2 * sin_delta) * cos_roll + Feta2 * sin_roll * cos_pitch;
  const double Fy3 = Fxw3 * sin_roll * sin_pitch + Fyw3 * cos_roll + Feta3 * sin_roll * cos_pitch;
  const double Fy4 = Fxw4 * sin_roll * sin_pitch + Fyw4 * cos_roll + Feta4 * sin_roll * cos_pitch;

  // Euler forward, updated in place in the published order (z[4] sees the new z[3]).
  z[0] = z[0] + p.Ts * (z[3] * std::cos(z[2]) - z[4] * std::sin(z[2]));
  z[1] = z[1] + p.Ts * (z[3] * std::sin(z[2]) + z[4] * std::cos(z[2]));
  z[2] = z[2] + p.Ts * z[5];
  z[3] = z[3] + p.Ts * ((Fx1 + Fx2 + Fx3 + Fx4 - Fxair) / p.m + z[4] * z[5]);
  z[4] = z[4] + p.Ts * ((Fy1 + Fy2 + Fy3 + Fy4 - Fyair) / p.m - z[3] * z[5]);
  z[5] = z[5] + p.Ts * (p.lf * (Fy1 + Fy2) - p.lr * (Fy3 + Fy4) + p.lw * (Fx2 + Fx4 - Fx1 - Fx3)) / p.Iz;
  z[6] = z[6] + p.Ts * z[7];
  z[7] = z[7] + p.Ts * (p.lw * (Feta1 + Feta3 - Feta2 - Feta4) + p.h * (Fy1 + Fy2 + Fy3 + Fy4)) / p.Ix;
  z[8] = z[8] + p.Ts * z[9];
  z[9] = z[9] + p.Ts * (p.lr * (Feta3 + Feta4) - p.lf * (Feta1 + Feta2) - p.h * (Fx1 + Fx2 + Fx3 + Fx4)) / p.Iy;
  z[10] = z[10] + p.Ts * (Ta1 - Tb1 - p.re * Fxw1) / p.Iw;
  z[11] = z[11] + p.Ts * (Ta2 - Tb2 - p.re * Fxw2) / p.Iw;
  z[12] = z[12] + p.Ts * (0 - Tb3 - p.re * Fxw3) / p.Iw;
  z[13] = z[13] + p.Ts * (0 - Tb4 - p.re * Fxw4) / p.Iw;
  z[14] = z[14] + p.Ts * z[15];
  z[15] = z[15] + p.Ts * ((Feta1 + Feta2 + Feta3 + Feta4) / p.m - p.g);

  f.Fxw = {Fxw1, Fxw2, Fxw3, Fxw4};
  f.Fyw = {Fyw1, Fyw2, Fyw3, Fyw4};
  f.Feta = {Feta1, Feta2, Feta3, Feta4};
  f.Fx = {Fx1, Fx2, Fx3, Fx4};
  f.Fy = {Fy1, Fy2, Fy3, Fy4};
  f.Fxair = Fxair;
  f.Fyair = Fyair;
  f.beta = beta;

  out.state = DynState16::from_array(z);
  if (!out.state.finite()) {
    out.diverged = true;
    return out;
  }
  out.state.phi = wrap_angle(out.state.phi);
  out.state.psi = wrap_angle(out.state.psi);
  out.state.phi_p = wrap_angle(out.state.phi_p);
  return out;
}

double pathlength_increment(double x0, double y0, double x1, double y1) {
  const double dx = x1 - x0;
  const double dy = y1 - y0;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace mpnet
