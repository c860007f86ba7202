#pragma once

#include <array>
#include <numbers>
#include <optional>

namespace mpnet {

enum class ModelKind { kinematic, dynamic };

/// Parameters of both vehicle models. Defaults describe a 1450 kg passenger
/// car for the 16-state model plus the kinematic wheelbase and velocity channel.
struct VehicleParams {
  double Ts = 0.01;
  double delta_max = 40.0 * std::numbers::pi / 180.0;
  double ddelta_max = 20.0 * std::numbers::pi / 180.0;
  double Ta_max = 1700.0;
  double Ta_min = -4000.0;
  double dTa_max = 1700.0;
  double dTa_min = -4000.0;
  double m = 1450.0;
  double Iz = 2741.9;
  double Iw = 1.8;
  double lf = 1.1;
  double lr = 1.59;
  double h = 0.4;
  double re = 0.3;
  double g = 9.81;
  double ks = 10000.0;
  double cs = 2000.0;
  double rhoAfcd05 = 0.5 * 1.225 * 0.7;
  double Ix = 500.0;
  double Iy = 2500.0;
  double lw = 0.81;
  double B = 7.0;
  double C = 1.6;
  double D = 1.0;
  double L = 2.69;
  double vmin = 0.0;
  double vmax = 130.0 / 3.6;
  // 0->100 km/h in 7.4 s and 100->0 km/h in 3.8 s for the kinematic velocity channel.
  double kin_accel = (100.0 / 3.6) / 7.4;
  double kin_decel = (100.0 / 3.6) / 3.8;

  /// Normalized longitudinal command at which the drive torque is zero.
  double a_v_thres() const { return -1.0 - 2.0 * Ta_min / (Ta_max - Ta_min); }
};

/// Throws std::invalid_argument when a parameter violates its sign constraint.
void validate(const VehicleParams& params);

struct KinState3 {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
};

/// z[0..15] of the 16-state model, in order.
struct DynState16 {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;  // yaw
  double vx = 0.0;
  double vy = 0.0;
  double omega_phi = 0.0;
  double psi = 0.0;  // roll
  double omega_psi = 0.0;
  double phi_p = 0.0;  // pitch
  double omega_phip = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double omega3 = 0.0;
  double omega4 = 0.0;
  double eta = 0.0;
  double v_eta = 0.0;

  std::array<double, 16> to_array() const;
  static DynState16 from_array(const std::array<double, 16>& z);
  bool finite() const;
};

struct NormControl {
  double a0 = 0.0;  // steering
  double a1 = 0.0;  // longitudinal

  bool operator==(const NormControl&) const = default;
};

struct ForceBreakdown {
  std::array<double, 4> Fxw{};
  std::array<double, 4> Fyw{};
  std::array<double, 4> Feta{};
  std::array<double, 4> Fx{};
  std::array<double, 4> Fy{};
  std::array<double, 4> slip{};
  double Fxair = 0.0;
  double Fyair = 0.0;
  double beta = 0.0;
};

struct DynamicStep {
  DynState16 state;
  ForceBreakdown forces;
  bool diverged = false;
};

/// Wraps an angle into [0, 2*pi).
double wrap_angle(double angle);

/// Wraps an angle difference into (-pi, pi].
double wrap_signed(double angle);

/// Normalized per-second rate bounds (down is negative) of both channels.
struct RateBounds {
  double steer = 0.0;
  double long_up = 0.0;
  double long_down = 0.0;
};
RateBounds rate_bounds(const VehicleParams& params, ModelKind kind);

/// Rate window around the previous command, then the absolute [-1, 1] box.
/// Returns nullopt for a non-finite raw command (diverged candidate).
std::optional<NormControl> apply_actuator_limits(std::array<double, 2> a_raw, const NormControl& a_prev,
                                                 const VehicleParams& params, ModelKind kind);

struct DynamicCommand {
  double delta = 0.0;
  double Ta = 0.0;
};
DynamicCommand map_controls_dynamic(const NormControl& a, const VehicleParams& params);

struct KinematicCommand {
  double delta = 0.0;
  double v = 0.0;
};
KinematicCommand map_controls_kinematic(const NormControl& a, const VehicleParams& params);

/// Inverse of the kinematic velocity mapping.
double normalize_velocity(double v, const VehicleParams& params);

KinState3 step_kinematic(const KinState3& s, const NormControl& a, const VehicleParams& params);

/// One Euler step of the 16-state model, including the full-stop special case
/// and the low-speed reinitialization. `a` must already be actuator-limited.
DynamicStep step_dynamic16(const DynState16& s, const NormControl& a, const VehicleParams& params);

double pathlength_increment(double x0, double y0, double x1, double y1);

}  // namespace mpnet
