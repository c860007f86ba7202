#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mpnet/vehicle.hpp"

namespace mpnet {

enum class CheckKind { pose3, lateral };

/// One motion primitive: start velocity, goal pose/velocity, previous controls.
struct Task {
  double vx0 = 0.0;
  double v_goal = 0.0;
  double x_goal = 0.0;
  double y_goal = 0.0;
  double phi_goal = 0.0;
  NormControl a_init;
  CheckKind check = CheckKind::lateral;

  bool operator==(const Task&) const = default;
};

enum class FeatureVariant { s4, s5, s6, s7, s5x };

std::string to_string(FeatureVariant variant);
FeatureVariant parse_feature_variant(const std::string& name);
int feature_dim(FeatureVariant variant);

struct FeatureConfig {
  FeatureVariant variant = FeatureVariant::s4;
  double dx_n = 50.0;
  double dy_n = 3.5;
  double dphi_n = 1.5707963267948966;  // pi / 2
  double vx_n = 120.0 / 3.6;
};

struct Tolerances {
  double eps_d = 0.25;
  double eps_phi = 5.0 * 1.7453292519943295e-2;  // 5 deg
  double eps_v = 5.0 / 3.6;
};

/// Pose and longitudinal velocity as seen by features and goal checks.
struct VehicleView {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double vx = 0.0;
};

inline VehicleView view_of(const DynState16& s) { return {s.x, s.y, s.phi, s.vx}; }
inline VehicleView view_of(const KinState3& s, double v) { return {s.x, s.y, s.phi, v}; }

/// Longitudinal grid: goals vx0 + dv (capped to [0, 120] km/h), goal distance
/// from the 0.8/0.6-scaled constant-acceleration profile.
std::vector<Task> gen_tasks_exp1(const VehicleParams& params, const std::vector<double>& vx0_kmh,
                                 const std::vector<double>& dv_kmh);
std::vector<Task> gen_tasks_exp1(const VehicleParams& params);
std::vector<double> exp1_vx0_kmh();
std::vector<double> exp1_dv_kmh();

struct LateralGrid {
  double y_max = 3.5;
  double y_step = 0.25;
  std::vector<double> vx0_kmh;
  std::vector<double> dv_kmh;
  std::vector<double> a0;
  std::vector<double> a1_offsets;
};

LateralGrid exp2_grid();
LateralGrid exp4_grid();

/// Cartesian product of the grid; throws std::invalid_argument on empty or
/// non-dividing axes.
std::vector<Task> gen_tasks_lateral(const LateralGrid& grid, const VehicleParams& params);

std::map<double, std::vector<Task>> partition_by_velocity(const std::vector<Task>& tasks);

/// Writes the feature vector into `out` (size >= feature_dim) and returns its length.
int features_into(const VehicleView& state, const NormControl& a_prev, const Task& task, const FeatureConfig& cfg,
                  std::span<double> out);
std::vector<double> features(const VehicleView& state, const NormControl& a_prev, const Task& task,
                             const FeatureConfig& cfg);

/// Absolute slack on every tolerance comparison; absorbs the rounding of the
/// normalized-velocity round trip at the corridor edge.
inline constexpr double kGoalSlack = 1e-9;

bool goal_reached(const VehicleView& state, const Task& task, const Tolerances& tol);

inline double mirror_controls(double a0) { return -a0; }
Task mirror_task(const Task& task);

DynState16 initial_dynamic_state(const Task& task, const VehicleParams& params);

/// Previous-control vector fed into the first actuator-limit step. For the
/// kinematic model the longitudinal channel is a velocity, so it starts at vx0.
NormControl initial_controls(const Task& task, const VehicleParams& params, ModelKind kind);

}  // namespace mpnet
