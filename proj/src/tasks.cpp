#include "mpnet/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpnet {

std::string to_string(FeatureVariant variant) {
  switch (variant) {
    case FeatureVariant::s4: return "s4";
    case FeatureVariant::s5: return "s5";
    case FeatureVariant::s6: return "s6";
    case FeatureVariant::s7: return "s7";
    case FeatureVariant::s5x: return "s5x";
  }
  return "?";
}

FeatureVariant parse_feature_variant(const std::string& name) {
  if (name == "s4") return FeatureVariant::s4;
  if (name == "s5") return FeatureVariant::s5;
  if (name == "s6") return FeatureVariant::s6;
  if (name == "s7") return FeatureVariant::s7;
  if (name == "s5x") return FeatureVariant::s5x;
  throw std::invalid_argument("unknown feature variant '" + name + "'");
}

int feature_dim(FeatureVariant variant) {
  switch (variant) {
    case FeatureVariant::s4: return 4;
    case FeatureVariant::s5: return 5;
    case FeatureVariant::s6: return 6;
    case FeatureVariant::s7: return 7;
    case FeatureVariant::s5x: return 5;
  }
  return 0;
}

std::vector<double> exp1_vx0_kmh() {
  std::vector<double> v;
  for (int k = 0; k <= 120; k += 5) v.push_back(k);
  return v;
}

std::vector<double> exp1_dv_kmh() { return {-25.0, -12.5, 0.0, 12.5, 25.0}; }

std::vector<Task> gen_tasks_exp1(const VehicleParams& params, const std::vector<double>& vx0_kmh,
                                 const std::vector<double>& dv_kmh) {
  if (vx0_kmh.empty() || dv_kmh.empty()) throw std::invalid_argument("empty longitudinal task grid");
  const double a_max = 100.0 / (3.6 * 7.4);
  const double a_min = -100.0 / (3.6 * 3.8);
  std::vector<Task> tasks;
  tasks.reserve(vx0_kmh.size() * dv_kmh.size());
  for (double v0_kmh : vx0_kmh) {
    for (double dv : dv_kmh) {
      const double vg_kmh = std::clamp(v0_kmh + dv, 0.0, 120.0);
      Task t;
      t.vx0 = v0_kmh / 3.6;
      t.v_goal = vg_kmh / 3.6;
      const double a = t.v_goal >= t.vx0 ? a_max : a_min;
      const double t_task = (t.v_goal - t.vx0) / (0.8 * a);
      t.x_goal = t.vx0 * t_task + 0.5 * 0.6 * a * t_task * t_task;
      t.a_init = {0.0, params.a_v_thres()};
      t.check = CheckKind::pose3;
      tasks.push_back(t);
    }
  }
  return tasks;
}

std::vector<Task> gen_tasks_exp1(const VehicleParams& params) {
  return gen_tasks_exp1(params, exp1_vx0_kmh(), exp1_dv_kmh());
}

LateralGrid exp2_grid() {
  LateralGrid g;
  for (int k = 0; k <= 120; k += 10) g.vx0_kmh.push_back(k);
  g.dv_kmh = {-10.0, 0.0, 10.0};
  g.a0 = {0.0};
  g.a1_offsets = {0.0};
  return g;
}

LateralGrid exp4_grid() {
  LateralGrid g = exp2_grid();
  g.a0 = {-0.5, -0.25, 0.0, 0.25, 0.5};
  g.a1_offsets = {-0.4, -0.2, 0.0, 0.2, 0.4};
  return g;
}

std::vector<Task> gen_tasks_lateral(const LateralGrid& grid, const VehicleParams& params) {
  if (grid.vx0_kmh.empty() || grid.dv_kmh.empty() || grid.a0.empty() || grid.a1_offsets.empty()) {
    throw std::invalid_argument("lateral task grid has an empty axis");
  }
  if (!(grid.y_step > 0.0) || !(grid.y_max >= 0.0)) {
    throw std::invalid_argument("lateral task grid needs y_step > 0 and y_max >= 0");
  }
  const double steps = grid.y_max / grid.y_step;
  const long long n_y = std::llround(steps);
  if (std::abs(steps - static_cast<double>(n_y)) > 1e-9) {
    throw std::invalid_argument("y_step does not divide y_max");
  }
  std::vector<Task> tasks;
  tasks.reserve(grid.vx0_kmh.size() * grid.dv_kmh.size() * static_cast<std::size_t>(n_y + 1) * grid.a0.size() *
                grid.a1_offsets.size());
  const double a_thres = params.a_v_thres();
  for (double v0 : grid.vx0_kmh) {
    for (double dv : grid.dv_kmh) {
      for (long long iy = 0; iy <= n_y; ++iy) {
        for (double a0 : grid.a0) {
          for (double off : grid.a1_offsets) {
            Task t;
            t.vx0 = v0 / 3.6;
            t.v_goal = (v0 + dv) / 3.6;
            t.y_goal = static_cast<double>(iy) * grid.y_step;
            t.a_init = {a0, a_thres + off};
            t.check = CheckKind::lateral;
            tasks.push_back(t);
          }
        }
      }
    }
  }
  return tasks;
}

std::map<double, std::vector<Task>> partition_by_velocity(const std::vector<Task>& tasks) {
  std::map<double, std::vector<Task>> subsets;
  for (const Task& t : tasks) subsets[t.vx0].push_back(t);
  return subsets;
}

int features_into(const VehicleView& s, const NormControl& a_prev, const Task& task, const FeatureConfig& cfg,
                  std::span<double> out) {
  const int dim = feature_dim(cfg.variant);
  if (out.size() < static_cast<std::size_t>(dim)) throw std::invalid_argument("feature buffer too small");
  const double dy = (task.y_goal - s.y) / cfg.dy_n;
  const double v = s.vx / cfg.vx_n;
  const double vg = task.v_goal / cfg.vx_n;
  switch (cfg.variant) {
    case FeatureVariant::s4:
    case FeatureVariant::s5x:
      out[0] = dy;
      out[1] = v;
      out[2] = vg;
      out[3] = a_prev.a0;
      if (cfg.variant == FeatureVariant::s5x) out[4] = a_prev.a1;
      break;
    case FeatureVariant::s5:
    case FeatureVariant::s6:
    case FeatureVariant::s7:
      out[0] = (task.x_goal - s.x) / cfg.dx_n;
      out[1] = dy;
      out[2] = wrap_signed(task.phi_goal - s.phi) / cfg.dphi_n;
      out[3] = v;
      out[4] = vg;
      if (dim >= 6) out[5] = a_prev.a0;
      if (dim >= 7) out[6] = a_prev.a1;
      break;
  }
  return dim;
}

std::vector<double> features(const VehicleView& state, const NormControl& a_prev, const Task& task,
                             const FeatureConfig& cfg) {
  std::vector<double> out(static_cast<std::size_t>(feature_dim(cfg.variant)));
  features_into(state, a_prev, task, cfg, out);
  return out;
}

bool goal_reached(const VehicleView& s, const Task& task, const Tolerances& tol) {
  if (!(std::abs(s.vx - task.v_goal) <= tol.eps_v + kGoalSlack)) return false;
  if (task.check == CheckKind::lateral) return std::abs(s.y - task.y_goal) <= tol.eps_d + kGoalSlack;
  const double dx = s.x - task.x_goal;
  const double dy = s.y - task.y_goal;
  return std::sqrt(dx * dx + dy * dy) <= tol.eps_d + kGoalSlack &&
         std::abs(wrap_signed(s.phi - task.phi_goal)) <= tol.eps_phi + kGoalSlack;
}

Task mirror_task(const Task& task) {
  Task m = task;
  m.y_goal = -task.y_goal;
  m.phi_goal = -task.phi_goal;
  m.a_init.a0 = mirror_controls(task.a_init.a0);
  return m;
}

DynState16 initial_dynamic_state(const Task& task, const VehicleParams& params) {
  DynState16 s;
  s.vx = task.vx0;
  s.omega1 = s.omega2 = s.omega3 = s.omega4 = task.vx0 / params.re;
  return s;
}

NormControl initial_controls(const Task& task, const VehicleParams& params, ModelKind kind) {
  NormControl a = task.a_init;
  if (kind == ModelKind::kinematic) a.a1 = std::clamp(normalize_velocity(task.vx0, params), -1.0, 1.0);
  return a;
}

}  // namespace mpnet
