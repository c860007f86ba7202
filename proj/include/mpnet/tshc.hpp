#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mpnet/nets.hpp"
#include "mpnet/tasks.hpp"
#include "mpnet/vehicle.hpp"
#include "mpnet/vvc.hpp"

namespace mpnet {

struct TrainConfig {
  int n_restarts = 10;
  int n_iter_max = 20;
  int n_candidates = 64;
  int t_max = 500;
  Tolerances tol;
  double sigma_min = 10.0;
  double sigma_max = 1000.0;
  ModelKind model = ModelKind::dynamic;
  NetSpec net;
  FeatureConfig features;
  bool vvc_enabled = true;
  std::uint64_t master_seed = 1;
  int worker_count = 1;
  VehicleParams vehicle;

  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Lexicographic fitness: tasks solved first, then the negative pathlength.
struct Score {
  int n_solved = 0;
  double p_star = 0.0;

  bool operator==(const Score&) const = default;
};

/// Strict: equal scores are not better.
inline bool score_better(const Score& a, const Score& b) {
  return a.n_solved > b.n_solved || (a.n_solved == b.n_solved && a.p_star > b.p_star);
}

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  double omega_phi = 0.0;
  double a0 = 0.0;  // command applied from this state on
  double a1 = 0.0;
};

struct RolloutResult {
  bool solved = false;
  bool diverged = false;
  double pathlen = 0.0;
  int steps = 0;
  std::vector<TrajectoryPoint> trajectory;
};

/// Maps a feature vector to an unclamped control pair.
using Policy = std::function<std::array<double, 2>(std::span<const double>)>;

/// Closed-loop episode: features -> policy -> velocity filter -> actuator
/// limits -> model step, until the goal is reached, t_max steps have run or
/// the state diverges. `vvc_gain` feeds the dynamic velocity law.
RolloutResult rollout(const Policy& policy, double vvc_gain, const Task& task, const TrainConfig& cfg,
                      bool record = false);
RolloutResult rollout(const ParamVec& params, const Task& task, const TrainConfig& cfg, bool record = false);

/// Sum over all tasks; unsolved tasks contribute the length they travelled.
Score evaluate(const ParamVec& params, const std::vector<Task>& tasks, const TrainConfig& cfg);

/// Candidate seed for (restart, iteration, candidate).
std::uint32_t candidate_seed(std::uint64_t master_seed, int restart, int iteration, int candidate);
std::uint32_t restart_seed(std::uint64_t master_seed, int restart);
std::uint32_t coordinator_seed(std::uint64_t master_seed);

/// theta + sigma * xi with xi regenerated from `seed`.
ParamVec perturb(const ParamVec& base, double sigma, std::uint32_t seed);

struct IterationRecord {
  int restart = 0;
  int iteration = 0;
  double sigma = 0.0;
  int best_index = 0;
  std::uint32_t best_seed = 0;
  Score best_candidate;
  bool accepted = false;
  Score incumbent;  // after this iteration

  bool operator==(const IterationRecord&) const = default;
};

struct RestartSummary {
  Score initial;
  Score final;
  std::optional<double> first_all_solved_p_star;

  bool operator==(const RestartSummary&) const = default;
};

struct TrainReport {
  int n_tasks = 0;
  std::size_t n_param = 0;
  std::vector<IterationRecord> records;
  std::vector<RestartSummary> restarts;
  Score best;
  int best_restart = 0;
  int n_rest_star = 0;
  /// Percentage gain of the final P* over the first all-solving P* of the best restart.
  std::optional<double> dp_first_pct;
  double wall_seconds = 0.0;  // informational, not deterministic
};

/// Percentage gain of `final_p` over `first_p` (both <= 0).
double p_star_gain_pct(double first_p, double final_p);

/// Runs `fn(i)` for i in [0, count) on `workers` threads.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

struct TrainResult {
  ParamVec best;
  TrainReport report;
};

/// Hill climbing with restarts. Bitwise-identical for every worker_count.
TrainResult train(const std::vector<Task>& tasks, const TrainConfig& cfg);

struct SubsetOverride {
  std::optional<int> t_max;
  std::optional<int> n_iter_max;
  std::optional<int> n_restarts;
  std::optional<int> n_candidates;
};

struct BankEntry {
  double vx0 = 0.0;
  ParamVec params;
};

/// Controllers keyed by initial velocity, keys strictly increasing.
struct NetBank {
  std::vector<BankEntry> entries;
};

/// Nearest key; an exact midpoint picks the lower key. Throws on an empty bank.
const BankEntry& bank_lookup(const NetBank& bank, double vx);

/// Deployment rollout with trajectory: picks the controller by the task's
/// initial velocity and mirrors tasks with y_goal < 0 onto y_goal > 0.
RolloutResult deploy(const NetBank& bank, const Task& task, const TrainConfig& cfg);

struct ScheduledResult {
  NetBank bank;
  std::vector<std::pair<double, TrainReport>> reports;
};

/// Seed used for the subset whose key is `vx0`; independent of the other subsets.
std::uint64_t subset_seed(std::uint64_t master_seed, double vx0);

/// One training run per initial-velocity subset. Override keys are in m/s and
/// match a subset key within 1e-9.
ScheduledResult train_scheduled(const std::vector<Task>& tasks, const TrainConfig& cfg,
                                const std::map<double, SubsetOverride>& overrides = {});

void write_bank(std::ostream& out, const NetBank& bank);
NetBank read_bank(std::istream& in);

}  // namespace mpnet
