#include "mpnet/tshc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mpnet/io.hpp"

namespace mpnet {

void TrainConfig::validate() const {
  if (n_restarts < 1 || n_iter_max < 1 || n_candidates < 1 || t_max < 1 || worker_count < 1) {
    throw std::invalid_argument("n_restarts, n_iter_max, n_candidates, t_max and workers must all be >= 1");
  }
  if (!(sigma_min > 0.0) || !(sigma_max >= sigma_min)) throw std::invalid_argument("invalid sigma range");
  if (!(tol.eps_d > 0.0) || !(tol.eps_phi > 0.0) || !(tol.eps_v > 0.0)) {
    throw std::invalid_argument("tolerances must be positive");
  }
  net.validate();
  if (net.inputs() != feature_dim(features.variant)) {
    throw std::invalid_argument("network input size " + std::to_string(net.inputs()) + " does not match feature " +
                                to_string(features.variant));
  }
  const bool wants_gain = model == ModelKind::dynamic && vvc_enabled;
  if (net.with_vvc != wants_gain) {
    throw std::invalid_argument(wants_gain ? "dynamic model with VVC needs the velocity-constraint parameter"
                                           : "velocity-constraint parameter is only used by the dynamic model with VVC");
  }
  mpnet::validate(vehicle);
}

RolloutResult rollout(const Policy& policy, double vvc_gain, const Task& task, const TrainConfig& cfg, bool record) {
  const VehicleParams& p = cfg.vehicle;
  const VvcContext vvc = VvcContext::make(task.v_goal, p);
  RolloutResult result;
  std::array<double, 8> feat{};

  NormControl a_prev = initial_controls(task, p, cfg.model);
  DynState16 dyn = initial_dynamic_state(task, p);
  KinState3 kin;
  double kin_v = task.vx0;

  auto view = [&] { return cfg.model == ModelKind::dynamic ? view_of(dyn) : view_of(kin, kin_v); };
  auto push = [&](const VehicleView& v, const NormControl& a) {
    if (!record) return;
    const bool d = cfg.model == ModelKind::dynamic;
    result.trajectory.push_back({result.steps * p.Ts, v.x, v.y, v.phi, v.vx, d ? dyn.vy : 0.0,
                                 d ? dyn.omega_phi : 0.0, a.a0, a.a1});
  };

  for (;;) {
    const VehicleView now = view();
    if (goal_reached(now, task, cfg.tol)) {
      result.solved = true;
      push(now, a_prev);
      break;
    }
    if (result.steps >= cfg.t_max) break;
    const int dim = features_into(now, a_prev, task, cfg.features, feat);
    std::array<double, 2> a_raw = policy(std::span<const double>(feat.data(), static_cast<std::size_t>(dim)));
    if (cfg.vvc_enabled) a_raw[1] = apply_vvc(a_raw[1], now.vx, vvc, vvc_gain, cfg.model);
    const auto a = apply_actuator_limits(a_raw, a_prev, p, cfg.model);
    if (!a) {
      result.diverged = true;
      break;
    }
    push(now, *a);
    if (cfg.model == ModelKind::dynamic) {
      const DynamicStep next = step_dynamic16(dyn, *a, p);
      if (next.diverged) {
        result.diverged = true;
        break;
      }
      result.pathlen += pathlength_increment(dyn.x, dyn.y, next.state.x, next.state.y);
      dyn = next.state;
    } else {
      const KinState3 next = step_kinematic(kin, *a, p);
      result.pathlen += pathlength_increment(kin.x, kin.y, next.x, next.y);
      kin = next;
      kin_v = map_controls_kinematic(*a, p).v;
    }
    a_prev = *a;
    ++result.steps;
  }
  return result;
}

RolloutResult rollout(const ParamVec& params, const Task& task, const TrainConfig& cfg, bool record) {
  Controller net(params.spec, params.theta);
  return rollout([&net](std::span<const double> s) { return net(s); }, params.vvc_gain(), task, cfg, record);
}

Score evaluate(const ParamVec& params, const std::vector<Task>& tasks, const TrainConfig& cfg) {
  Controller net(params.spec, params.theta);
  const Policy policy = [&net](std::span<const double> s) { return net(s); };
  Score score;
  double pathlen = 0.0;
  for (const Task& task : tasks) {
    const RolloutResult r = rollout(policy, params.vvc_gain(), task, cfg);
    if (r.solved) ++score.n_solved;
    pathlen += r.pathlen;
  }
  score.p_star = -pathlen;
  return score;
}

namespace {

std::uint32_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return to_seed(h);
}

}  // namespace

std::uint32_t candidate_seed(std::uint64_t master_seed, int restart, int iteration, int candidate) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(restart) + 1, static_cast<std::uint64_t>(iteration) + 1,
                     static_cast<std::uint64_t>(candidate) + 1);
}

std::uint32_t restart_seed(std::uint64_t master_seed, int restart) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(restart) + 1, 0, 0);
}

std::uint32_t coordinator_seed(std::uint64_t master_seed) { return derive_seed(master_seed, 0, 0, 0); }

ParamVec perturb(const ParamVec& base, double sigma, std::uint32_t seed) {
  Rng rng(seed);
  const std::vector<double> xi = rng.fill_gaussian(base.theta.size());
  ParamVec out = base;
  for (std::size_t k = 0; k < xi.size(); ++k) out.theta[k] += sigma * xi[k];
  return out;
}

double p_star_gain_pct(double first_p, double final_p) {
  if (first_p == 0.0) return 0.0;
  return (final_p - first_p) / std::abs(first_p) * 100.0;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), count);
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
  }
  if (error) std::rethrow_exception(error);
}

TrainResult train(const std::vector<Task>& tasks, const TrainConfig& cfg) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  TrainReport report;
  report.n_tasks = static_cast<int>(tasks.size());
  report.n_param = param_count(cfg.net);

  Rng coordinator(coordinator_seed(cfg.master_seed));
  std::optional<ParamVec> global_best;
  std::vector<Score> scores(static_cast<std::size_t>(cfg.n_candidates));
  const auto n_tasks = static_cast<int>(tasks.size());

  for (int r = 0; r < cfg.n_restarts; ++r) {
    Rng init_rng(restart_seed(cfg.master_seed, r));
    ParamVec theta = init_params(cfg.net, init_rng);
    Score incumbent = evaluate(theta, tasks, cfg);
    RestartSummary summary;
    summary.initial = incumbent;
    if (n_tasks > 0 && incumbent.n_solved == n_tasks) summary.first_all_solved_p_star = incumbent.p_star;

    for (int k = 0; k < cfg.n_iter_max; ++k) {
      const double sigma = cfg.sigma_min + (cfg.sigma_max - cfg.sigma_min) * coordinator.uniform();
      parallel_for(scores.size(), cfg.worker_count, [&](std::size_t i) {
        const ParamVec candidate = perturb(theta, sigma, candidate_seed(cfg.master_seed, r, k, static_cast<int>(i)));
        scores[i] = evaluate(candidate, tasks, cfg);
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < scores.size(); ++i) {
        if (score_better(scores[i], scores[best])) best = i;
      }
      IterationRecord rec;
      rec.restart = r;
      rec.iteration = k;
      rec.sigma = sigma;
      rec.best_index = static_cast<int>(best);
      rec.best_seed = candidate_seed(cfg.master_seed, r, k, static_cast<int>(best));
      rec.best_candidate = scores[best];
      if (score_better(scores[best], incumbent)) {
        theta = perturb(theta, sigma, rec.best_seed);
        incumbent = scores[best];
        rec.accepted = true;
        if (n_tasks > 0 && incumbent.n_solved == n_tasks && !summary.first_all_solved_p_star) {
          summary.first_all_solved_p_star = incumbent.p_star;
        }
      }
      rec.incumbent = incumbent;
      report.records.push_back(rec);
    }

    summary.final = incumbent;
    report.restarts.push_back(summary);
    if (n_tasks > 0 && incumbent.n_solved == n_tasks) ++report.n_rest_star;
    if (!global_best || score_better(incumbent, report.best)) {
      global_best = theta;
      report.best = incumbent;
      report.best_restart = r;
    }
  }

  const RestartSummary& best_run = report.restarts[static_cast<std::size_t>(report.best_restart)];
  if (best_run.first_all_solved_p_star) {
    report.dp_first_pct = p_star_gain_pct(*best_run.first_all_solved_p_star, best_run.final.p_star);
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {*global_best, report};
}

const BankEntry& bank_lookup(const NetBank& bank, double vx) {
  if (bank.entries.empty()) throw std::invalid_argument("network bank is empty");
  std::size_t best = 0;
  for (std::size_t i = 1; i < bank.entries.size(); ++i) {
    const double d_best = std::abs(vx - bank.entries[best].vx0);
    const double d_i = std::abs(vx - bank.entries[i].vx0);
    // Keys ascend, so a tie (up to rounding of km/h -> m/s) keeps the lower key.
    if (d_i < d_best - 1e-9) best = i;
  }
  return bank.entries[best];
}

RolloutResult deploy(const NetBank& bank, const Task& task, const TrainConfig& cfg) {
  const BankEntry& entry = bank_lookup(bank, task.vx0);
  if (task.y_goal >= 0.0) return rollout(entry.params, task, cfg, true);
  RolloutResult r = rollout(entry.params, mirror_task(task), cfg, true);
  for (TrajectoryPoint& p : r.trajectory) {
    p.y = -p.y;
    p.phi = p.phi == 0.0 ? 0.0 : wrap_angle(-p.phi);
    p.vy = -p.vy;
    p.omega_phi = -p.omega_phi;
    p.a0 = mirror_controls(p.a0);
  }
  return r;
}

std::uint64_t subset_seed(std::uint64_t master_seed, double vx0) {
  const auto key = static_cast<std::uint64_t>(std::llround(vx0 * 3.6 * 1000.0));
  return mix64(master_seed ^ mix64(key + 0x5eedull));
}

ScheduledResult train_scheduled(const std::vector<Task>& tasks, const TrainConfig& cfg,
                                const std::map<double, SubsetOverride>& overrides) {
  ScheduledResult result;
  for (const auto& [vx0, subset] : partition_by_velocity(tasks)) {
    TrainConfig sub = cfg;
    sub.master_seed = subset_seed(cfg.master_seed, vx0);
    for (const auto& [key, o] : overrides) {
      if (std::abs(key - vx0) > 1e-9) continue;
      if (o.t_max) sub.t_max = *o.t_max;
      if (o.n_iter_max) sub.n_iter_max = *o.n_iter_max;
      if (o.n_restarts) sub.n_restarts = *o.n_restarts;
      if (o.n_candidates) sub.n_candidates = *o.n_candidates;
    }
    TrainResult trained = train(subset, sub);
    result.bank.entries.push_back({vx0, std::move(trained.best)});
    result.reports.emplace_back(vx0, std::move(trained.report));
  }
  return result;
}

void write_bank(std::ostream& out, const NetBank& bank) {
  out << "mpnet-bank entries=" << bank.entries.size() << '\n';
  for (const BankEntry& e : bank.entries) {
    out << "vx0=" << format_double(e.vx0) << '\n';
    write_params(out, e.params);
  }
}

NetBank read_bank(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("bank file is empty");
  const std::string prefix = "mpnet-bank entries=";
  if (header.rfind(prefix, 0) != 0) {
    // A bare parameter file is a one-entry bank.
    if (header.rfind("mpnet-params", 0) == 0) {
      std::istringstream rest(header + '\n' + std::string(std::istreambuf_iterator<char>(in), {}));
      return NetBank{{BankEntry{0.0, read_params(rest)}}};
    }
    throw std::runtime_error("not a bank file: '" + header + "'");
  }
  const long long count = parse_int(header.substr(prefix.size()));
  NetBank bank;
  std::string line;
  for (long long i = 0; i < count; ++i) {
    if (!std::getline(in, line) || line.rfind("vx0=", 0) != 0) throw std::runtime_error("bank entry key missing");
    const double vx0 = parse_double(line.substr(4));
    if (!bank.entries.empty() && !(vx0 > bank.entries.back().vx0)) {
      throw std::runtime_error("bank keys must be strictly increasing");
    }
    bank.entries.push_back({vx0, read_params(in)});
  }
  if (bank.entries.empty()) throw std::runtime_error("bank file has no entries");
  return bank;
}

}  // namespace mpnet
