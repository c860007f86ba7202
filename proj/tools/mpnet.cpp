// Command-line front end: train, rollout, tasks list, report.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mpnet/config.hpp"
#include "mpnet/io.hpp"
#include "mpnet/report.hpp"
#include "mpnet/tshc.hpp"

namespace fs = std::filesystem;
using namespace mpnet;

namespace {

double key_kmh(double vx0) { return std::round(vx0 * 3.6 * 1e6) / 1e6; }

std::string params_file_name(double kmh) {
  std::ostringstream name;
  name << "params_vx0_" << format_double(kmh) << "kmh.txt";
  return name.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

RunConfig resolve_config(const std::string& config_path, const CliOverrides& cli) {
  if (!config_path.empty()) return load_run_config(config_path, cli);
  if (!cli.preset) throw ConfigError(0, "either --config or --preset is required");
  return parse_run_config("{}", cli);
}

int cmd_train(const std::string& config_path, const CliOverrides& cli) {
  const RunConfig cfg = resolve_config(config_path, cli);
  const std::vector<Task> tasks = generate(cfg.tasks, cfg.train.vehicle);

  std::vector<SubsetReport> reports;
  NetBank bank;
  if (cfg.scheduling) {
    ScheduledResult result = train_scheduled(tasks, cfg.train, cfg.overrides);
    bank = std::move(result.bank);
    for (auto& [vx0, rep] : result.reports) reports.emplace_back(key_kmh(vx0), std::move(rep));
  } else {
    TrainResult result = train(tasks, cfg.train);
    bank.entries.push_back({0.0, std::move(result.best)});
    reports.emplace_back(kAllTasksKey, std::move(result.report));
  }

  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  write_file(dir / "config.json", dump_run_config(cfg));
  for (std::size_t i = 0; i < bank.entries.size(); ++i) {
    std::ostringstream params;
    write_params(params, bank.entries[i].params);
    write_file(dir / (cfg.scheduling ? params_file_name(reports[i].first) : std::string("params.txt")), params.str());
  }
  std::ostringstream bank_text, records, summary;
  write_bank(bank_text, bank);
  write_records_csv(records, reports);
  write_summary_csv(summary, reports);
  write_file(dir / "bank.txt", bank_text.str());
  write_file(dir / "records.csv", records.str());
  write_file(dir / "summary.csv", summary.str());
  const std::string md = render_markdown(reports);
  write_file(dir / "report.md", md);
  std::cout << md;
  return 0;
}

int cmd_report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  std::ifstream records(dir / "records.csv"), summary(dir / "summary.csv");
  if (!records || !summary) throw std::runtime_error("run directory '" + run_dir + "' lacks records.csv/summary.csv");
  const std::string md = render_markdown(read_reports(records, summary));
  write_file(dir / "report.md", md);
  std::cout << md;
  return 0;
}

int cmd_tasks_list(const std::string& config_path, const CliOverrides& cli, const std::string& out_path) {
  const RunConfig cfg = resolve_config(config_path, cli);
  const std::vector<Task> tasks = generate(cfg.tasks, cfg.train.vehicle);
  std::ostringstream out;
  out << "index,vx0_kmh,v_goal_kmh,x_goal,y_goal,phi_goal,a0_init,a1_init,check\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Task& t = tasks[i];
    out << i << ',' << format_double(key_kmh(t.vx0)) << ',' << format_double(key_kmh(t.v_goal)) << ','
        << format_double(t.x_goal) << ',' << format_double(t.y_goal) << ',' << format_double(t.phi_goal) << ','
        << format_double(t.a_init.a0) << ',' << format_double(t.a_init.a1) << ','
        << (t.check == CheckKind::pose3 ? "pose3" : "lateral") << '\n';
  }
  if (out_path.empty() || out_path == "-") {
    std::cout << out.str();
  } else {
    write_file(out_path, out.str());
  }
  return 0;
}

struct TaskSpec {
  double vx0_kmh = 0.0;
  std::optional<double> vgoal_kmh;
  double x_goal = 0.0;
  double y_goal = 0.0;
  double phi_goal = 0.0;
  double a0 = 0.0;
  double a1_offset = 0.0;
  std::string check;
};

int cmd_rollout(const std::string& bank_path, std::string config_path, const TaskSpec& spec,
                const std::string& out_path) {
  std::ifstream bank_in(bank_path);
  if (!bank_in) throw std::runtime_error("cannot read bank file '" + bank_path + "'");
  const NetBank bank = read_bank(bank_in);
  if (config_path.empty()) config_path = (fs::path(bank_path).parent_path() / "config.json").string();
  const RunConfig cfg = load_run_config(config_path);

  Task task;
  task.vx0 = spec.vx0_kmh / 3.6;
  task.v_goal = spec.vgoal_kmh.value_or(spec.vx0_kmh) / 3.6;
  task.x_goal = spec.x_goal;
  task.y_goal = spec.y_goal;
  task.phi_goal = spec.phi_goal;
  task.a_init = {spec.a0, cfg.train.vehicle.a_v_thres() + spec.a1_offset};
  if (spec.check.empty()) {
    task.check = cfg.tasks.kind == TaskKind::longitudinal ? CheckKind::pose3 : CheckKind::lateral;
  } else if (spec.check == "pose3" || spec.check == "lateral") {
    task.check = spec.check == "pose3" ? CheckKind::pose3 : CheckKind::lateral;
  } else {
    throw std::invalid_argument("--check must be pose3 or lateral");
  }

  const RolloutResult result = deploy(bank, task, cfg.train);
  std::ostringstream csv;
  write_trajectory_csv(csv, result);
  if (out_path.empty() || out_path == "-") {
    std::cout << csv.str();
  } else {
    write_file(out_path, csv.str());
    std::cout << "solved=" << (result.solved ? "true" : "false") << " steps=" << result.steps
              << " pathlen=" << format_double(result.pathlen) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encode motion primitives in tiny neural controllers by hill climbing"};
  app.require_subcommand(1);

  std::string config_path, out, run_dir, bank_path, out_csv;
  std::string preset;
  std::uint64_t seed = 0;
  int workers = 0;

  auto* train = app.add_subcommand("train", "Train a controller (or a velocity-scheduled bank)");
  train->add_option("--config", config_path, "Run configuration (JSON)");
  train->add_option("--preset", preset, "Experiment preset, e.g. exp1-kinematic-s6-vvc");
  train->add_option("--seed", seed, "Master seed");
  train->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  train->add_option("--out", out, "Output directory");

  auto* rollout_cmd = app.add_subcommand("rollout", "Roll out one task with a trained bank and dump the trajectory");
  TaskSpec spec;
  rollout_cmd->add_option("--bank", bank_path, "bank.txt or params file")->required();
  rollout_cmd->add_option("--config", config_path, "Run configuration (default: config.json next to the bank)");
  rollout_cmd->add_option("--vx0-kmh", spec.vx0_kmh, "Initial velocity [km/h]");
  rollout_cmd->add_option("--vgoal-kmh", spec.vgoal_kmh, "Goal velocity [km/h] (default: vx0)");
  rollout_cmd->add_option("--x-goal", spec.x_goal, "Goal x [m]");
  rollout_cmd->add_option("--y-goal", spec.y_goal, "Goal y [m]; negative goals are mirrored");
  rollout_cmd->add_option("--phi-goal", spec.phi_goal, "Goal heading [rad]");
  rollout_cmd->add_option("--a0", spec.a0, "Initial normalized steering");
  rollout_cmd->add_option("--a1-offset", spec.a1_offset, "Initial longitudinal command relative to zero torque");
  rollout_cmd->add_option("--check", spec.check, "Goal check: pose3 or lateral (default: from config)");
  rollout_cmd->add_option("--out", out_csv, "Trajectory CSV (default: stdout)");

  auto* tasks_cmd = app.add_subcommand("tasks", "Task grid utilities");
  tasks_cmd->require_subcommand(1);
  auto* list = tasks_cmd->add_subcommand("list", "Dump the expanded task grid as CSV");
  list->add_option("--config", config_path, "Run configuration (JSON)");
  list->add_option("--preset", preset, "Experiment preset");
  list->add_option("--out", out_csv, "CSV path (default: stdout)");

  auto* report = app.add_subcommand("report", "Regenerate report.md from a run's CSV records");
  report->add_option("--run", run_dir, "Run directory")->required();

  CLI11_PARSE(app, argc, argv);

  CliOverrides cli;
  if (!preset.empty()) cli.preset = preset;
  if (!out.empty()) cli.output_dir = out;
  try {
    if (*train) {
      if (train->count("--seed")) cli.seed = seed;
      if (train->count("--workers")) cli.workers = workers;
      return cmd_train(config_path, cli);
    }
    if (*rollout_cmd) return cmd_rollout(bank_path, config_path, spec, out_csv);
    if (*list) return cmd_tasks_list(config_path, cli, out_csv);
    if (*report) return cmd_report(run_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
