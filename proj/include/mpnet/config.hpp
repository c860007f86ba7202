#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpnet/tasks.hpp"
#include "mpnet/tshc.hpp"

namespace mpnet {

/// Configuration problem, tagged with the 1-based line it was found on (0 if unknown).
class ConfigError : public std::runtime_error {
public:
  ConfigError(int line, const std::string& message);
  int line() const { return line_; }

private:
  int line_;
};

enum class TaskKind { longitudinal, lateral };

struct TaskSource {
  TaskKind kind = TaskKind::longitudinal;
  std::vector<double> vx0_kmh = exp1_vx0_kmh();
  std::vector<double> dv_kmh = exp1_dv_kmh();
  LateralGrid grid;
};

std::vector<Task> generate(const TaskSource& source, const VehicleParams& params);

struct RunConfig {
  std::string preset = "custom";
  TrainConfig train;
  std::vector<int> hidden{1};
  TaskSource tasks;
  bool scheduling = false;
  std::map<double, SubsetOverride> overrides;  // keyed by vx0 in m/s
  std::string output_dir = "run";
};

/// Expands a preset name such as "exp1-kinematic-s6-vvc" or "exp4-s5x".
RunConfig preset_config(const std::string& name);

struct CliOverrides {
  std::optional<std::string> preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output_dir;
};

/// Parses JSON config text: preset first, then file keys, then CLI flags.
/// Unknown keys are rejected. Throws ConfigError.
RunConfig parse_run_config(const std::string& text, const CliOverrides& cli = {});
RunConfig load_run_config(const std::string& path, const CliOverrides& cli = {});

/// Fully resolved config as JSON text with preset "custom"; parses back to the same RunConfig.
std::string dump_run_config(const RunConfig& cfg);

}  // namespace mpnet
