#include "mpnet/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace mpnet {

using nlohmann::json;

ConfigError::ConfigError(int line, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

std::vector<Task> generate(const TaskSource& source, const VehicleParams& params) {
  if (source.kind == TaskKind::longitudinal) return gen_tasks_exp1(params, source.vx0_kmh, source.dv_kmh);
  return gen_tasks_lateral(source.grid, params);
}

namespace {

int default_workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(s);
  std::string part;
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

void finalize(RunConfig& cfg) {
  NetSpec& net = cfg.train.net;
  net.layers.clear();
  net.layers.push_back(feature_dim(cfg.train.features.variant));
  net.layers.insert(net.layers.end(), cfg.hidden.begin(), cfg.hidden.end());
  net.layers.push_back(2);
  net.with_vvc = cfg.train.model == ModelKind::dynamic && cfg.train.vvc_enabled;
}

ModelKind parse_model(const std::string& name) {
  if (name == "kinematic") return ModelKind::kinematic;
  if (name == "dynamic") return ModelKind::dynamic;
  throw std::invalid_argument("unknown model '" + name + "' (expected kinematic or dynamic)");
}

std::string model_name(ModelKind kind) { return kind == ModelKind::dynamic ? "dynamic" : "kinematic"; }

}  // namespace

RunConfig preset_config(const std::string& name) {
  const auto tokens = split(name, '-');
  if (tokens.empty()) throw std::invalid_argument("empty preset name");
  RunConfig cfg;
  cfg.preset = name;
  cfg.train.worker_count = default_workers();
  cfg.train.n_candidates = 64;
  std::size_t at = 1;
  const std::string& base = tokens[0];
  if (base == "exp1") {
    cfg.train.model = ModelKind::dynamic;
    cfg.train.features.variant = FeatureVariant::s6;
    cfg.train.net.arch = Arch::fscn;
    cfg.train.t_max = 500;
    cfg.train.n_restarts = 10;
    cfg.train.n_iter_max = 20;
    cfg.tasks.kind = TaskKind::longitudinal;
  } else if (base == "exp2" || base == "exp3") {
    cfg.train.model = ModelKind::dynamic;
    cfg.train.features.variant = FeatureVariant::s4;
    cfg.train.net.arch = Arch::fscn;
    cfg.train.t_max = base == "exp2" ? 500 : 1000;
    cfg.train.n_restarts = 10;
    cfg.train.n_iter_max = 20;
    cfg.tasks.kind = TaskKind::lateral;
    cfg.tasks.grid = exp2_grid();
    if (base == "exp3" && at < tokens.size() && tokens[at] == "arch") ++at;
  } else if (base == "exp4") {
    cfg.train.model = ModelKind::dynamic;
    cfg.train.features.variant = FeatureVariant::s4;
    cfg.train.net.arch = Arch::mlp;
    cfg.train.t_max = 1500;
    cfg.train.n_restarts = 5;
    cfg.train.n_iter_max = 5;
    cfg.tasks.kind = TaskKind::lateral;
    cfg.tasks.grid = exp4_grid();
    cfg.scheduling = true;
  } else if (base != "custom") {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  for (; at < tokens.size(); ++at) {
    const std::string& t = tokens[at];
    if (t == "kinematic" || t == "dynamic") {
      cfg.train.model = parse_model(t);
    } else if (t == "vvc" || t == "vvcs") {
      cfg.train.vvc_enabled = true;
    } else if (t == "novvc") {
      cfg.train.vvc_enabled = false;
    } else if (t == "mlp" || t == "scn" || t == "fscn") {
      cfg.train.net.arch = parse_arch(t);
    } else if (t == "sched") {
      cfg.scheduling = true;
    } else if (t == "nosched") {
      cfg.scheduling = false;
    } else {
      cfg.train.features.variant = parse_feature_variant(t);  // throws on anything else
    }
  }
  finalize(cfg);
  return cfg;
}

namespace {

int line_of(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

int line_at_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

class Reader {
public:
  explicit Reader(const std::string& text) : text_(text) {}

  template <class T>
  T get(const json& obj, const std::string& key) const {
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(line_of(text_, key), "bad value for '" + key + "': " + e.what());
    }
  }

  void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) throw ConfigError(line_of(text_, where), "'" + where + "' must be an object");
    for (const auto& item : obj.items()) {
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; }) ==
          allowed.end()) {
        throw ConfigError(line_of(text_, item.key()), "unknown key '" + item.key() + "' in " + where);
      }
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(line_of(text_, key), message);
  }

private:
  const std::string& text_;
};

const std::vector<std::pair<const char*, double VehicleParams::*>>& vehicle_fields() {
  static const std::vector<std::pair<const char*, double VehicleParams::*>> fields = {
      {"Ts", &VehicleParams::Ts},           {"delta_max", &VehicleParams::delta_max},
      {"ddelta_max", &VehicleParams::ddelta_max}, {"Ta_max", &VehicleParams::Ta_max},
      {"Ta_min", &VehicleParams::Ta_min},   {"dTa_max", &VehicleParams::dTa_max},
      {"dTa_min", &VehicleParams::dTa_min}, {"m", &VehicleParams::m},
      {"Iz", &VehicleParams::Iz},           {"Iw", &VehicleParams::Iw},
      {"lf", &VehicleParams::lf},           {"lr", &VehicleParams::lr},
      {"h", &VehicleParams::h},             {"re", &VehicleParams::re},
      {"g", &VehicleParams::g},             {"ks", &VehicleParams::ks},
      {"cs", &VehicleParams::cs},           {"rhoAfcd05", &VehicleParams::rhoAfcd05},
      {"Ix", &VehicleParams::Ix},           {"Iy", &VehicleParams::Iy},
      {"lw", &VehicleParams::lw},           {"B", &VehicleParams::B},
      {"C", &VehicleParams::C},             {"D", &VehicleParams::D},
      {"L", &VehicleParams::L},             {"vmin", &VehicleParams::vmin},
      {"vmax", &VehicleParams::vmax},       {"kin_accel", &VehicleParams::kin_accel},
      {"kin_decel", &VehicleParams::kin_decel},
  };
  return fields;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const CliOverrides& cli) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(line_at_byte(text, e.byte > 0 ? e.byte - 1 : 0), std::string("malformed config: ") + e.what());
  }
  const Reader r(text);
  r.check_keys(doc, "config",
               {"preset", "model", "features", "net", "vvc", "n_restarts", "n_iter_max", "n_candidates", "t_max",
                "tolerances", "sigma_range", "seed", "workers", "scheduling", "subset_overrides", "vehicle", "tasks",
                "output_dir"});

  std::string preset = "custom";
  if (doc.contains("preset")) preset = r.get<std::string>(doc, "preset");
  if (cli.preset) preset = *cli.preset;
  RunConfig cfg;
  try {
    cfg = preset_config(preset);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cli.preset ? 0 : line_of(text, "preset"), e.what());
  }
  TrainConfig& t = cfg.train;

  auto guarded = [&](const std::string& key, const std::function<void()>& fn) {
    if (!doc.contains(key)) return;
    try {
      fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(line_of(text, key), "bad value for '" + key + "': " + e.what());
    }
  };

  guarded("model", [&] { t.model = parse_model(r.get<std::string>(doc, "model")); });
  guarded("features", [&] { t.features.variant = parse_feature_variant(r.get<std::string>(doc, "features")); });
  guarded("net", [&] {
    const json& net = doc.at("net");
    r.check_keys(net, "net", {"arch", "hidden"});
    if (net.contains("arch")) t.net.arch = parse_arch(r.get<std::string>(net, "arch"));
    if (net.contains("hidden")) cfg.hidden = r.get<std::vector<int>>(net, "hidden");
  });
  guarded("vvc", [&] { t.vvc_enabled = r.get<bool>(doc, "vvc"); });
  guarded("n_restarts", [&] { t.n_restarts = r.get<int>(doc, "n_restarts"); });
  guarded("n_iter_max", [&] { t.n_iter_max = r.get<int>(doc, "n_iter_max"); });
  guarded("n_candidates", [&] { t.n_candidates = r.get<int>(doc, "n_candidates"); });
  guarded("t_max", [&] { t.t_max = r.get<int>(doc, "t_max"); });
  guarded("tolerances", [&] {
    const json& tol = doc.at("tolerances");
    r.check_keys(tol, "tolerances", {"eps_d", "eps_phi", "eps_v"});
    if (tol.contains("eps_d")) t.tol.eps_d = r.get<double>(tol, "eps_d");
    if (tol.contains("eps_phi")) t.tol.eps_phi = r.get<double>(tol, "eps_phi");
    if (tol.contains("eps_v")) t.tol.eps_v = r.get<double>(tol, "eps_v");
  });
  guarded("sigma_range", [&] {
    const auto range = r.get<std::vector<double>>(doc, "sigma_range");
    if (range.size() != 2) r.fail("sigma_range", "sigma_range needs exactly two values");
    t.sigma_min = range[0];
    t.sigma_max = range[1];
  });
  guarded("seed", [&] { t.master_seed = r.get<std::uint64_t>(doc, "seed"); });
  guarded("workers", [&] { t.worker_count = r.get<int>(doc, "workers"); });
  guarded("scheduling", [&] { cfg.scheduling = r.get<bool>(doc, "scheduling"); });
  guarded("output_dir", [&] { cfg.output_dir = r.get<std::string>(doc, "output_dir"); });
  guarded("vehicle", [&] {
    const json& v = doc.at("vehicle");
    if (!v.is_object()) r.fail("vehicle", "'vehicle' must be an object");
    for (const auto& item : v.items()) {
      const auto& fields = vehicle_fields();
      const auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& f) { return item.key() == f.first; });
      if (it == fields.end()) r.fail(item.key(), "unknown key '" + item.key() + "' in vehicle");
      t.vehicle.*(it->second) = r.get<double>(v, item.key());
    }
  });
  guarded("tasks", [&] {
    const json& tk = doc.at("tasks");
    r.check_keys(tk, "tasks", {"kind", "vx0_kmh", "dv_kmh", "y_max", "y_step", "a0", "a1_offsets"});
    if (tk.contains("kind")) {
      const auto kind = r.get<std::string>(tk, "kind");
      if (kind == "longitudinal") {
        if (cfg.tasks.kind != TaskKind::longitudinal) cfg.tasks = TaskSource{};
      } else if (kind == "lateral") {
        if (cfg.tasks.kind != TaskKind::lateral) {
          cfg.tasks.kind = TaskKind::lateral;
          cfg.tasks.grid = exp2_grid();
        }
      } else {
        r.fail("kind", "tasks.kind must be 'longitudinal' or 'lateral'");
      }
    }
    const bool lateral = cfg.tasks.kind == TaskKind::lateral;
    if (!lateral) {
      for (const char* k : {"y_max", "y_step", "a0", "a1_offsets"}) {
        if (tk.contains(k)) r.fail(k, std::string("'") + k + "' only applies to lateral tasks");
      }
    }
    if (tk.contains("vx0_kmh")) {
      (lateral ? cfg.tasks.grid.vx0_kmh : cfg.tasks.vx0_kmh) = r.get<std::vector<double>>(tk, "vx0_kmh");
    }
    if (tk.contains("dv_kmh")) {
      (lateral ? cfg.tasks.grid.dv_kmh : cfg.tasks.dv_kmh) = r.get<std::vector<double>>(tk, "dv_kmh");
    }
    if (tk.contains("y_max")) cfg.tasks.grid.y_max = r.get<double>(tk, "y_max");
    if (tk.contains("y_step")) cfg.tasks.grid.y_step = r.get<double>(tk, "y_step");
    if (tk.contains("a0")) cfg.tasks.grid.a0 = r.get<std::vector<double>>(tk, "a0");
    if (tk.contains("a1_offsets")) cfg.tasks.grid.a1_offsets = r.get<std::vector<double>>(tk, "a1_offsets");
  });
  guarded("subset_overrides", [&] {
    const json& list = doc.at("subset_overrides");
    if (!list.is_array()) r.fail("subset_overrides", "'subset_overrides' must be a list");
    for (const json& o : list) {
      r.check_keys(o, "subset_overrides", {"vx0_kmh", "t_max", "n_iter_max", "n_restarts", "n_candidates"});
      if (!o.contains("vx0_kmh")) r.fail("subset_overrides", "each subset override needs 'vx0_kmh'");
      SubsetOverride so;
      if (o.contains("t_max")) so.t_max = r.get<int>(o, "t_max");
      if (o.contains("n_iter_max")) so.n_iter_max = r.get<int>(o, "n_iter_max");
      if (o.contains("n_restarts")) so.n_restarts = r.get<int>(o, "n_restarts");
      if (o.contains("n_candidates")) so.n_candidates = r.get<int>(o, "n_candidates");
      for (const auto& v : {so.t_max, so.n_iter_max, so.n_restarts, so.n_candidates}) {
        if (v && *v < 1) r.fail("subset_overrides", "subset override values must be >= 1");
      }
      cfg.overrides[r.get<double>(o, "vx0_kmh") / 3.6] = so;
    }
  });

  if (cli.seed) t.master_seed = *cli.seed;
  if (cli.workers) t.worker_count = *cli.workers;
  if (cli.output_dir) cfg.output_dir = *cli.output_dir;

  finalize(cfg);
  try {
    t.validate();
    (void)generate(cfg.tasks, t.vehicle);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path, const CliOverrides& cli) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), cli);
}

std::string dump_run_config(const RunConfig& cfg) {
  const TrainConfig& t = cfg.train;
  json doc;
  doc["preset"] = "custom";
  doc["model"] = model_name(t.model);
  doc["features"] = to_string(t.features.variant);
  doc["net"] = {{"arch", to_string(t.net.arch)}, {"hidden", cfg.hidden}};
  doc["vvc"] = t.vvc_enabled;
  doc["n_restarts"] = t.n_restarts;
  doc["n_iter_max"] = t.n_iter_max;
  doc["n_candidates"] = t.n_candidates;
  doc["t_max"] = t.t_max;
  doc["tolerances"] = {{"eps_d", t.tol.eps_d}, {"eps_phi", t.tol.eps_phi}, {"eps_v", t.tol.eps_v}};
  doc["sigma_range"] = {t.sigma_min, t.sigma_max};
  doc["seed"] = t.master_seed;
  doc["workers"] = t.worker_count;
  doc["scheduling"] = cfg.scheduling;
  doc["output_dir"] = cfg.output_dir;
  json vehicle = json::object();
  for (const auto& [name, member] : vehicle_fields()) vehicle[name] = t.vehicle.*member;
  doc["vehicle"] = vehicle;
  if (cfg.tasks.kind == TaskKind::longitudinal) {
    doc["tasks"] = {{"kind", "longitudinal"}, {"vx0_kmh", cfg.tasks.vx0_kmh}, {"dv_kmh", cfg.tasks.dv_kmh}};
  } else {
    const LateralGrid& g = cfg.tasks.grid;
    doc["tasks"] = {{"kind", "lateral"}, {"vx0_kmh", g.vx0_kmh}, {"dv_kmh", g.dv_kmh}, {"y_max", g.y_max},
                    {"y_step", g.y_step}, {"a0", g.a0}, {"a1_offsets", g.a1_offsets}};
  }
  json overrides = json::array();
  for (const auto& [vx0, o] : cfg.overrides) {
    json item = {{"vx0_kmh", vx0 * 3.6}};
    if (o.t_max) item["t_max"] = *o.t_max;
    if (o.n_iter_max) item["n_iter_max"] = *o.n_iter_max;
    if (o.n_restarts) item["n_restarts"] = *o.n_restarts;
    if (o.n_candidates) item["n_candidates"] = *o.n_candidates;
    overrides.push_back(item);
  }
  doc["subset_overrides"] = overrides;
  return doc.dump(2) + "\n";
}

}  // namespace mpnet
