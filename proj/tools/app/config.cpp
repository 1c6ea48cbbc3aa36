#include "app/config.hpp"

#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "app/artifacts.hpp"

namespace nvfactor::app {

namespace {

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * k / (count - 1));
  return out;
}

template <class T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

using Setter = std::function<void(RunConfig&, const nlohmann::json&, const std::string&)>;

template <class T, class Field>
Setter set(Field field) {
  return [field](RunConfig& c, const nlohmann::json& v, const std::string& key) { field(c) = get_as<T>(v, key); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"n", set<std::uint64_t>([](RunConfig& c) -> auto& { return c.n; })},
      {"wx", set<int>([](RunConfig& c) -> auto& { return c.width_x; })},
      {"wy", set<int>([](RunConfig& c) -> auto& { return c.width_y; })},
      {"qubit_budget", set<int>([](RunConfig& c) -> auto& { return c.qubit_budget; })},
      {"g1", set<double>([](RunConfig& c) -> auto& { return c.g1; })},
      {"g2", set<double>([](RunConfig& c) -> auto& { return c.g2; })},
      {"schedule", set<std::string>([](RunConfig& c) -> auto& { return c.schedule; })},
      {"t_total", set<double>([](RunConfig& c) -> auto& { return c.t_total; })},
      {"checkpoints", set<int>([](RunConfig& c) -> auto& { return c.checkpoints; })},
      {"scan_t", set<std::vector<double>>([](RunConfig& c) -> auto& { return c.scan_t; })},
      {"initial_dt", set<double>([](RunConfig& c) -> auto& { return c.initial_dt; })},
      {"refine_tol", set<double>([](RunConfig& c) -> auto& { return c.refine_tol; })},
      {"gap_points", set<int>([](RunConfig& c) -> auto& { return c.gap_points; })},
      {"pulse_duration_us", set<double>([](RunConfig& c) -> auto& { return c.pulse_duration_us; })},
      {"pulse_bound_mhz", set<double>([](RunConfig& c) -> auto& { return c.pulse_bound_mhz; })},
      {"pulse_segments", set<int>([](RunConfig& c) -> auto& { return c.pulse_segments; })},
      {"pulse_init", set<std::string>([](RunConfig& c) -> auto& { return c.pulse_init; })},
      {"pulse_init_g_mhz", set<double>([](RunConfig& c) -> auto& { return c.pulse_init_g_mhz; })},
      {"max_iters", set<int>([](RunConfig& c) -> auto& { return c.max_iters; })},
      {"target_fidelity", set<double>([](RunConfig& c) -> auto& { return c.target_fidelity; })},
      {"robustness_eps", set<std::vector<double>>([](RunConfig& c) -> auto& { return c.robustness_eps; })},
      {"polarization_error", set<double>([](RunConfig& c) -> auto& { return c.errors.polarization_error; })},
      {"sigma_mw", set<double>([](RunConfig& c) -> auto& { return c.errors.amplitude_sigma_mw; })},
      {"sigma_rf", set<double>([](RunConfig& c) -> auto& { return c.errors.amplitude_sigma_rf; })},
      {"n_samples", set<int>([](RunConfig& c) -> auto& { return c.errors.n_samples; })},
      {"shots", set<std::int64_t>([](RunConfig& c) -> auto& { return c.shots; })},
      {"calibration_grid", set<std::vector<double>>([](RunConfig& c) -> auto& { return c.calibration_grid; })},
      {"calibration_target", set<double>([](RunConfig& c) -> auto& { return c.calibration_target; })},
      {"seed", set<std::uint64_t>([](RunConfig& c) -> auto& { return c.seed; })},
      {"out_dir", [](RunConfig& c, const nlohmann::json& v, const std::string& key) {
         c.out_dir = get_as<std::string>(v, key);
       }},
  };
  return table;
}

}  // namespace

RunConfig::RunConfig() {
  robustness_eps = linspace(-0.1, 0.1, 21);
  calibration_grid = linspace(0.0, 0.5, 51);
  errors.seed = seed;
}

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown config key '" + key + "'");
    it->second(cfg, value, key);
  }
  cfg.errors.seed = cfg.seed;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  RunConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["wx"] = c.width_x;
  j["wy"] = c.width_y;
  j["qubit_budget"] = c.qubit_budget;
  j["g1"] = num(c.g1);
  j["g2"] = num(c.g2);
  j["schedule"] = c.schedule;
  j["t_total"] = num(c.t_total);
  j["checkpoints"] = c.checkpoints;
  j["scan_t"] = nums(c.scan_t);
  j["initial_dt"] = num(c.initial_dt);
  j["refine_tol"] = num(c.refine_tol);
  j["gap_points"] = c.gap_points;
  j["pulse_duration_us"] = num(c.pulse_duration_us);
  j["pulse_bound_mhz"] = num(c.pulse_bound_mhz);
  j["pulse_segments"] = c.pulse_segments;
  j["pulse_init"] = c.pulse_init;
  j["pulse_init_g_mhz"] = num(c.pulse_init_g_mhz);
  j["max_iters"] = c.max_iters;
  j["target_fidelity"] = num(c.target_fidelity);
  j["robustness_eps"] = nums(c.robustness_eps);
  j["polarization_error"] = num(c.errors.polarization_error);
  j["sigma_mw"] = num(c.errors.amplitude_sigma_mw);
  j["sigma_rf"] = num(c.errors.amplitude_sigma_rf);
  j["n_samples"] = c.errors.n_samples;
  j["shots"] = c.shots;
  j["calibration_grid"] = nums(c.calibration_grid);
  j["calibration_target"] = num(c.calibration_target);
  j["seed"] = c.seed;
  return j;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require((c.width_x == 0) == (c.width_y == 0), "wx and wy must be given together");
  require(c.width_x >= 0 && c.width_y >= 0, "widths must be positive");
  require(c.qubit_budget >= 1, "qubit_budget must be >= 1");
  require(c.g1 > 0.0 && c.g2 > 0.0, "g1 and g2 must be positive");
  require(c.t_total > 0.0, "t_total must be positive");
  require(c.checkpoints >= 2, "checkpoints must be >= 2");
  for (double t : c.scan_t) require(t > 0.0, "scan_t entries must be positive");
  require(c.initial_dt > 0.0 && c.refine_tol > 0.0, "initial_dt and refine_tol must be positive");
  require(c.gap_points >= 3, "gap_points must be >= 3");
  require(c.pulse_duration_us > 0.0 && c.pulse_bound_mhz > 0.0, "pulse duration and bound must be positive");
  require(c.pulse_segments >= 1, "pulse_segments must be >= 1");
  require(c.pulse_init == "adiabatic" || c.pulse_init == "random" || c.pulse_init == "zero",
          "pulse_init must be adiabatic, random or zero");
  require(c.max_iters >= 0, "max_iters must be >= 0");
  require(c.target_fidelity > 0.0 && c.target_fidelity <= 1.0, "target_fidelity must lie in (0, 1]");
  require(c.shots >= 0, "shots must be >= 0");
  require(!c.calibration_grid.empty(), "calibration_grid must not be empty");
  for (double e : c.calibration_grid) require(e >= 0.0 && e <= 1.0, "calibration_grid entries must lie in [0, 1]");
  try {
    c.errors.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& cfg) {
  if (flag) return *flag;
  if (cfg.out_dir) return *cfg.out_dir;
  if (const char* env = std::getenv("NVFACTOR_OUT_DIR"); env && *env) return env;
  return "out";
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string item;
  while (std::getline(is, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ConfigError("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace nvfactor::app
