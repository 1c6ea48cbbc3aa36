#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvfactor/error_model.hpp"

namespace nvfactor::app {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Defaults reproduce the N = 35 pipeline end to end.
struct RunConfig {
  std::uint64_t n = 35;
  int width_x = 0;  // 0 with width_y = 0: most balanced feasible widths
  int width_y = 0;
  int qubit_budget = 6;

  double g1 = 1.0;
  double g2 = 1.0;
  std::string schedule = "linear";
  double t_total = 200.0;
  int checkpoints = 6;
  std::vector<double> scan_t;
  double initial_dt = 0.05;
  double refine_tol = 1e-8;
  int gap_points = 401;

  double pulse_duration_us = 1.7;
  double pulse_bound_mhz = 10.0;
  int pulse_segments = 100;
  std::string pulse_init = "adiabatic";  // adiabatic | random | zero
  double pulse_init_g_mhz = 1.0;
  int max_iters = 500;
  double target_fidelity = 0.999;
  std::vector<double> robustness_eps;

  noise::ErrorConfig errors;
  std::int64_t shots = 100000;  // 0 selects exact populations

  std::vector<double> calibration_grid;
  double calibration_target = 0.81;

  std::uint64_t seed = 20;
  std::optional<std::string> out_dir;

  RunConfig();
};

void apply_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const RunConfig& cfg);
// Throws ConfigError.
void validate(const RunConfig& cfg);

// --out-dir, then the config file, then $NVFACTOR_OUT_DIR, then ./out.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag, const RunConfig& cfg);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace nvfactor::app
