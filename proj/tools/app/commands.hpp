#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "app/config.hpp"
#include "nvfactor/adiabatic.hpp"
#include "nvfactor/error_model.hpp"
#include "nvfactor/factor_compiler.hpp"
#include "nvfactor/parallel.hpp"
#include "nvfactor/pulse_opt.hpp"
#include "nvfactor/tomography.hpp"

namespace nvfactor::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitInfeasible = 2,
  kExitTooManyQubits = 3,
  kExitNonConvergent = 4,
  kExitDomain = 5,
};

struct CommandContext {
  RunConfig cfg;
  std::filesystem::path out_dir = "out";
  Exec exec = Exec::parallel;
  bool levels_only = false;          // nv
  std::string tomo_state = "pipeline";  // tomo: pipeline | ideal
  bool calibrate = false;            // report
  bool noisy_evolve = false;         // evolve
};

// Pipeline stages shared by the subcommands and the acceptance suite.
factor::CompiledProblem compile_from(const RunConfig& cfg);
adiabatic::AdiabaticProblem problem_from(const RunConfig& cfg, const factor::CompiledProblem& compiled);
adiabatic::StepPolicy policy_from(const RunConfig& cfg);
pulse::ControlProblem control_problem_from(const RunConfig& cfg);
pulse::PulseSequence initial_pulse(const RunConfig& cfg, const pulse::ControlProblem& cp);

struct PipelineResult {
  noise::EnsembleResult ensemble;
  std::vector<tomo::TomographyRecord> records;
  tomo::Reconstruction reconstruction;
  double fidelity = 0.0;  // of the reconstructed state with Psi_f
};

// Noisy ensemble under `pulse`, then 16-setting tomography at cfg.shots.
PipelineResult noisy_pipeline(const RunConfig& cfg, const pulse::ControlProblem& cp, const pulse::PulseSequence& pulse,
                              const noise::ErrorConfig& errors, Exec exec);

struct CalibrationResult {
  std::vector<std::pair<double, double>> sweep;  // (polarization error, fidelity)
  double chosen = 0.0;
  double chosen_fidelity = 0.0;
};

// Sweeps the polarization error over cfg.calibration_grid at the configured
// amplitude sigmas; picks the point whose fidelity is closest to the target.
CalibrationResult calibrate(const RunConfig& cfg, const pulse::ControlProblem& cp, const pulse::PulseSequence& pulse,
                            Exec exec);

int cmd_compile(const CommandContext& ctx);
int cmd_gap(const CommandContext& ctx);
int cmd_evolve(const CommandContext& ctx);
int cmd_nv(const CommandContext& ctx);
int cmd_grape(const CommandContext& ctx);
int cmd_tomo(const CommandContext& ctx);
int cmd_report(const CommandContext& ctx);

// Runs `name`, mapping exceptions onto exit codes with a message on stderr.
int run_command(const std::string& name, const CommandContext& ctx);

}  // namespace nvfactor::app
