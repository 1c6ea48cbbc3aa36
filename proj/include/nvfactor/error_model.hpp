#pragma once

// Imperfect initialisation (depolarised admixture) and static, per-run
// amplitude miscalibration of the MW and RF drives, averaged over a seeded
// Monte Carlo ensemble.

#include <cstdint>
#include <span>
#include <vector>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/parallel.hpp"
#include "nvfactor/pulse_opt.hpp"
#include "nvfactor/qcore.hpp"

namespace nvfactor::noise {

// Pinned from the sweep run by `nvfactor report --calibrate` (see README).
inline constexpr double kCalibratedPolarizationError = 0.25;
inline constexpr double kDefaultAmplitudeSigma = 0.05;

struct ErrorConfig {
  double polarization_error = kCalibratedPolarizationError;
  double amplitude_sigma_mw = kDefaultAmplitudeSigma;  // relative
  double amplitude_sigma_rf = kDefaultAmplitudeSigma;
  int n_samples = 500;
  std::uint64_t seed = 20;

  // Throws InvalidArgument.
  void validate() const;
};

// (1 - eps) |psi><psi| + eps I/4; psi defaults to Psi_i.
DensityMatrix imperfect_initial_state(const ErrorConfig& e);
DensityMatrix imperfect_initial_state(const ErrorConfig& e, const StateVector& psi);

struct AmplitudeError {
  double mw = 0.0;
  double rf = 0.0;
};

// Normal(0, sigma) truncated to +-3 sigma by rejection; sample k depends only
// on (seed, k).
AmplitudeError draw_amplitude_error(const ErrorConfig& e, int sample);
std::vector<AmplitudeError> draw_amplitude_errors(const ErrorConfig& e);

struct EnsembleCheckpoint {
  double t = 0.0;
  std::vector<double> mean;    // basis populations averaged over samples
  std::vector<double> stddev;  // sample standard deviation (0 for one sample)
};

struct EnsembleResult {
  DensityMatrix final_state = DensityMatrix::maximally_mixed(4);
  std::vector<EnsembleCheckpoint> checkpoints;
  double target_fidelity = 0.0;  // <Psi_f| final_state |Psi_f>
};

// Two-qubit adiabatic problem realised through the NV rotating-frame knobs:
// Omega_MW scaled by (1 + d_mw), Omega_RF by (1 + d_rf), detunings untouched.
// `dt` is the midpoint step, typically a converged Trajectory::dt.
EnsembleResult noisy_adiabatic_ensemble(const adiabatic::AdiabaticProblem& p, const ErrorConfig& e,
                                        std::span<const double> checkpoints, double dt, Exec exec = Exec::parallel);

// Channels of group mw_amplitude / rf_amplitude scaled by (1 + d_mw) / (1 + d_rf).
// Checkpoints are the start and the end of the pulse.
EnsembleResult noisy_pulse_ensemble(const pulse::ControlProblem& cp, const pulse::PulseSequence& p,
                                    const ErrorConfig& e, Exec exec = Exec::parallel);

}  // namespace nvfactor::noise
