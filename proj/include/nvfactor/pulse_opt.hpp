#pragma once

// Piecewise-constant optimal control (GRAPE) for the state transfer
// Psi_i -> Psi_f, in the electron-Hadamard-rotated frame.
//
// Units: amplitudes and drift in MHz, times in microseconds. A segment of
// length dt evolves under exp(-i 2 pi (drift + sum_k u_k C_k) dt).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvfactor/parallel.hpp"
#include "nvfactor/qcore.hpp"

namespace nvfactor::pulse {

inline constexpr double kDefaultDurationUs = 1.7;  // T2* of the NV electron
inline constexpr double kDefaultBoundMhz = 10.0;
inline constexpr int kDefaultSegments = 100;

// Which static amplitude error a channel shares in the noise model.
enum class NoiseGroup { none, mw_amplitude, rf_amplitude };

struct ControlChannel {
  std::string name;
  ComplexMatrix op;
  double bound_mhz = kDefaultBoundMhz;
  NoiseGroup group = NoiseGroup::none;
};

struct ControlProblem {
  ComplexMatrix drift;
  std::vector<ControlChannel> channels;
  StateVector initial;
  StateVector target;
  double duration_us = kDefaultDurationUs;
  double angular_scale = 2.0 * kPi;

  int n_channels() const { return static_cast<int>(channels.size()); }
};

// The four rotating-frame knobs (MW Rabi, RF Rabi, MW detuning, RF detuning)
// conjugated into the Hadamard frame, zero drift, Psi_i -> Psi_f.
ControlProblem nv_transfer_problem(double duration_us = kDefaultDurationUs, double bound_mhz = kDefaultBoundMhz);

struct PulseSequence {
  double segment_us = 0.0;
  Eigen::MatrixXd amplitudes;  // rows: segments, cols: channels (MHz)
  std::vector<std::string> channel_names;
  std::vector<double> bounds_mhz;

  int n_segments() const { return static_cast<int>(amplitudes.rows()); }
  int n_channels() const { return static_cast<int>(amplitudes.cols()); }
};

PulseSequence zero_pulse(const ControlProblem& cp, int n_segments = kDefaultSegments);
// Uniform in [-fraction * bound, fraction * bound], deterministic in `seed`.
PulseSequence random_pulse(const ControlProblem& cp, int n_segments, std::uint64_t seed, double fraction = 0.5);
// Direct adiabatic controls at segment midpoints (linear schedule over the
// budget) with couplings g1 = g2 = g_mhz. Requires nv_transfer_problem's channels.
PulseSequence adiabatic_pulse(const ControlProblem& cp, int n_segments, double g_mhz);

// Throws BoundViolation if any |amplitude| exceeds its channel bound.
void check_bounds(const ControlProblem& cp, const PulseSequence& p);

ComplexMatrix segment_hamiltonian(const ControlProblem& cp, const PulseSequence& p, int segment);
// Product of segment propagators, no bound check.
ComplexMatrix total_propagator(const ControlProblem& cp, const PulseSequence& p);
StateVector propagate(const ControlProblem& cp, const PulseSequence& p);
double transfer_fidelity(const ControlProblem& cp, const PulseSequence& p);

// Exact gradient of the transfer fidelity w.r.t. every amplitude (segments x
// channels), from forward/backward states and the eigenbasis derivative of
// each segment exponential.
Eigen::MatrixXd gradient(const ControlProblem& cp, const PulseSequence& p, Exec exec = Exec::parallel);

struct OptimizeOptions {
  int max_iters = 500;
  double target_fidelity = 0.999;
  double initial_step = 50.0;  // MHz per unit gradient
  int stall_limit = 20;
  double min_step = 1e-12;
};

struct IterationRecord {
  int iter = 0;
  double fidelity = 0.0;
  double step = 0.0;
  double gradient_norm = 0.0;
};

struct OptimizeResult {
  PulseSequence pulse;
  std::vector<IterationRecord> log;
  bool reached_target = false;
};

// Projected gradient ascent with a backtracking line search; amplitudes are
// clipped to their bounds. Throws NoProgress after `stall_limit` consecutive
// failed line searches below the target.
OptimizeResult optimize(const ControlProblem& cp, const PulseSequence& init, const OptimizeOptions& options = {},
                        Exec exec = Exec::parallel);

// Fidelity with every amplitude multiplied by (1 + eps).
std::vector<double> robustness_scan(const ControlProblem& cp, const PulseSequence& p, const std::vector<double>& epsilons);

// Pulse file: header lines then one row of decimal amplitudes per segment.
void write_pulse(std::ostream& os, const PulseSequence& p);
PulseSequence read_pulse(std::istream& is);

}  // namespace nvfactor::pulse
