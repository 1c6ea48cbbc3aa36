#include "nvfactor/pulse_opt.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/errors.hpp"
#include "nvfactor/nv_map.hpp"
#include "nvfactor/text_format.hpp"

namespace nvfactor::pulse {

namespace {

const Complex kI(0.0, 1.0);

ComplexMatrix rotated_knob(const nv::RotFrameParams& unit) {
  return nv::hadamard_conjugate_electron(nv::rot_frame_hamiltonian(unit).traceless);
}

int channel_index(const ControlProblem& cp, const std::string& name) {
  for (int k = 0; k < cp.n_channels(); ++k)
    if (cp.channels[static_cast<std::size_t>(k)].name == name) return k;
  throw InvalidArgument("control problem has no channel '" + name + "'");
}

PulseSequence empty_pulse(const ControlProblem& cp, int n_segments) {
  if (n_segments < 1) throw InvalidArgument("pulse needs at least one segment");
  PulseSequence p;
  p.segment_us = cp.duration_us / n_segments;
  p.amplitudes = Eigen::MatrixXd::Zero(n_segments, cp.n_channels());
  for (const auto& ch : cp.channels) {
    p.channel_names.push_back(ch.name);
    p.bounds_mhz.push_back(ch.bound_mhz);
  }
  return p;
}

void require_compatible(const ControlProblem& cp, const PulseSequence& p) {
  if (p.n_channels() != cp.n_channels()) throw DimensionMismatch("pulse and control problem channel counts differ");
  if (!(p.segment_us > 0.0)) throw InvalidArgument("segment duration must be positive");
}

struct SegmentEigen {
  RealVector energies;  // of the angular-frequency generator
  ComplexMatrix vectors;
  ComplexMatrix propagator;
};

SegmentEigen decompose_segment(const ControlProblem& cp, const PulseSequence& p, int j) {
  const ComplexMatrix h = cp.angular_scale * segment_hamiltonian(cp, p, j);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (h + h.adjoint()));
  SegmentEigen e{solver.eigenvalues(), solver.eigenvectors(), {}};
  Eigen::VectorXcd phases(e.energies.size());
  for (Eigen::Index k = 0; k < e.energies.size(); ++k) phases(k) = std::exp(-kI * (e.energies(k) * p.segment_us));
  e.propagator = e.vectors * phases.asDiagonal() * e.vectors.adjoint();
  return e;
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

}  // namespace

ControlProblem nv_transfer_problem(double duration_us, double bound_mhz) {
  if (!(duration_us > 0.0) || !(bound_mhz > 0.0)) throw InvalidArgument("duration and bounds must be positive");
  ControlProblem cp;
  cp.drift = ComplexMatrix::Zero(4, 4);
  cp.channels = {
      {"mw_rabi", rotated_knob({1.0, 0.0, 0.0, 0.0}), bound_mhz, NoiseGroup::mw_amplitude},
      {"rf_rabi", rotated_knob({0.0, 1.0, 0.0, 0.0}), bound_mhz, NoiseGroup::rf_amplitude},
      {"mw_detuning", rotated_knob({0.0, 0.0, 1.0, 0.0}), bound_mhz, NoiseGroup::none},
      {"rf_detuning", rotated_knob({0.0, 0.0, 0.0, 1.0}), bound_mhz, NoiseGroup::none},
  };
  cp.initial = StateVector(4);
  cp.initial << 0.5, -0.5, -0.5, 0.5;
  cp.target = adiabatic::bell_target();
  cp.duration_us = duration_us;
  return cp;
}

PulseSequence zero_pulse(const ControlProblem& cp, int n_segments) { return empty_pulse(cp, n_segments); }

PulseSequence random_pulse(const ControlProblem& cp, int n_segments, std::uint64_t seed, double fraction) {
  PulseSequence p = empty_pulse(cp, n_segments);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int j = 0; j < n_segments; ++j)
    for (int k = 0; k < cp.n_channels(); ++k)
      p.amplitudes(j, k) = fraction * cp.channels[static_cast<std::size_t>(k)].bound_mhz * unit(rng);
  return p;
}

PulseSequence adiabatic_pulse(const ControlProblem& cp, int n_segments, double g_mhz) {
  PulseSequence p = empty_pulse(cp, n_segments);
  const auto problem =
      adiabatic::two_qubit_factoring_problem(g_mhz, g_mhz, adiabatic::Schedule::linear(cp.duration_us));
  const int mw = channel_index(cp, "mw_rabi");
  const int rf = channel_index(cp, "rf_rabi");
  const int dmw = channel_index(cp, "mw_detuning");
  const int drf = channel_index(cp, "rf_detuning");
  for (int j = 0; j < n_segments; ++j) {
    const nv::RotFrameParams r = nv::schedule_to_controls(problem, (j + 0.5) * p.segment_us);
    p.amplitudes(j, mw) = r.omega_mw;
    p.amplitudes(j, rf) = r.omega_rf;
    p.amplitudes(j, dmw) = r.delta_mw;
    p.amplitudes(j, drf) = r.delta_rf;
  }
  return p;
}

void check_bounds(const ControlProblem& cp, const PulseSequence& p) {
  require_compatible(cp, p);
  for (int k = 0; k < p.n_channels(); ++k) {
    const double bound = cp.channels[static_cast<std::size_t>(k)].bound_mhz;
    const double peak = p.n_segments() ? p.amplitudes.col(k).cwiseAbs().maxCoeff() : 0.0;
    if (peak > bound * (1.0 + 1e-12)) {
      throw BoundViolation("channel " + cp.channels[static_cast<std::size_t>(k)].name + " peaks at " +
                           std::to_string(peak) + " MHz, bound " + std::to_string(bound));
    }
  }
}

ComplexMatrix segment_hamiltonian(const ControlProblem& cp, const PulseSequence& p, int segment) {
  ComplexMatrix h = cp.drift;
  for (int k = 0; k < cp.n_channels(); ++k) h += p.amplitudes(segment, k) * cp.channels[static_cast<std::size_t>(k)].op;
  return h;
}

ComplexMatrix total_propagator(const ControlProblem& cp, const PulseSequence& p) {
  require_compatible(cp, p);
  ComplexMatrix u = identity(static_cast<int>(cp.drift.rows()));
  for (int j = 0; j < p.n_segments(); ++j) {
    u = expm_hermitian(cp.angular_scale * segment_hamiltonian(cp, p, j), p.segment_us) * u;
  }
  return u;
}

StateVector propagate(const ControlProblem& cp, const PulseSequence& p) {
  check_bounds(cp, p);
  return total_propagator(cp, p) * cp.initial;
}

double transfer_fidelity(const ControlProblem& cp, const PulseSequence& p) {
  return fidelity(StateVector(total_propagator(cp, p) * cp.initial), cp.target);
}

Eigen::MatrixXd gradient(const ControlProblem& cp, const PulseSequence& p, Exec exec) {
  require_compatible(cp, p);
  const int n = p.n_segments();
  const int m = p.n_channels();
  const double dt = p.segment_us;

  std::vector<SegmentEigen> seg(static_cast<std::size_t>(n));
  for_each_index(exec, n, [&](int j) { seg[static_cast<std::size_t>(j)] = decompose_segment(cp, p, j); });

  // forward[j]: state before segment j; backward[j]: target pulled back to
  // just after segment j.
  std::vector<StateVector> forward(static_cast<std::size_t>(n + 1));
  std::vector<StateVector> backward(static_cast<std::size_t>(n + 1));
  forward[0] = cp.initial;
  for (int j = 0; j < n; ++j)
    forward[static_cast<std::size_t>(j + 1)] = seg[static_cast<std::size_t>(j)].propagator * forward[static_cast<std::size_t>(j)];
  backward[static_cast<std::size_t>(n)] = cp.target;
  for (int j = n - 1; j >= 0; --j)
    backward[static_cast<std::size_t>(j)] = seg[static_cast<std::size_t>(j)].propagator.adjoint() * backward[static_cast<std::size_t>(j + 1)];
  const Complex amp = cp.target.dot(forward[static_cast<std::size_t>(n)]);

  Eigen::MatrixXd grad(n, m);
  for_each_index(exec, n, [&](int j) {
    const SegmentEigen& e = seg[static_cast<std::size_t>(j)];
    const Eigen::Index d = e.energies.size();
    ComplexMatrix kernel(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        const double mean = 0.5 * (e.energies(a) + e.energies(b));
        const double half_diff = 0.5 * (e.energies(a) - e.energies(b)) * dt;
        kernel(a, b) = -kI * dt * std::exp(-kI * (mean * dt)) * sinc(half_diff);
      }
    }
    const StateVector x = e.vectors.adjoint() * forward[static_cast<std::size_t>(j)];
    const StateVector y = e.vectors.adjoint() * backward[static_cast<std::size_t>(j + 1)];
    for (int k = 0; k < m; ++k) {
      const ComplexMatrix mk = e.vectors.adjoint() * (cp.angular_scale * cp.channels[static_cast<std::size_t>(k)].op) * e.vectors;
      const Complex overlap = y.dot(kernel.cwiseProduct(mk) * x);
      grad(j, k) = 2.0 * (std::conj(amp) * overlap).real();
    }
  });
  return grad;
}

namespace {

PulseSequence clipped(const ControlProblem& cp, PulseSequence p) {
  for (int k = 0; k < p.n_channels(); ++k) {
    const double bound = cp.channels[static_cast<std::size_t>(k)].bound_mhz;
    p.amplitudes.col(k) = p.amplitudes.col(k).cwiseMax(-bound).cwiseMin(bound);
  }
  return p;
}

}  // namespace

OptimizeResult optimize(const ControlProblem& cp, const PulseSequence& init, const OptimizeOptions& options, Exec exec) {
  check_bounds(cp, init);
  OptimizeResult result;
  result.pulse = init;
  double f = transfer_fidelity(cp, init);
  double step = options.initial_step;
  int stalls = 0;
  result.log.push_back({0, f, 0.0, 0.0});
  for (int it = 1; it <= options.max_iters && f < options.target_fidelity; ++it) {
    const Eigen::MatrixXd g = gradient(cp, result.pulse, exec);
    const double gnorm = g.norm();
    bool accepted = false;
    double trial = step * 2.0;
    PulseSequence candidate = result.pulse;
    double fc = f;
    while (trial >= options.min_step) {
      candidate.amplitudes = result.pulse.amplitudes + trial * g;
      candidate = clipped(cp, std::move(candidate));
      fc = transfer_fidelity(cp, candidate);
      if (fc > f) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (accepted) {
      result.pulse = std::move(candidate);
      f = fc;
      step = trial;
      stalls = 0;
    } else if (++stalls >= options.stall_limit) {
      throw NoProgress("line search stalled for " + std::to_string(stalls) + " iterations at fidelity " +
                       std::to_string(f));
    }
    result.log.push_back({it, f, accepted ? trial : 0.0, gnorm});
  }
  result.reached_target = f >= options.target_fidelity;
  return result;
}

std::vector<double> robustness_scan(const ControlProblem& cp, const PulseSequence& p, const std::vector<double>& epsilons) {
  std::vector<double> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    PulseSequence scaled = p;
    scaled.amplitudes *= (1.0 + eps);
    out.push_back(transfer_fidelity(cp, scaled));
  }
  return out;
}

void write_pulse(std::ostream& os, const PulseSequence& p) {
  os << "# nvfactor pulse v1\n";
  os << "n_segments " << p.n_segments() << '\n';
  os << "segment_us " << format_number(p.segment_us) << '\n';
  os << "channels";
  for (const auto& name : p.channel_names) os << ' ' << name;
  os << '\n' << "bounds_mhz";
  for (double b : p.bounds_mhz) os << ' ' << format_number(b);
  os << '\n' << "amplitudes_mhz\n";
  for (int j = 0; j < p.n_segments(); ++j) {
    for (int k = 0; k < p.n_channels(); ++k) os << (k ? " " : "") << format_number(p.amplitudes(j, k));
    os << '\n';
  }
}

PulseSequence read_pulse(std::istream& is) {
  PulseSequence p;
  int n = -1;
  std::string line;
  auto fail = [](const std::string& why) { return InvalidArgument("pulse file: " + why); };
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n_segments") {
      ls >> n;
    } else if (key == "segment_us") {
      ls >> p.segment_us;
    } else if (key == "channels") {
      for (std::string name; ls >> name;) p.channel_names.push_back(name);
    } else if (key == "bounds_mhz") {
      for (double b; ls >> b;) p.bounds_mhz.push_back(b);
    } else if (key == "amplitudes_mhz") {
      break;
    } else {
      throw fail("unknown header key '" + key + "'");
    }
  }
  if (n < 1 || p.channel_names.empty() || p.bounds_mhz.size() != p.channel_names.size()) {
    throw fail("incomplete header");
  }
  p.amplitudes.resize(n, static_cast<Eigen::Index>(p.channel_names.size()));
  for (int j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < p.amplitudes.cols(); ++k) {
      if (!(is >> p.amplitudes(j, k))) throw fail("truncated amplitude table");
    }
  }
  return p;
}

}  // namespace nvfactor::pulse
