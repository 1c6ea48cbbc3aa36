#include "nvfactor/error_model.hpp"

#include <cmath>
#include <random>

#include "nvfactor/errors.hpp"
#include "nvfactor/nv_map.hpp"

namespace nvfactor::noise {

namespace {

StateVector psi_initial() {
  StateVector psi(4);
  psi << 0.5, -0.5, -0.5, 0.5;
  return psi;
}

double truncated_normal(std::mt19937_64& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  std::normal_distribution<double> normal(0.0, sigma);
  for (;;) {
    const double x = normal(rng);
    if (std::abs(x) <= 3.0 * sigma) return x;
  }
}

// Per-sample density matrices at each checkpoint, reduced in sample order so
// the serial and parallel paths agree bit for bit.
EnsembleResult summarize(const std::vector<std::vector<ComplexMatrix>>& samples, const std::vector<double>& times) {
  const std::size_t n = samples.size();
  const std::size_t n_points = times.size();
  const Eigen::Index dim = samples.front().front().rows();
  EnsembleResult out;
  ComplexMatrix final_sum = ComplexMatrix::Zero(dim, dim);
  for (std::size_t c = 0; c < n_points; ++c) {
    EnsembleCheckpoint cp;
    cp.t = times[c];
    cp.mean.assign(static_cast<std::size_t>(dim), 0.0);
    cp.stddev.assign(static_cast<std::size_t>(dim), 0.0);
    for (const auto& s : samples)
      for (Eigen::Index i = 0; i < dim; ++i) cp.mean[static_cast<std::size_t>(i)] += s[c](i, i).real();
    for (auto& m : cp.mean) m /= static_cast<double>(n);
    if (n > 1) {
      for (const auto& s : samples) {
        for (Eigen::Index i = 0; i < dim; ++i) {
          const double d = s[c](i, i).real() - cp.mean[static_cast<std::size_t>(i)];
          cp.stddev[static_cast<std::size_t>(i)] += d * d;
        }
      }
      for (auto& v : cp.stddev) v = std::sqrt(v / static_cast<double>(n - 1));
    }
    out.checkpoints.push_back(std::move(cp));
  }
  for (const auto& s : samples) final_sum += s.back();
  final_sum /= static_cast<double>(n);
  out.final_state = DensityMatrix(0.5 * (final_sum + final_sum.adjoint()));
  out.target_fidelity = fidelity(out.final_state, adiabatic::bell_target());
  return out;
}

}  // namespace

void ErrorConfig::validate() const {
  if (!(polarization_error >= 0.0 && polarization_error <= 1.0)) {
    throw InvalidArgument("polarization_error must lie in [0, 1]");
  }
  if (!(amplitude_sigma_mw >= 0.0) || !(amplitude_sigma_rf >= 0.0)) throw InvalidArgument("amplitude sigmas must be >= 0");
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
}

DensityMatrix imperfect_initial_state(const ErrorConfig& e) { return imperfect_initial_state(e, psi_initial()); }

DensityMatrix imperfect_initial_state(const ErrorConfig& e, const StateVector& psi) {
  e.validate();
  const int dim = static_cast<int>(psi.size());
  const ComplexMatrix pure = psi * psi.adjoint();
  return DensityMatrix((1.0 - e.polarization_error) * pure + e.polarization_error * identity(dim) / double(dim));
}

AmplitudeError draw_amplitude_error(const ErrorConfig& e, int sample) {
  std::seed_seq seq{static_cast<std::uint32_t>(e.seed), static_cast<std::uint32_t>(e.seed >> 32),
                    static_cast<std::uint32_t>(sample)};
  std::mt19937_64 rng(seq);
  AmplitudeError d;
  d.mw = truncated_normal(rng, e.amplitude_sigma_mw);
  d.rf = truncated_normal(rng, e.amplitude_sigma_rf);
  return d;
}

std::vector<AmplitudeError> draw_amplitude_errors(const ErrorConfig& e) {
  e.validate();
  std::vector<AmplitudeError> out;
  out.reserve(static_cast<std::size_t>(e.n_samples));
  for (int k = 0; k < e.n_samples; ++k) out.push_back(draw_amplitude_error(e, k));
  return out;
}

EnsembleResult noisy_adiabatic_ensemble(const adiabatic::AdiabaticProblem& p, const ErrorConfig& e,
                                        std::span<const double> checkpoints, double dt, Exec exec) {
  e.validate();
  if (p.dim() != 4) throw DimensionMismatch("the NV realisation needs a two-qubit problem");
  if (checkpoints.empty()) throw InvalidArgument("at least one checkpoint is required");
  const ComplexMatrix rho0 = imperfect_initial_state(e).matrix();
  const auto errors = draw_amplitude_errors(e);

  std::vector<std::vector<ComplexMatrix>> samples(errors.size());
  for_each_index(exec, e.n_samples, [&](int k) {
    const AmplitudeError d = errors[static_cast<std::size_t>(k)];
    const adiabatic::HamiltonianFn h = [&p, d](double t) {
      nv::RotFrameParams r = nv::schedule_to_controls(p, t);
      r.omega_mw *= 1.0 + d.mw;
      r.omega_rf *= 1.0 + d.rf;
      return nv::hadamard_conjugate_electron(nv::rot_frame_hamiltonian(r).traceless);
    };
    const auto props = adiabatic::checkpoint_propagators(h, checkpoints, dt);
    auto& out = samples[static_cast<std::size_t>(k)];
    out.reserve(props.size());
    for (const auto& u : props) out.push_back(u * rho0 * u.adjoint());
  });
  return summarize(samples, std::vector<double>(checkpoints.begin(), checkpoints.end()));
}

EnsembleResult noisy_pulse_ensemble(const pulse::ControlProblem& cp, const pulse::PulseSequence& p,
                                    const ErrorConfig& e, Exec exec) {
  e.validate();
  pulse::check_bounds(cp, p);
  const ComplexMatrix rho0 = imperfect_initial_state(e, cp.initial).matrix();
  const auto errors = draw_amplitude_errors(e);

  std::vector<std::vector<ComplexMatrix>> samples(errors.size());
  for_each_index(exec, e.n_samples, [&](int k) {
    const AmplitudeError d = errors[static_cast<std::size_t>(k)];
    pulse::PulseSequence scaled = p;
    for (int c = 0; c < cp.n_channels(); ++c) {
      switch (cp.channels[static_cast<std::size_t>(c)].group) {
        case pulse::NoiseGroup::mw_amplitude: scaled.amplitudes.col(c) *= 1.0 + d.mw; break;
        case pulse::NoiseGroup::rf_amplitude: scaled.amplitudes.col(c) *= 1.0 + d.rf; break;
        case pulse::NoiseGroup::none: break;
      }
    }
    const ComplexMatrix u = pulse::total_propagator(cp, scaled);
    samples[static_cast<std::size_t>(k)] = {rho0, u * rho0 * u.adjoint()};
  });
  return summarize(samples, {0.0, cp.duration_us});
}

}  // namespace nvfactor::noise
