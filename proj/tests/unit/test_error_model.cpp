#include <doctest.h>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/error_model.hpp"
#include "nvfactor/errors.hpp"
#include "nvfactor/pulse_opt.hpp"

using namespace nvfactor;
using namespace nvfactor::noise;

namespace {

StateVector psi_i() {
  StateVector v(4);
  v << 0.5, -0.5, -0.5, 0.5;
  return v;
}

const pulse::ControlProblem& problem() {
  static const auto cp = pulse::nv_transfer_problem();
  return cp;
}

const pulse::PulseSequence& optimized() {
  static const auto p = pulse::optimize(problem(), pulse::adiabatic_pulse(problem(), 100, 1.0)).pulse;
  return p;
}

}  // namespace

TEST_SUITE("error_model") {

TEST_CASE("imperfect initial state") {
  ErrorConfig e;
  e.polarization_error = 0.0;
  CHECK(max_abs_diff(imperfect_initial_state(e).matrix(), psi_i() * psi_i().adjoint()) < 1e-15);
  e.polarization_error = 1.0;
  CHECK(max_abs_diff(imperfect_initial_state(e).matrix(), identity(4) / 4.0) < 1e-15);
  e.polarization_error = 0.2;
  CHECK(fidelity(imperfect_initial_state(e), psi_i()) == doctest::Approx(0.85));
  e.polarization_error = 1.2;
  CHECK_THROWS_AS(imperfect_initial_state(e), InvalidArgument);
}

TEST_CASE("config validation") {
  ErrorConfig e;
  e.n_samples = 0;
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
  e.n_samples = 1;
  e.amplitude_sigma_rf = -0.1;
  CHECK_THROWS_AS(e.validate(), InvalidArgument);
}

TEST_CASE("amplitude errors are truncated and seeded per sample") {
  ErrorConfig e;
  e.amplitude_sigma_mw = 0.1;
  e.amplitude_sigma_rf = 0.02;
  e.n_samples = 2000;
  const auto d = draw_amplitude_errors(e);
  double mean = 0.0, var = 0.0;
  for (const auto& x : d) {
    CHECK(std::abs(x.mw) <= 0.3);
    CHECK(std::abs(x.rf) <= 0.06);
    mean += x.mw;
    var += x.mw * x.mw;
  }
  mean /= d.size();
  var = var / d.size() - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::sqrt(var) == doctest::Approx(0.1).epsilon(0.08));
  CHECK(draw_amplitude_error(e, 17).mw == d[17].mw);
  ErrorConfig other = e;
  other.seed = e.seed + 1;
  CHECK(draw_amplitude_error(other, 17).mw != d[17].mw);
  e.amplitude_sigma_mw = 0.0;
  CHECK(draw_amplitude_error(e, 3).mw == 0.0);
}

TEST_CASE("noiseless adiabatic ensemble reproduces the engine") {
  const auto p = adiabatic::two_qubit_factoring_problem(1.0, 1.0, adiabatic::Schedule::linear(20.0));
  const auto cps = adiabatic::uniform_checkpoints(20.0, 6);
  const auto tr = adiabatic::evolve(p, {}, cps);
  ErrorConfig e;
  e.polarization_error = 0.0;
  e.amplitude_sigma_mw = e.amplitude_sigma_rf = 0.0;
  e.n_samples = 3;
  const auto ens = noisy_adiabatic_ensemble(p, e, cps, tr.dt);
  REQUIRE(ens.checkpoints.size() == 6);
  for (std::size_t c = 0; c < 6; ++c) {
    for (int i = 0; i < 4; ++i) {
      CHECK(std::abs(ens.checkpoints[c].mean[static_cast<std::size_t>(i)] -
                     tr.points[c].populations[static_cast<std::size_t>(i)]) < 1e-12);
      CHECK(ens.checkpoints[c].stddev[static_cast<std::size_t>(i)] < 1e-12);
    }
  }
  CHECK(std::abs(ens.target_fidelity - fidelity(tr.final_point().state, adiabatic::bell_target())) < 1e-12);
}

TEST_CASE("noiseless pulse ensemble reproduces the pulse fidelity") {
  ErrorConfig e;
  e.polarization_error = 0.0;
  e.amplitude_sigma_mw = e.amplitude_sigma_rf = 0.0;
  e.n_samples = 2;
  const auto ens = noisy_pulse_ensemble(problem(), optimized(), e);
  CHECK(std::abs(ens.target_fidelity - pulse::transfer_fidelity(problem(), optimized())) < 1e-12);
}

TEST_CASE("noise never helps on average") {
  ErrorConfig clean;
  clean.polarization_error = 0.0;
  clean.amplitude_sigma_mw = clean.amplitude_sigma_rf = 0.0;
  clean.n_samples = 1;
  const double f0 = noisy_pulse_ensemble(problem(), optimized(), clean).target_fidelity;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ErrorConfig e;
    e.seed = seed;
    e.n_samples = 100;
    e.polarization_error = 0.0;
    e.amplitude_sigma_mw = e.amplitude_sigma_rf = 0.1;
    CHECK(noisy_pulse_ensemble(problem(), optimized(), e).target_fidelity <= f0);
    e.amplitude_sigma_mw = e.amplitude_sigma_rf = 0.0;
    e.polarization_error = 0.1;
    CHECK(noisy_pulse_ensemble(problem(), optimized(), e).target_fidelity <= f0);
  }
}

TEST_CASE("fidelity is nonincreasing in the polarization error") {
  ErrorConfig e;
  e.amplitude_sigma_mw = e.amplitude_sigma_rf = 0.0;
  e.n_samples = 1;
  double previous = 2.0;
  for (int k = 0; k <= 20; ++k) {
    e.polarization_error = k / 20.0;
    const double f = noisy_pulse_ensemble(problem(), optimized(), e).target_fidelity;
    CHECK(f <= previous + 1e-15);
    previous = f;
  }
}

TEST_CASE("ensemble output is a valid density matrix and schedule independent") {
  ErrorConfig e;
  e.n_samples = 64;
  e.seed = 4;
  const auto a = noisy_pulse_ensemble(problem(), optimized(), e, Exec::serial);
  const auto b = noisy_pulse_ensemble(problem(), optimized(), e, Exec::parallel);
  CHECK(max_abs_diff(a.final_state.matrix(), b.final_state.matrix()) == 0.0);
  CHECK(a.checkpoints.back().stddev == b.checkpoints.back().stddev);
  CHECK(hermiticity_error(a.final_state.matrix()) < 1e-12);
  CHECK(std::abs(a.final_state.matrix().trace() - Complex(1.0, 0.0)) < 1e-12);
  CHECK(hermitian_eigenvalues(a.final_state.matrix())(0) >= -1e-9);
}

}  // TEST_SUITE
