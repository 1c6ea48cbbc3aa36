#pragma once

// Interpolated Hamiltonian H(t) = (1 - s(t)) H0 + s(t) Hp, its Schrodinger
// evolution, and spectral diagnostics. Units: hbar = 1, times in 1/energy.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nvfactor/parallel.hpp"
#include "nvfactor/qcore.hpp"

namespace nvfactor::adiabatic {

class Schedule {
 public:
  enum class Kind { linear, polynomial, tabulated };

  static Schedule linear(double total_time);
  // s(tau) = sum_k coeffs[k] * tau^(k+1), tau = t / T. Coefficients must sum to
  // one and give a nondecreasing curve.
  static Schedule polynomial(double total_time, std::vector<double> coeffs);
  // Piecewise-linear through (tau, s) knots starting at (0,0), ending at (1,1).
  static Schedule tabulated(double total_time, std::vector<std::pair<double, double>> knots);
  // "linear", "poly:c1,c2,..." or "table:tau:s,tau:s,...".
  static Schedule parse(std::string_view spec, double total_time);

  double operator()(double t) const;
  double total_time() const { return total_time_; }
  Kind kind() const { return kind_; }
  Schedule with_total_time(double total_time) const;
  std::string describe() const;

 private:
  Schedule(Kind kind, double total_time) : kind_(kind), total_time_(total_time) {}
  double at_fraction(double tau) const;
  void validate() const;

  Kind kind_;
  double total_time_;
  std::vector<double> coeffs_;
  std::vector<std::pair<double, double>> knots_;
};

struct AdiabaticProblem {
  ComplexMatrix h0;
  ComplexMatrix hp;
  double g1 = 1.0;
  double g2 = 1.0;
  Schedule schedule = Schedule::linear(1.0);
  // Optional unitary commuting with H0 and Hp. When present, gaps are measured
  // inside the symmetry sector that holds the initial ground state.
  std::optional<ComplexMatrix> symmetry;

  int dim() const { return static_cast<int>(h0.rows()); }
  double total_time() const { return schedule.total_time(); }
};

// g2 * sum_k S_x^(k) on an n-qubit register.
ComplexMatrix transverse_field(int n_qubits, double g2);

// Builds H0 = g2 sum_k S_x^(k) around a compiled Hp. Throws
// CommutingHamiltonians when [H0, Hp] = 0. Two-qubit problems invariant under
// qubit exchange get the SWAP symmetry attached.
AdiabaticProblem make_problem(const ComplexMatrix& hp, double g1, double g2, Schedule schedule);

// The two-qubit instance Hp = g1 * 2 S_z I_z, H0 = g2 (S_x + I_x).
AdiabaticProblem two_qubit_factoring_problem(double g1, double g2, Schedule schedule);

// (|01> + |10>) / sqrt 2.
StateVector bell_target();

ComplexMatrix hamiltonian_at_s(const AdiabaticProblem& p, double s);
// Throws TimeOutOfRange outside [0, T].
ComplexMatrix hamiltonian_at(const AdiabaticProblem& p, double t);

// Lowest eigenvector of H0, phase fixed so the first nonzero amplitude is real
// and positive. Throws DegenerateGround.
StateVector initial_ground_state(const AdiabaticProblem& p);

// Squared norm of the projection of `state` onto the eigenvectors of H within
// `degeneracy_tol` of the lowest eigenvalue.
double ground_subspace_fidelity(const StateVector& state, const ComplexMatrix& h, double degeneracy_tol);

// Gap between the ground level (levels within tol are merged) and the next.
double gap_above_ground(const RealVector& sorted_energies, double degeneracy_tol);

struct StepPolicy {
  double initial_dt = 0.05;
  // Accept when 1 - |<psi_dt | psi_dt/2>|^2 < refine_tol.
  double refine_tol = 1e-8;
  int max_refinements = 10;
  bool refine = true;
  // Relative to the operator norm of H; used for ground-subspace fidelity.
  double degeneracy_rel = 1e-8;
};

using HamiltonianFn = std::function<ComplexMatrix(double t)>;

// Midpoint piecewise-constant propagation: on each step U = exp(-i H(t+dt/2) dt).
// Returns the accumulated propagator at each checkpoint; the steps between
// consecutive checkpoints are ceil(gap / dt).
std::vector<ComplexMatrix> checkpoint_propagators(const HamiltonianFn& h, std::span<const double> checkpoints,
                                                  double dt);

struct Checkpoint {
  double t = 0.0;
  double s = 0.0;
  StateVector state;
  std::vector<double> populations;
  double ground_fidelity = 0.0;
  double energy = 0.0;
};

struct Trajectory {
  std::vector<Checkpoint> points;
  double dt = 0.0;
  // Infidelity between the final states at dt and dt/2 in the last refinement.
  double refinement_infidelity = 0.0;

  const Checkpoint& final_point() const { return points.back(); }
};

// `count` uniformly spaced times on [0, T], both ends included.
std::vector<double> uniform_checkpoints(double total_time, int count);

// Integrates from the initial ground state. With refinement on, dt is halved
// until the final state stops moving; throws NonConvergent past the floor.
Trajectory evolve(const AdiabaticProblem& p, const StepPolicy& policy, std::span<const double> checkpoints);

struct SpectrumScan {
  std::vector<double> s;
  std::vector<RealVector> energies;  // full spectrum, ascending
  std::vector<double> sector_gap;
};

struct GapResult {
  double g_min = 0.0;
  double s_star = 0.0;
};

// Gap above the ground level of H(s), restricted to the symmetry sector of the
// initial state when the problem carries a symmetry.
double sector_gap(const AdiabaticProblem& p, double s, double degeneracy_rel = 1e-8);

SpectrumScan spectrum_scan(const AdiabaticProblem& p, std::span<const double> s_grid, Exec exec = Exec::parallel);

// Coarse scan over `coarse_points` followed by golden-section refinement to
// 1e-6 relative.
GapResult min_gap(const AdiabaticProblem& p, int coarse_points = 401, Exec exec = Exec::parallel);

struct TimeScanEntry {
  double total_time = 0.0;
  double ground_fidelity = 0.0;
  double target_fidelity = 0.0;  // against bell_target() for 2-qubit problems
};

// One converged evolution per total time; the problems are independent.
std::vector<TimeScanEntry> scan_total_time(const AdiabaticProblem& p, std::span<const double> total_times,
                                           const StepPolicy& policy, Exec exec = Exec::parallel);

}  // namespace nvfactor::adiabatic
