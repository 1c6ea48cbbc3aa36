#include "nvfactor/adiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "nvfactor/errors.hpp"

namespace nvfactor::adiabatic {

namespace {

const Complex kI(0.0, 1.0);

int qubit_count(int dim) {
  int n = 0;
  while ((1 << n) < dim) ++n;
  if ((1 << n) != dim) throw InvalidArgument("Hilbert-space dimension " + std::to_string(dim) + " is not a power of two");
  return n;
}

double operator_norm(const RealVector& energies) {
  return energies.size() == 0 ? 0.0 : std::max(std::abs(energies(0)), std::abs(energies(energies.size() - 1)));
}

std::vector<double> split_numbers(std::string_view text, char sep) {
  std::vector<double> out;
  std::string item;
  std::istringstream is{std::string(text)};
  while (std::getline(is, item, sep)) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InvalidArgument("schedule: cannot parse number '" + item + "'");
    }
  }
  return out;
}

}  // namespace

Schedule Schedule::linear(double total_time) {
  Schedule s(Kind::linear, total_time);
  s.validate();
  return s;
}

Schedule Schedule::polynomial(double total_time, std::vector<double> coeffs) {
  Schedule s(Kind::polynomial, total_time);
  s.coeffs_ = std::move(coeffs);
  s.validate();
  return s;
}

Schedule Schedule::tabulated(double total_time, std::vector<std::pair<double, double>> knots) {
  Schedule s(Kind::tabulated, total_time);
  s.knots_ = std::move(knots);
  s.validate();
  return s;
}

Schedule Schedule::parse(std::string_view spec, double total_time) {
  if (spec == "linear") return linear(total_time);
  if (spec.starts_with("poly:")) return polynomial(total_time, split_numbers(spec.substr(5), ','));
  if (spec.starts_with("table:")) {
    std::vector<std::pair<double, double>> knots;
    std::string item;
    std::istringstream is{std::string(spec.substr(6))};
    while (std::getline(is, item, ',')) {
      const auto pair = split_numbers(item, ':');
      if (pair.size() != 2) throw InvalidArgument("schedule: table knot '" + item + "' is not tau:s");
      knots.emplace_back(pair[0], pair[1]);
    }
    return tabulated(total_time, std::move(knots));
  }
  throw InvalidArgument("schedule: unknown spec '" + std::string(spec) + "'");
}

void Schedule::validate() const {
  if (!(total_time_ > 0.0) || !std::isfinite(total_time_)) {
    throw InvalidArgument("schedule: total time must be positive and finite");
  }
  if (kind_ == Kind::polynomial) {
    if (coeffs_.empty()) throw InvalidArgument("schedule: polynomial needs coefficients");
    double sum = 0.0;
    for (double c : coeffs_) sum += c;
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("schedule: polynomial must reach s = 1 at t = T");
    double prev = 0.0;
    for (int k = 1; k <= 1000; ++k) {
      const double v = at_fraction(k / 1000.0);
      if (v < prev - 1e-12) throw InvalidArgument("schedule: polynomial is not monotone");
      prev = v;
    }
  }
  if (kind_ == Kind::tabulated) {
    if (knots_.size() < 2 || knots_.front() != std::pair{0.0, 0.0} || knots_.back() != std::pair{1.0, 1.0}) {
      throw InvalidArgument("schedule: table must start at 0:0 and end at 1:1");
    }
    for (std::size_t k = 1; k < knots_.size(); ++k) {
      if (!(knots_[k].first > knots_[k - 1].first) || knots_[k].second < knots_[k - 1].second) {
        throw InvalidArgument("schedule: table knots must increase in tau and not decrease in s");
      }
    }
  }
}

double Schedule::at_fraction(double tau) const {
  tau = std::clamp(tau, 0.0, 1.0);
  switch (kind_) {
    case Kind::linear:
      return tau;
    case Kind::polynomial: {
      double v = 0.0;
      double power = tau;
      for (double c : coeffs_) {
        v += c * power;
        power *= tau;
      }
      return v;
    }
    case Kind::tabulated: {
      auto hi = std::upper_bound(knots_.begin(), knots_.end(), tau,
                                 [](double x, const auto& knot) { return x < knot.first; });
      if (hi == knots_.end()) return 1.0;
      auto lo = std::prev(hi);
      const double w = (tau - lo->first) / (hi->first - lo->first);
      return lo->second + w * (hi->second - lo->second);
    }
  }
  return tau;
}

double Schedule::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= total_time_) return 1.0;
  return at_fraction(t / total_time_);
}

Schedule Schedule::with_total_time(double total_time) const {
  Schedule s = *this;
  s.total_time_ = total_time;
  s.validate();
  return s;
}

std::string Schedule::describe() const {
  std::ostringstream os;
  os.precision(12);
  switch (kind_) {
    case Kind::linear:
      return "linear";
    case Kind::polynomial:
      os << "poly:";
      for (std::size_t k = 0; k < coeffs_.size(); ++k) os << (k ? "," : "") << coeffs_[k];
      return os.str();
    case Kind::tabulated:
      os << "table:";
      for (std::size_t k = 0; k < knots_.size(); ++k) os << (k ? "," : "") << knots_[k].first << ":" << knots_[k].second;
      return os.str();
  }
  return "linear";
}

ComplexMatrix transverse_field(int n_qubits, double g2) {
  const int dim = 1 << n_qubits;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  const ComplexMatrix sx = spin_half_ops().x;
  for (int q = 0; q < n_qubits; ++q) h += embed(sx, q, n_qubits);
  return g2 * h;
}

AdiabaticProblem make_problem(const ComplexMatrix& hp, double g1, double g2, Schedule schedule) {
  if (hp.rows() != hp.cols()) throw DimensionMismatch("problem Hamiltonian must be square");
  if (hermiticity_error(hp) > kHermiticityTol) throw NonHermitianInput("problem Hamiltonian is not Hermitian");
  const int n = qubit_count(static_cast<int>(hp.rows()));
  AdiabaticProblem p{transverse_field(n, g2), hp, g1, g2, std::move(schedule), std::nullopt};
  const double scale = std::max({1.0, p.h0.cwiseAbs().maxCoeff(), hp.size() ? hp.cwiseAbs().maxCoeff() : 0.0});
  if (hp.size() == 0 || commutator(p.h0, hp).cwiseAbs().maxCoeff() <= 1e-12 * scale * scale) {
    throw CommutingHamiltonians("[H0, Hp] = 0: the interpolation would cross levels");
  }
  if (n == 2) {
    const ComplexMatrix w = swap_two_qubits();
    if (commutator(w, hp).cwiseAbs().maxCoeff() <= 1e-12 * scale) p.symmetry = w;
  }
  return p;
}

AdiabaticProblem two_qubit_factoring_problem(double g1, double g2, Schedule schedule) {
  const SpinOps s = spin_half_ops();
  const ComplexMatrix hp = g1 * 2.0 * tensor(s.z, s.z);
  return make_problem(hp, g1, g2, std::move(schedule));
}

StateVector bell_target() {
  StateVector psi = StateVector::Zero(4);
  psi(1) = 1.0 / std::sqrt(2.0);
  psi(2) = 1.0 / std::sqrt(2.0);
  return psi;
}

ComplexMatrix hamiltonian_at_s(const AdiabaticProblem& p, double s) { return (1.0 - s) * p.h0 + s * p.hp; }

ComplexMatrix hamiltonian_at(const AdiabaticProblem& p, double t) {
  if (!(t >= 0.0 && t <= p.total_time())) {
    throw TimeOutOfRange("t = " + std::to_string(t) + " outside [0, " + std::to_string(p.total_time()) + "]");
  }
  if (t == 0.0) return p.h0;
  if (t == p.total_time()) return p.hp;
  return hamiltonian_at_s(p, p.schedule(t));
}

StateVector initial_ground_state(const AdiabaticProblem& p) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(p.h0);
  const RealVector& w = solver.eigenvalues();
  if (w.size() > 1 && !(w(1) - w(0) > 1e-9 * std::max(operator_norm(w), 1e-300))) {
    throw DegenerateGround("H0 ground state is degenerate");
  }
  StateVector psi = solver.eigenvectors().col(0);
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    if (std::abs(psi(k)) > 1e-12) {
      psi *= std::conj(psi(k)) / std::abs(psi(k));
      psi(k) = std::abs(psi(k));
      break;
    }
  }
  return psi.normalized();
}

double ground_subspace_fidelity(const StateVector& state, const ComplexMatrix& h, double degeneracy_tol) {
  if (state.size() != h.rows()) throw DimensionMismatch("ground_subspace_fidelity: dimensions differ");
  if (hermiticity_error(h) > kHermiticityTol) throw NonHermitianInput("ground_subspace_fidelity: H not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const RealVector& w = solver.eigenvalues();
  double f = 0.0;
  for (Eigen::Index k = 0; k < w.size() && w(k) <= w(0) + degeneracy_tol; ++k) {
    f += std::norm(solver.eigenvectors().col(k).dot(state));
  }
  return std::clamp(f, 0.0, 1.0);
}

double gap_above_ground(const RealVector& sorted_energies, double degeneracy_tol) {
  for (Eigen::Index k = 1; k < sorted_energies.size(); ++k) {
    if (sorted_energies(k) > sorted_energies(0) + degeneracy_tol) return sorted_energies(k) - sorted_energies(0);
  }
  return 0.0;
}

std::vector<ComplexMatrix> checkpoint_propagators(const HamiltonianFn& h, std::span<const double> checkpoints,
                                                  double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  std::vector<ComplexMatrix> out;
  out.reserve(checkpoints.size());
  ComplexMatrix u;
  double t = 0.0;
  for (double target : checkpoints) {
    if (target < t) throw InvalidArgument("checkpoints must be sorted");
    if (u.size() == 0) u = identity(static_cast<int>(h(0.0).rows()));
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = static_cast<long>(std::max(1.0, std::ceil(span / dt - 1e-9)));
      const double step = span / static_cast<double>(steps);
      for (long k = 0; k < steps; ++k) {
        const double mid = t + (static_cast<double>(k) + 0.5) * step;
        u = expm_hermitian(h(mid), step) * u;
      }
    }
    t = target;
    out.push_back(u);
  }
  return out;
}

std::vector<double> uniform_checkpoints(double total_time, int count) {
  if (count < 2) throw InvalidArgument("need at least two checkpoints");
  std::vector<double> t(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) t[static_cast<std::size_t>(k)] = total_time * k / (count - 1);
  t.back() = total_time;
  return t;
}

Trajectory evolve(const AdiabaticProblem& p, const StepPolicy& policy, std::span<const double> checkpoints) {
  if (checkpoints.empty()) throw InvalidArgument("evolve: no checkpoints");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 0.0 || checkpoints[k] > p.total_time()) {
      throw TimeOutOfRange("checkpoint " + std::to_string(checkpoints[k]) + " outside [0, T]");
    }
    if (k > 0 && checkpoints[k] < checkpoints[k - 1]) throw InvalidArgument("evolve: checkpoints not sorted");
  }
  const StateVector psi0 = initial_ground_state(p);
  const HamiltonianFn h = [&p](double t) { return hamiltonian_at(p, t); };

  double dt = std::min(policy.initial_dt, p.total_time());
  std::vector<ComplexMatrix> props = checkpoint_propagators(h, checkpoints, dt);
  double infidelity = 0.0;
  if (policy.refine) {
    bool converged = false;
    for (int r = 0; r < policy.max_refinements; ++r) {
      std::vector<ComplexMatrix> finer = checkpoint_propagators(h, checkpoints, dt / 2);
      infidelity = 1.0 - fidelity(StateVector(props.back() * psi0), StateVector(finer.back() * psi0));
      dt /= 2;
      props = std::move(finer);
      if (infidelity < policy.refine_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NonConvergent("dt refinement did not converge; last infidelity " + std::to_string(infidelity) +
                          " at dt = " + std::to_string(dt));
    }
  }

  Trajectory traj;
  traj.dt = dt;
  traj.refinement_infidelity = infidelity;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    Checkpoint c;
    c.t = checkpoints[k];
    c.s = p.schedule(c.t);
    c.state = props[k] * psi0;
    c.populations = populations(c.state);
    const ComplexMatrix hk = hamiltonian_at(p, c.t);
    const double norm = operator_norm(hermitian_eigenvalues(hk));
    c.ground_fidelity = ground_subspace_fidelity(c.state, hk, policy.degeneracy_rel * norm);
    c.energy = (c.state.adjoint() * hk * c.state)(0, 0).real();
    traj.points.push_back(std::move(c));
  }
  return traj;
}

namespace {

// Orthonormal basis (columns) of the symmetry eigenspace holding the initial
// ground state; the identity when the problem has no symmetry.
ComplexMatrix sector_basis(const AdiabaticProblem& p) {
  if (!p.symmetry) return identity(p.dim());
  const ComplexMatrix& w = *p.symmetry;
  if (hermiticity_error(w) > kHermiticityTol) throw NonHermitianInput("symmetry operator must be Hermitian");
  const StateVector psi0 = initial_ground_state(p);
  const double label = (psi0.adjoint() * w * psi0)(0, 0).real();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(w);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k)
    if (std::abs(solver.eigenvalues()(k) - label) < 1e-8) cols.push_back(k);
  ComplexMatrix v(p.dim(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = solver.eigenvectors().col(cols[k]);
  return v;
}

double gap_in_sector(const AdiabaticProblem& p, const ComplexMatrix& basis, double s, double degeneracy_rel) {
  const ComplexMatrix h = hamiltonian_at_s(p, s);
  const ComplexMatrix hs = basis.adjoint() * h * basis;
  const RealVector w = hermitian_eigenvalues(0.5 * (hs + hs.adjoint()));
  return gap_above_ground(w, degeneracy_rel * std::max(operator_norm(w), 1e-300));
}

}  // namespace

double sector_gap(const AdiabaticProblem& p, double s, double degeneracy_rel) {
  return gap_in_sector(p, sector_basis(p), s, degeneracy_rel);
}

SpectrumScan spectrum_scan(const AdiabaticProblem& p, std::span<const double> s_grid, Exec exec) {
  for (double s : s_grid)
    if (s < 0.0 || s > 1.0) throw InvalidArgument("spectrum_scan: grid point outside [0, 1]");
  const ComplexMatrix basis = sector_basis(p);
  SpectrumScan out;
  out.s.assign(s_grid.begin(), s_grid.end());
  out.energies.resize(s_grid.size());
  out.sector_gap.resize(s_grid.size());
  for_each_index(exec, static_cast<int>(s_grid.size()), [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    out.energies[k] = hermitian_eigenvalues(hamiltonian_at_s(p, s_grid[k]));
    out.sector_gap[k] = gap_in_sector(p, basis, s_grid[k], 1e-8);
  });
  return out;
}

GapResult min_gap(const AdiabaticProblem& p, int coarse_points, Exec exec) {
  if (coarse_points < 3) throw InvalidArgument("min_gap: need at least 3 coarse points");
  std::vector<double> grid(static_cast<std::size_t>(coarse_points));
  for (int k = 0; k < coarse_points; ++k) grid[static_cast<std::size_t>(k)] = static_cast<double>(k) / (coarse_points - 1);
  const SpectrumScan scan = spectrum_scan(p, grid, exec);
  const auto best = std::min_element(scan.sector_gap.begin(), scan.sector_gap.end());
  const auto idx = static_cast<int>(best - scan.sector_gap.begin());

  const ComplexMatrix basis = sector_basis(p);
  auto f = [&](double s) { return gap_in_sector(p, basis, s, 1e-8); };
  double a = grid[static_cast<std::size_t>(std::max(idx - 1, 0))];
  double b = grid[static_cast<std::size_t>(std::min(idx + 1, coarse_points - 1))];
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-6 * std::max(std::abs(0.5 * (a + b)), 1e-3)) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  GapResult r{*best, grid[static_cast<std::size_t>(idx)]};
  const double mid = 0.5 * (a + b);
  const double fm = f(mid);
  if (fm <= r.g_min) r = {fm, mid};
  return r;
}

std::vector<TimeScanEntry> scan_total_time(const AdiabaticProblem& p, std::span<const double> total_times,
                                           const StepPolicy& policy, Exec exec) {
  std::vector<TimeScanEntry> out(total_times.size());
  for_each_index(exec, static_cast<int>(total_times.size()), [&](int i) {
    const auto k = static_cast<std::size_t>(i);
    AdiabaticProblem q = p;
    q.schedule = p.schedule.with_total_time(total_times[k]);
    const double end[] = {total_times[k]};
    const Trajectory traj = evolve(q, policy, end);
    out[k].total_time = total_times[k];
    out[k].ground_fidelity = traj.final_point().ground_fidelity;
    out[k].target_fidelity =
        q.dim() == 4 ? fidelity(traj.final_point().state, bell_target()) : traj.final_point().ground_fidelity;
  });
  return out;
}

}  // namespace nvfactor::adiabatic
