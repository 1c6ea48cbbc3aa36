#pragma once

// Independent reference computations used by the unit and acceptance suites.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nvfactor/pulse_opt.hpp"
#include "nvfactor/qcore.hpp"

namespace oracle {

// All (x, y) with x * y == n where x has exactly wx bits, y exactly wy bits
// (leading bit set) and both are odd.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> odd_factor_pairs(std::uint64_t n, int wx, int wy) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t x = (1ull << (wx - 1)) | 1u; x < (1ull << wx); x += 2)
    for (std::uint64_t y = (1ull << (wy - 1)) | 1u; y < (1ull << wy); y += 2)
      if (x * y == n) out.emplace_back(x, y);
  return out;
}

// Gap inside the exchange-symmetric sector of (1-s) g2 (Sx + Ix) + s g1 2 Sz Iz.
// In the triplet basis {|00>+|11>, |01>+|10>, |00>-|11>} the last state
// decouples at energy s g1 / 2 and the rest is the 2x2 block
// [[s g1/2, (1-s) g2], [(1-s) g2, -s g1/2]]; the decoupled level is always the
// nearer one above the ground.
inline double sector_gap_closed_form(double g1, double g2, double s) {
  const double a = s * g1 / 2.0;
  const double b = (1.0 - s) * g2;
  const double root = std::sqrt(a * a + b * b);
  return a + root;
}

// Transfer fidelity propagated in extended precision.
inline long double fidelity_extended(const nvfactor::pulse::ControlProblem& cp,
                                     const nvfactor::pulse::PulseSequence& p) {
  using CL = std::complex<long double>;
  using ML = Eigen::Matrix<CL, Eigen::Dynamic, Eigen::Dynamic>;
  using VL = Eigen::Matrix<CL, Eigen::Dynamic, 1>;
  const long double two_pi = 6.283185307179586476925286766559005768L;
  const Eigen::Index d = cp.initial.size();
  VL psi = cp.initial.cast<CL>();
  for (int j = 0; j < p.n_segments(); ++j) {
    ML h = cp.drift.cast<CL>();
    for (int k = 0; k < cp.n_channels(); ++k) {
      h += static_cast<long double>(p.amplitudes(j, k)) * cp.channels[static_cast<std::size_t>(k)].op.cast<CL>();
    }
    h *= two_pi * static_cast<long double>(cp.angular_scale / (2.0 * nvfactor::kPi));
    Eigen::SelfAdjointEigenSolver<ML> es(h);
    VL phase(d);
    for (Eigen::Index a = 0; a < d; ++a) {
      phase(a) = std::exp(CL(0.0L, -es.eigenvalues()(a) * static_cast<long double>(p.segment_us)));
    }
    psi = es.eigenvectors() * (phase.asDiagonal() * (es.eigenvectors().adjoint() * psi));
  }
  return std::norm(cp.target.cast<CL>().dot(psi));
}

// Central differences of fidelity_extended, step h on one amplitude.
inline double finite_difference(const nvfactor::pulse::ControlProblem& cp, const nvfactor::pulse::PulseSequence& p,
                                int segment, int channel, double h = 1e-6) {
  auto plus = p;
  auto minus = p;
  plus.amplitudes(segment, channel) += h;
  minus.amplitudes(segment, channel) -= h;
  const long double span = static_cast<long double>(plus.amplitudes(segment, channel)) -
                           static_cast<long double>(minus.amplitudes(segment, channel));
  return static_cast<double>((fidelity_extended(cp, plus) - fidelity_extended(cp, minus)) / span);
}

inline nvfactor::StateVector random_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> n(0.0, 1.0);
  nvfactor::StateVector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = {n(rng), n(rng)};
  return v / v.norm();
}

// Ginibre-distributed density matrix of the given rank.
inline nvfactor::ComplexMatrix random_density(std::mt19937_64& rng, int dim, int rank) {
  std::normal_distribution<double> n(0.0, 1.0);
  nvfactor::ComplexMatrix g(dim, rank);
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < rank; ++k) g(i, k) = {n(rng), n(rng)};
  nvfactor::ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double uhlmann_fidelity(const nvfactor::ComplexMatrix& a, const nvfactor::ComplexMatrix& b) {
  auto psd_sqrt = [](const nvfactor::ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<nvfactor::ComplexMatrix> es(0.5 * (m + m.adjoint()));
    const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return nvfactor::ComplexMatrix(es.eigenvectors() * root.cast<nvfactor::Complex>().asDiagonal() *
                                   es.eigenvectors().adjoint());
  };
  const nvfactor::ComplexMatrix ra = psd_sqrt(a);
  const double t = psd_sqrt(ra * b * ra).trace().real();
  return t * t;
}

}  // namespace oracle
