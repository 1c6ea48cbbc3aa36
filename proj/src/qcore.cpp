#include "nvfactor/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvfactor/errors.hpp"

namespace nvfactor {

namespace {
const Complex kI(0.0, 1.0);
}

SpinOps spin_half_ops() {
  SpinOps ops{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 2)};
  ops.x(0, 1) = 0.5;
  ops.x(1, 0) = 0.5;
  ops.y(0, 1) = -0.5 * kI;
  ops.y(1, 0) = 0.5 * kI;
  ops.z(0, 0) = 0.5;
  ops.z(1, 1) = -0.5;
  return ops;
}

ComplexMatrix identity(int dim) { return ComplexMatrix::Identity(dim, dim); }

ComplexMatrix hadamard() {
  ComplexMatrix h(2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

ComplexMatrix swap_two_qubits() {
  ComplexMatrix w = ComplexMatrix::Zero(4, 4);
  w(0, 0) = 1.0;
  w(1, 2) = 1.0;
  w(2, 1) = 1.0;
  w(3, 3) = 1.0;
  return w;
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix embed(const ComplexMatrix& single, int target, int n_qubits) {
  if (target < 0 || target >= n_qubits) {
    throw InvalidArgument("embed: qubit " + std::to_string(target) + " outside register of " +
                          std::to_string(n_qubits));
  }
  ComplexMatrix out = identity(1);
  for (int q = 0; q < n_qubits; ++q) {
    out = tensor(out, q == target ? single : identity(2));
  }
  return out;
}

double hermiticity_error(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) return INFINITY;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_error(const ComplexMatrix& u) {
  if (u.rows() != u.cols()) return INFINITY;
  return (u.adjoint() * u - identity(static_cast<int>(u.rows()))).cwiseAbs().maxCoeff();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionMismatch("max_abs_diff: shapes differ");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) { return a * b - b * a; }

namespace {

void require_hermitian(const ComplexMatrix& h, double tol, const char* where) {
  const double err = hermiticity_error(h);
  if (!(err <= tol)) {
    throw NonHermitianInput(std::string(where) + ": max |H - H^dagger| = " + std::to_string(err));
  }
}

}  // namespace

RealVector hermitian_eigenvalues(const ComplexMatrix& h, double tol) {
  require_hermitian(h, tol, "hermitian_eigenvalues");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t, double tol) {
  require_hermitian(h, tol, "expm_hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  const RealVector& w = solver.eigenvalues();
  const ComplexMatrix& v = solver.eigenvectors();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::exp(-kI * (w(k) * t));
  return v * phases.asDiagonal() * v.adjoint();
}

StateVector basis_state(int dim, int index) {
  if (index < 0 || index >= dim) {
    throw InvalidArgument("basis_state: index " + std::to_string(index) + " outside dimension " +
                          std::to_string(dim));
  }
  StateVector psi = StateVector::Zero(dim);
  psi(index) = 1.0;
  return psi;
}

std::vector<double> populations(const StateVector& psi) {
  std::vector<double> p(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index k = 0; k < psi.size(); ++k) p[static_cast<std::size_t>(k)] = std::norm(psi(k));
  return p;
}

DensityMatrix::DensityMatrix(ComplexMatrix rho, double tol) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw InvalidDensityMatrix("density matrix must be square and non-empty");
  }
  const double herm = hermiticity_error(rho_);
  if (herm > tol) throw InvalidDensityMatrix("density matrix not Hermitian: " + std::to_string(herm));
  const double trace_err = std::abs(rho_.trace() - Complex(1.0, 0.0));
  if (trace_err > tol) throw InvalidDensityMatrix("density matrix trace off by " + std::to_string(trace_err));
  // Symmetrise before the eigen check so roundoff in the anti-Hermitian part
  // cannot leak into the spectrum.
  const ComplexMatrix sym = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  const double min_eig = solver.eigenvalues()(0);
  if (min_eig < -tol) throw InvalidDensityMatrix("density matrix has eigenvalue " + std::to_string(min_eig));
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw InvalidDensityMatrix("pure state from zero vector");
  const StateVector u = psi / n;
  return DensityMatrix(u * u.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

std::vector<double> DensityMatrix::populations() const {
  std::vector<double> p(static_cast<std::size_t>(dim()));
  for (int k = 0; k < dim(); ++k) p[static_cast<std::size_t>(k)] = rho_(k, k).real();
  return p;
}

namespace {
double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }
}  // namespace

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("fidelity: state dimensions differ");
  return clamp_unit(std::norm(b.dot(a)));
}

double fidelity(const DensityMatrix& rho, const StateVector& b) {
  if (rho.dim() != b.size()) throw DimensionMismatch("fidelity: density matrix and state dimensions differ");
  return clamp_unit((b.adjoint() * rho.matrix() * b)(0, 0).real());
}

}  // namespace nvfactor
