#pragma once

// Dense complex linear algebra for the small (dim <= 16) Hilbert spaces used
// throughout the pipeline.
//
// Basis convention: qubit 0 is the most significant tensor factor. For the NV
// register qubit 0 is the electron spin and qubit 1 the 14N nuclear spin, so
// basis index 2*e + n labels |e n>. Qubit value 0 is the +1/2 eigenstate of the
// spin-1/2 operator S_z.

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nvfactor {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-9;
inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kPi = 3.14159265358979323846;

struct Tolerances {
  double hermiticity = kHermiticityTol;
  double unitarity = kUnitarityTol;
};

struct SpinOps {
  ComplexMatrix x;
  ComplexMatrix y;
  ComplexMatrix z;
};

// Spin-1/2 operators (eigenvalues +-1/2) in the basis |0>, |1>.
SpinOps spin_half_ops();

ComplexMatrix identity(int dim);
ComplexMatrix hadamard();
// Exchanges the two factors of a 2-qubit register.
ComplexMatrix swap_two_qubits();

// Kronecker product; the left operand is the more significant factor.
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);

// Embeds a single-qubit operator on qubit `target` of an n-qubit register.
ComplexMatrix embed(const ComplexMatrix& single, int target, int n_qubits);

double hermiticity_error(const ComplexMatrix& m);
double unitarity_error(const ComplexMatrix& u);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// Ascending eigenvalues of a Hermitian matrix.
RealVector hermitian_eigenvalues(const ComplexMatrix& h, double tol = kHermiticityTol);

// exp(-i H t) through a full eigendecomposition. Throws NonHermitianInput.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t, double tol = kHermiticityTol);

StateVector basis_state(int dim, int index);
std::vector<double> populations(const StateVector& psi);

// Hermitian, unit-trace, positive semidefinite matrix. Construction validates.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix rho, double tol = kHermiticityTol);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int dim);

  const ComplexMatrix& matrix() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }
  std::vector<double> populations() const;

 private:
  ComplexMatrix rho_;
};

// |<b|a>|^2 for pure states, <b|rho|b> for mixed. Throws DimensionMismatch.
double fidelity(const StateVector& a, const StateVector& b);
double fidelity(const DensityMatrix& rho, const StateVector& b);

}  // namespace nvfactor
