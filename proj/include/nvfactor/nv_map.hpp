#pragma once

// NV-centre ground-state spin model and the rotating-frame realisation of the
// two-qubit adiabatic Hamiltonian.
//
// Register encoding (fixed here, the source labels are ambiguous): electron
// qubit 0 <-> m_s = 0, electron qubit 1 <-> m_s = -1; nuclear qubit 0 <->
// m_I = +1, nuclear qubit 1 <-> m_I = 0. So |01> is |m_s = 0, m_I = 0>.

#include <array>
#include <vector>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/qcore.hpp"

namespace nvfactor::nv {

struct NvParams {
  double d_mhz = 2870.0;       // zero-field splitting
  double q_mhz = -4.95;        // 14N quadrupolar splitting
  double bz_gauss = 510.0;     // axial field
  // Standard reference values; not part of the modelled experiment's record.
  double gamma_e_mhz_per_g = 2.8025;
  double gamma_n_khz_per_g = 0.3077;
  double a_par_mhz = -2.16;    // secular 14N hyperfine
};

struct Level {
  int m_s = 0;
  int m_i = 0;
  double energy_mhz = 0.0;
};

// E = D m_s^2 + gamma_e Bz m_s + Q m_I^2 + gamma_n Bz m_I + A_par m_s m_I over
// the 9 levels, ordered m_s = -1, 0, 1 then m_I = -1, 0, 1.
std::array<Level, 9> level_energies(const NvParams& p);
double level_energy(const NvParams& p, int m_s, int m_i);

// (m_s, m_I) of the encoded basis state |e n>, index 2*e + n.
std::array<std::pair<int, int>, 4> encoded_levels();

struct RotFrameParams {
  double omega_mw = 0.0;  // MW Rabi frequency
  double omega_rf = 0.0;  // RF Rabi frequency
  double delta_mw = 0.0;  // MW detuning
  double delta_rf = 0.0;  // RF detuning
};

struct RotFrameHamiltonian {
  ComplexMatrix traceless;         // 2 Omega_MW S_x I_z - delta_RF I_z + Omega_RF I_x - delta_MW S_z
  double identity_offset = 0.0;    // delta_MW + delta_RF, coefficient of the identity
  ComplexMatrix full() const { return traceless + identity_offset * identity(4); }
};

RotFrameHamiltonian rot_frame_hamiltonian(const RotFrameParams& r);

// (Hd (x) I) H (Hd (x) I) with Hd the single-qubit Hadamard on the electron.
ComplexMatrix hadamard_conjugate_electron(const ComplexMatrix& h);

// Direct rotating-frame controls for H(t): delta_RF = 0, Omega_MW = s g1,
// Omega_RF = (1 - s) g2 = -delta_MW. Throws TimeOutOfRange.
RotFrameParams schedule_to_controls(const adiabatic::AdiabaticProblem& p, double t);

}  // namespace nvfactor::nv
