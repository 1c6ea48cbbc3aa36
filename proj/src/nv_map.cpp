#include "nvfactor/nv_map.hpp"

#include <string>

#include "nvfactor/errors.hpp"

namespace nvfactor::nv {

double level_energy(const NvParams& p, int m_s, int m_i) {
  const double gamma_n_mhz = p.gamma_n_khz_per_g * 1e-3;
  return p.d_mhz * m_s * m_s + p.gamma_e_mhz_per_g * p.bz_gauss * m_s + p.q_mhz * m_i * m_i +
         gamma_n_mhz * p.bz_gauss * m_i + p.a_par_mhz * m_s * m_i;
}

std::array<Level, 9> level_energies(const NvParams& p) {
  std::array<Level, 9> out{};
  std::size_t k = 0;
  for (int ms = -1; ms <= 1; ++ms)
    for (int mi = -1; mi <= 1; ++mi) out[k++] = {ms, mi, level_energy(p, ms, mi)};
  return out;
}

std::array<std::pair<int, int>, 4> encoded_levels() { return {{{0, 1}, {0, 0}, {-1, 1}, {-1, 0}}}; }

RotFrameHamiltonian rot_frame_hamiltonian(const RotFrameParams& r) {
  const SpinOps s = spin_half_ops();
  const ComplexMatrix i2 = identity(2);
  RotFrameHamiltonian h;
  h.traceless = 2.0 * r.omega_mw * tensor(s.x, s.z) - r.delta_rf * tensor(i2, s.z) + r.omega_rf * tensor(i2, s.x) -
                r.delta_mw * tensor(s.z, i2);
  h.identity_offset = r.delta_mw + r.delta_rf;
  return h;
}

ComplexMatrix hadamard_conjugate_electron(const ComplexMatrix& h) {
  if (h.rows() != 4 || h.cols() != 4) throw DimensionMismatch("hadamard_conjugate_electron expects a 4x4 operator");
  const ComplexMatrix u = tensor(hadamard(), identity(2));
  return u * h * u;
}

RotFrameParams schedule_to_controls(const adiabatic::AdiabaticProblem& p, double t) {
  if (!(t >= 0.0 && t <= p.total_time())) {
    throw TimeOutOfRange("t = " + std::to_string(t) + " outside [0, " + std::to_string(p.total_time()) + "]");
  }
  const double s = p.schedule(t);
  RotFrameParams r;
  r.delta_rf = 0.0;
  r.omega_mw = s * p.g1;
  r.omega_rf = (1.0 - s) * p.g2;
  r.delta_mw = -r.omega_rf;
  return r;
}

}  // namespace nvfactor::nv
