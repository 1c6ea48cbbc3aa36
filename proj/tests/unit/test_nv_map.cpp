#include <doctest.h>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/errors.hpp"
#include "nvfactor/nv_map.hpp"

using namespace nvfactor;
using namespace nvfactor::nv;

TEST_SUITE("nv_map") {

TEST_CASE("level energies") {
  const NvParams p;
  CHECK(level_energy(p, 0, 0) == 0.0);
  const auto levels = level_energies(p);
  CHECK(levels.size() == 9);
  CHECK(levels[4].m_s == 0);
  CHECK(levels[4].m_i == 0);
  CHECK(levels[4].energy_mhz == 0.0);
  // Electron Zeeman splitting of the m_I = 0 pair.
  CHECK(level_energy(p, 1, 0) - level_energy(p, -1, 0) == doctest::Approx(2 * p.gamma_e_mhz_per_g * p.bz_gauss));
  CHECK(level_energy(p, 1, 0) + level_energy(p, -1, 0) == doctest::Approx(2 * p.d_mhz));
  CHECK(level_energy(p, 0, 1) + level_energy(p, 0, -1) == doctest::Approx(2 * p.q_mhz));
}

TEST_CASE("level energies are affine in the field and bilinear in the hyperfine term") {
  NvParams lo, mid, hi;
  lo.bz_gauss = 100.0;
  mid.bz_gauss = 300.0;
  hi.bz_gauss = 500.0;
  for (int ms = -1; ms <= 1; ++ms) {
    for (int mi = -1; mi <= 1; ++mi) {
      CHECK(level_energy(lo, ms, mi) + level_energy(hi, ms, mi) ==
            doctest::Approx(2 * level_energy(mid, ms, mi)).epsilon(1e-13));
      const NvParams p;
      const double mixed = level_energy(p, ms, mi) - level_energy(p, ms, 0) - level_energy(p, 0, mi);
      CHECK(mixed == doctest::Approx(p.a_par_mhz * ms * mi).epsilon(1e-10));
    }
  }
}

TEST_CASE("encoded register") {
  const auto e = encoded_levels();
  CHECK(e[0] == std::pair{0, 1});
  CHECK(e[1] == std::pair{0, 0});
  CHECK(e[2] == std::pair{-1, 1});
  CHECK(e[3] == std::pair{-1, 0});
}

TEST_CASE("Hadamard conjugation on single knobs") {
  const SpinOps s = spin_half_ops();
  const ComplexMatrix i2 = identity(2);
  CHECK(max_abs_diff(hadamard_conjugate_electron(tensor(s.x, s.z)), tensor(s.z, s.z)) < 1e-15);
  CHECK(max_abs_diff(hadamard_conjugate_electron(tensor(s.z, i2)), tensor(s.x, i2)) < 1e-15);
  CHECK(max_abs_diff(hadamard_conjugate_electron(tensor(i2, s.x)), tensor(i2, s.x)) < 1e-15);
  CHECK_THROWS_AS(hadamard_conjugate_electron(identity(2)), DimensionMismatch);
}

TEST_CASE("rotating-frame Hamiltonian") {
  RotFrameParams r{0.3, 0.2, -0.4, 0.1};
  const auto h = rot_frame_hamiltonian(r);
  CHECK(std::abs(h.traceless.trace()) < 1e-15);
  CHECK(h.identity_offset == doctest::Approx(-0.3));
  CHECK(hermiticity_error(h.full()) == 0.0);
}

TEST_CASE("mapped controls reproduce the adiabatic Hamiltonian on a 101-point grid") {
  const SpinOps s = spin_half_ops();
  for (const auto& [g1, g2] : std::vector<std::pair<double, double>>{{1, 1}, {2.5, 0.4}}) {
    const auto p = adiabatic::two_qubit_factoring_problem(g1, g2, adiabatic::Schedule::linear(10.0));
    for (int k = 0; k <= 100; ++k) {
      const double t = 10.0 * k / 100.0;
      const double sv = p.schedule(t);
      const auto r = schedule_to_controls(p, t);
      CHECK(r.delta_rf == 0.0);
      CHECK(r.delta_mw == -r.omega_rf);
      const ComplexMatrix target = sv * g1 * 2.0 * tensor(s.z, s.z) +
                                   (1.0 - sv) * g2 * (tensor(s.x, identity(2)) + tensor(identity(2), s.x));
      const ComplexMatrix mapped = hadamard_conjugate_electron(rot_frame_hamiltonian(r).traceless);
      CHECK(max_abs_diff(mapped, target) <= 1e-12);
    }
  }
}

TEST_CASE("controls outside the schedule window") {
  const auto p = adiabatic::two_qubit_factoring_problem(1, 1, adiabatic::Schedule::linear(1.0));
  CHECK_THROWS_AS(schedule_to_controls(p, 1.5), TimeOutOfRange);
}

}  // TEST_SUITE
