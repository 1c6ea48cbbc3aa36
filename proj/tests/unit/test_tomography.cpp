#include <doctest.h>

#include <random>
#include <set>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/errors.hpp"
#include "nvfactor/tomography.hpp"
#include "support/oracles.hpp"

using namespace nvfactor;
using namespace nvfactor::tomo;

TEST_SUITE("tomography") {

TEST_CASE("16 settings in documented order") {
  const auto all = all_settings();
  std::set<int> ids;
  for (int k = 0; k < kSettings; ++k) {
    CHECK(all[static_cast<std::size_t>(k)].id() == k);
    ids.insert(all[static_cast<std::size_t>(k)].id());
  }
  CHECK(ids.size() == 16);
  CHECK(all[1].mw == ReadoutPulse::identity);
  CHECK(all[1].rf == ReadoutPulse::pi);
  CHECK(all[4].mw == ReadoutPulse::pi);
  CHECK_THROWS_AS(setting_from_id(16), InvalidArgument);
}

TEST_CASE("readout of basis states") {
  const auto rho = DensityMatrix::pure(basis_state(4, 0));
  const auto id = simulate_readout(rho, {ReadoutPulse::identity, ReadoutPulse::identity});
  CHECK(id.populations[0] == doctest::Approx(1.0));
  const auto flip = simulate_readout(rho, {ReadoutPulse::pi, ReadoutPulse::identity});
  CHECK(flip.populations[2] == doctest::Approx(1.0));
  CHECK(flip.populations[0] == doctest::Approx(0.0));
  CHECK_FALSE(flip.shots.has_value());
}

TEST_CASE("half_pi_x on both qubits of the Bell target") {
  const double c = 1.0 / std::sqrt(2.0);
  ComplexMatrix rx(2, 2);
  rx << c, Complex(0, -c), Complex(0, -c), c;
  ComplexMatrix u(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e)
        for (int f = 0; f < 2; ++f) u(2 * a + b, 2 * e + f) = rx(a, e) * rx(b, f);
  const StateVector psi = adiabatic::bell_target();
  const ComplexMatrix expected = u * psi * psi.adjoint() * u.adjoint();
  const auto rec =
      simulate_readout(DensityMatrix::pure(psi), {ReadoutPulse::half_pi_x, ReadoutPulse::half_pi_x});
  for (int i = 0; i < 4; ++i) CHECK(rec.populations[static_cast<std::size_t>(i)] == doctest::Approx(expected(i, i).real()));
}

TEST_CASE("pulse axes") {
  const SpinOps s = spin_half_ops();
  // pi/2 about y takes S_z to S_x under U^dagger . U
  const ComplexMatrix uy = pulse_unitary(ReadoutPulse::half_pi_y);
  CHECK(max_abs_diff(uy.adjoint() * s.z * uy, -s.x) < 1e-12);
  const ComplexMatrix ux = pulse_unitary(ReadoutPulse::half_pi_x);
  CHECK(max_abs_diff(ux.adjoint() * s.z * ux, s.y) < 1e-12);
}

TEST_CASE("exact reconstruction inverts simulation") {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix truth = oracle::random_density(rng, 4, 1 + k % 4);
    const auto rec = reconstruct(simulate_all(DensityMatrix(truth)));
    CHECK(max_abs_diff(rec.rho.matrix(), truth) < 1e-10);
    CHECK(oracle::uhlmann_fidelity(rec.rho.matrix(), truth) >= 1.0 - 1e-9);
  }
  const auto bell = DensityMatrix::pure(adiabatic::bell_target());
  CHECK(report_fidelity(reconstruct(simulate_all(bell)).rho) == doctest::Approx(1.0).epsilon(1e-9));
  const auto mixed = reconstruct(simulate_all(DensityMatrix::maximally_mixed(4)));
  CHECK(max_abs_diff(mixed.rho.matrix(), identity(4) / 4.0) < 1e-12);
  CHECK(report_fidelity(mixed.rho) == doctest::Approx(0.25));
}

TEST_CASE("finite shots on the Bell target") {
  const auto bell = DensityMatrix::pure(adiabatic::bell_target());
  const auto records = simulate_all(bell, 100000, 7);
  for (const auto& r : records) {
    CHECK(*r.shots == 100000);
    double sum = 0.0;
    for (double p : r.populations) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(report_fidelity(reconstruct(records).rho) >= 0.995);
}

TEST_CASE("finite-shot readout is seeded and schedule independent") {
  const auto bell = DensityMatrix::pure(adiabatic::bell_target());
  const auto a = simulate_all(bell, 1000, 5, Exec::serial);
  const auto b = simulate_all(bell, 1000, 5, Exec::parallel);
  const auto c = simulate_all(bell, 1000, 6, Exec::serial);
  bool same = true, differs = false;
  for (int k = 0; k < kSettings; ++k) {
    same = same && a[static_cast<std::size_t>(k)].populations == b[static_cast<std::size_t>(k)].populations;
    differs = differs || a[static_cast<std::size_t>(k)].populations != c[static_cast<std::size_t>(k)].populations;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("physical projection never moves away from the true state") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 0.05);
  for (int k = 0; k < 200; ++k) {
    const ComplexMatrix truth = oracle::random_density(rng, 4, 1 + k % 2);
    ComplexMatrix noise(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) noise(i, j) = {n(rng), n(rng)};
    ComplexMatrix h = truth + 0.5 * (noise + noise.adjoint());
    h -= (h.trace().real() - 1.0) / 4.0 * identity(4);
    const ComplexMatrix projected = project_to_physical(h);
    CHECK((projected - truth).norm() <= (h - truth).norm() + 1e-12);
    CHECK_NOTHROW(DensityMatrix{projected});
  }
}

TEST_CASE("design matrix") {
  const auto a = design_matrix();
  CHECK(a.rows() == 64);
  CHECK(a.cols() == 16);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  CHECK(svd.rank() == 16);
  CHECK(design_condition_number() == design_condition_number());
  CHECK(design_condition_number() == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("incomplete record sets are rejected") {
  auto records = simulate_all(DensityMatrix::maximally_mixed(4));
  records.pop_back();
  CHECK_THROWS_AS(reconstruct(records), InvalidArgument);
  records.push_back(records.front());
  CHECK_THROWS_AS(reconstruct(records), InvalidArgument);
}

}  // TEST_SUITE
