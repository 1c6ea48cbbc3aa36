#pragma once

// Two-qubit state tomography from the 16 products of single-qubit readout
// pulses {identity, pi, pi/2_x, pi/2_y} on electron (MW) and nucleus (RF),
// each followed by a population measurement in the computational basis.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvfactor/parallel.hpp"
#include "nvfactor/qcore.hpp"

namespace nvfactor::tomo {

enum class ReadoutPulse { identity, pi, half_pi_x, half_pi_y };

inline constexpr int kSettings = 16;

// Setting id = 4 * mw + rf with pulses ordered as in ReadoutPulse.
struct ReadoutSetting {
  ReadoutPulse mw = ReadoutPulse::identity;
  ReadoutPulse rf = ReadoutPulse::identity;

  int id() const { return 4 * static_cast<int>(mw) + static_cast<int>(rf); }
};

ReadoutSetting setting_from_id(int id);
std::array<ReadoutSetting, kSettings> all_settings();
std::string pulse_name(ReadoutPulse p);

// exp(-i theta (cos phi S_x + sin phi S_y)): pi and pi/2_x about x, pi/2_y about y.
ComplexMatrix pulse_unitary(ReadoutPulse p);
ComplexMatrix setting_unitary(const ReadoutSetting& s);

struct TomographyRecord {
  int setting_id = 0;
  std::array<double, 4> populations{};
  std::optional<std::int64_t> shots;  // empty in exact mode
};

// Exact populations when `shots` is empty, otherwise a multinomial draw whose
// stream depends only on (seed, setting id).
TomographyRecord simulate_readout(const DensityMatrix& rho, const ReadoutSetting& s,
                                  std::optional<std::int64_t> shots = std::nullopt, std::uint64_t seed = 0);
std::vector<TomographyRecord> simulate_all(const DensityMatrix& rho, std::optional<std::int64_t> shots = std::nullopt,
                                           std::uint64_t seed = 0, Exec exec = Exec::parallel);

// 64 x 16 map from the Pauli coordinates r_ab of rho = sum r_ab sigma_a(x)sigma_b / 4
// to the populations of all settings, rows ordered (setting, outcome).
Eigen::MatrixXd design_matrix();
double design_condition_number();

// Closest density matrix in Frobenius norm: the eigenvalues are projected onto
// the probability simplex.
ComplexMatrix project_to_physical(const ComplexMatrix& hermitian);

struct Reconstruction {
  ComplexMatrix raw;  // least-squares estimate, Hermitian but maybe not PSD
  DensityMatrix rho = DensityMatrix::maximally_mixed(4);
  double condition_number = 0.0;
  double residual = 0.0;  // Euclidean norm of the population misfit
};

// Throws InvalidArgument unless each setting appears exactly once, and
// RankDeficient if the design loses rank.
Reconstruction reconstruct(const std::vector<TomographyRecord>& records);

// <Psi_f | rho | Psi_f>.
double report_fidelity(const DensityMatrix& rho);

}  // namespace nvfactor::tomo
