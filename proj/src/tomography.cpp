#include "nvfactor/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nvfactor/adiabatic.hpp"
#include "nvfactor/errors.hpp"

namespace nvfactor::tomo {

namespace {

std::array<ComplexMatrix, 4> paulis() {
  const SpinOps s = spin_half_ops();
  return {identity(2), 2.0 * s.x, 2.0 * s.y, 2.0 * s.z};
}

ComplexMatrix rotation(double theta, double phi) {
  const SpinOps s = spin_half_ops();
  return expm_hermitian(std::cos(phi) * s.x + std::sin(phi) * s.y, theta);
}

struct SvdSolve {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd;
  double condition = 0.0;
  int rank = 0;
};

const SvdSolve& design_svd() {
  static const SvdSolve solved = [] {
    SvdSolve out{Eigen::JacobiSVD<Eigen::MatrixXd>(design_matrix(), Eigen::ComputeThinU | Eigen::ComputeThinV)};
    const auto& sv = out.svd.singularValues();
    const double tol = sv(0) * 1e-10;
    out.rank = static_cast<int>((sv.array() > tol).count());
    out.condition = sv(0) / sv(sv.size() - 1);
    return out;
  }();
  return solved;
}

}  // namespace

ReadoutSetting setting_from_id(int id) {
  if (id < 0 || id >= kSettings) throw InvalidArgument("readout setting id " + std::to_string(id) + " out of range");
  return {static_cast<ReadoutPulse>(id / 4), static_cast<ReadoutPulse>(id % 4)};
}

std::array<ReadoutSetting, kSettings> all_settings() {
  std::array<ReadoutSetting, kSettings> out;
  for (int k = 0; k < kSettings; ++k) out[static_cast<std::size_t>(k)] = setting_from_id(k);
  return out;
}

std::string pulse_name(ReadoutPulse p) {
  switch (p) {
    case ReadoutPulse::identity: return "identity";
    case ReadoutPulse::pi: return "pi";
    case ReadoutPulse::half_pi_x: return "half_pi_x";
    case ReadoutPulse::half_pi_y: return "half_pi_y";
  }
  return "?";
}

ComplexMatrix pulse_unitary(ReadoutPulse p) {
  switch (p) {
    case ReadoutPulse::identity: return identity(2);
    case ReadoutPulse::pi: return rotation(kPi, 0.0);
    case ReadoutPulse::half_pi_x: return rotation(kPi / 2.0, 0.0);
    case ReadoutPulse::half_pi_y: return rotation(kPi / 2.0, kPi / 2.0);
  }
  throw InvalidArgument("unknown readout pulse");
}

ComplexMatrix setting_unitary(const ReadoutSetting& s) { return tensor(pulse_unitary(s.mw), pulse_unitary(s.rf)); }

TomographyRecord simulate_readout(const DensityMatrix& rho, const ReadoutSetting& s, std::optional<std::int64_t> shots,
                                  std::uint64_t seed) {
  if (rho.dim() != 4) throw DimensionMismatch("tomography expects a two-qubit density matrix");
  const ComplexMatrix u = setting_unitary(s);
  const ComplexMatrix rotated = u * rho.matrix() * u.adjoint();
  TomographyRecord rec;
  rec.setting_id = s.id();
  rec.shots = shots;
  std::array<double, 4> p{};
  for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = std::clamp(rotated(i, i).real(), 0.0, 1.0);
  if (!shots) {
    rec.populations = p;
    return rec;
  }
  if (*shots < 1) throw InvalidArgument("shot count must be positive");

  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(s.id())};
  std::mt19937_64 rng(seq);
  // Multinomial as a chain of conditional binomials.
  std::int64_t remaining = *shots;
  double mass = p[0] + p[1] + p[2] + p[3];
  std::array<std::int64_t, 4> counts{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double q = mass > 0.0 ? std::clamp(p[i] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> draw(remaining, q);
    counts[i] = draw(rng);
    remaining -= counts[i];
    mass -= p[i];
  }
  counts[3] = remaining;
  for (std::size_t i = 0; i < 4; ++i) rec.populations[i] = static_cast<double>(counts[i]) / static_cast<double>(*shots);
  return rec;
}

std::vector<TomographyRecord> simulate_all(const DensityMatrix& rho, std::optional<std::int64_t> shots,
                                           std::uint64_t seed, Exec exec) {
  std::vector<TomographyRecord> out(kSettings);
  for_each_index(exec, kSettings,
                 [&](int k) { out[static_cast<std::size_t>(k)] = simulate_readout(rho, setting_from_id(k), shots, seed); });
  return out;
}

Eigen::MatrixXd design_matrix() {
  const auto sigma = paulis();
  Eigen::MatrixXd a(4 * kSettings, 16);
  for (int k = 0; k < kSettings; ++k) {
    const ComplexMatrix u = setting_unitary(setting_from_id(k));
    for (int col = 0; col < 16; ++col) {
      const ComplexMatrix basis = u * tensor(sigma[static_cast<std::size_t>(col / 4)], sigma[static_cast<std::size_t>(col % 4)]) *
                                  u.adjoint() / 4.0;
      for (int i = 0; i < 4; ++i) a(4 * k + i, col) = basis(i, i).real();
    }
  }
  return a;
}

double design_condition_number() { return design_svd().condition; }

ComplexMatrix project_to_physical(const ComplexMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (hermitian + hermitian.adjoint()));
  const RealVector& lambda = solver.eigenvalues();  // ascending
  const Eigen::Index d = lambda.size();

  // Euclidean projection onto {x >= 0, sum x = 1}.
  double cumulative = 0.0;
  double shift = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double v = lambda(d - 1 - k);
    cumulative += v;
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (v - candidate > 0.0) shift = candidate;
  }
  RealVector projected = (lambda.array() - shift).max(0.0);
  return solver.eigenvectors() * projected.cast<Complex>().asDiagonal() * solver.eigenvectors().adjoint();
}

Reconstruction reconstruct(const std::vector<TomographyRecord>& records) {
  if (records.size() != static_cast<std::size_t>(kSettings)) {
    throw InvalidArgument("reconstruction needs all 16 settings, got " + std::to_string(records.size()));
  }
  std::array<bool, kSettings> seen{};
  Eigen::VectorXd b(4 * kSettings);
  for (const auto& rec : records) {
    if (rec.setting_id < 0 || rec.setting_id >= kSettings || seen[static_cast<std::size_t>(rec.setting_id)]) {
      throw InvalidArgument("setting " + std::to_string(rec.setting_id) + " missing, repeated or out of range");
    }
    seen[static_cast<std::size_t>(rec.setting_id)] = true;
    for (int i = 0; i < 4; ++i) b(4 * rec.setting_id + i) = rec.populations[static_cast<std::size_t>(i)];
  }

  const SvdSolve& solve = design_svd();
  if (solve.rank < 16) throw RankDeficient("tomography design has rank " + std::to_string(solve.rank));
  const Eigen::VectorXd r = solve.svd.solve(b);

  const auto sigma = paulis();
  ComplexMatrix raw = ComplexMatrix::Zero(4, 4);
  for (int col = 0; col < 16; ++col) {
    raw += r(col) * tensor(sigma[static_cast<std::size_t>(col / 4)], sigma[static_cast<std::size_t>(col % 4)]) / 4.0;
  }
  raw = 0.5 * (raw + raw.adjoint()).eval();
  Reconstruction out{raw, DensityMatrix(project_to_physical(raw)), solve.condition, (design_matrix() * r - b).norm()};
  return out;
}

double report_fidelity(const DensityMatrix& rho) { return fidelity(rho, adiabatic::bell_target()); }

}  // namespace nvfactor::tomo
