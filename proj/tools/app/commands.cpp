#include "app/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "app/artifacts.hpp"
#include "nvfactor/errors.hpp"
#include "nvfactor/nv_map.hpp"
#include "nvfactor/text_format.hpp"

namespace nvfactor::app {

namespace fs = std::filesystem;

namespace {

constexpr double kBandLow = 0.75;
constexpr double kBandHigh = 0.87;
constexpr double kBandCenter = 0.81;

std::string kind_name(factor::VarKind k) {
  switch (k) {
    case factor::VarKind::multiplier_x: return "multiplier_x";
    case factor::VarKind::multiplier_y: return "multiplier_y";
    case factor::VarKind::carry: return "carry";
  }
  return "?";
}

std::uint64_t bits_value(const std::vector<factor::Polynomial>& bits, std::span<const std::uint8_t> values) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) v |= static_cast<std::uint64_t>(bits[i].evaluate(values)) << i;
  return v;
}

// Factor pairs from exhaustive enumeration of the unsimplified column equations.
std::vector<std::pair<std::uint64_t, std::uint64_t>> enumerated_factors(const factor::CompiledProblem& c) {
  const auto sols = factor::brute_force_solutions(c.original);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  std::vector<std::uint8_t> values(c.original.variables.size(), 0);
  for (const auto& row : sols.assignments) {
    for (std::size_t i = 0; i < row.size(); ++i) values[static_cast<std::size_t>(sols.variables[i])] = row[i];
    out.emplace_back(bits_value(c.table.x_bits, values), bits_value(c.table.y_bits, values));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

nlohmann::ordered_json compile_json(const factor::CompiledProblem& c) {
  const auto& sys = c.simplified.system;
  auto name = [&sys](int id) { return sys.variables[static_cast<std::size_t>(id)].name; };
  nlohmann::ordered_json j;
  j["n"] = c.table.n;
  j["width_x"] = c.table.width_x;
  j["width_y"] = c.table.width_y;
  auto vars = nlohmann::ordered_json::array();
  for (const auto& v : c.table.variables) {
    nlohmann::ordered_json e;
    e["name"] = v.name;
    e["kind"] = kind_name(v.kind);
    if (v.kind == factor::VarKind::carry) {
      e["from_column"] = v.from_column;
      e["to_column"] = v.to_column;
    } else {
      e["bit"] = v.bit;
    }
    vars.push_back(std::move(e));
  }
  j["variables"] = std::move(vars);
  auto column_eqs = nlohmann::ordered_json::array();
  for (const auto& eq : c.original.equations) column_eqs.push_back(c.original.render(eq));
  j["column_equations"] = std::move(column_eqs);
  auto reduced = nlohmann::ordered_json::array();
  for (const auto& eq : sys.equations) reduced.push_back(sys.render(eq));
  j["reduced_equations"] = std::move(reduced);
  nlohmann::ordered_json fixed = nlohmann::ordered_json::object();
  for (const auto& [id, v] : sys.fixed) fixed[name(id)] = v;
  j["fixed"] = std::move(fixed);
  nlohmann::ordered_json elim = nlohmann::ordered_json::object();
  for (const auto& [id, poly] : sys.eliminated) elim[name(id)] = poly.to_string(name);
  j["eliminated"] = std::move(elim);
  nlohmann::ordered_json rules = nlohmann::ordered_json::object();
  for (const auto& [rule, count] : c.simplified.rule_counts) rules[rule] = count;
  j["rule_counts"] = std::move(rules);
  auto ledger = nlohmann::ordered_json::array();
  for (const auto& r : c.simplified.ledger) ledger.push_back(r.rule + ": " + r.detail);
  j["rule_ledger"] = std::move(ledger);
  j["iterations"] = c.simplified.iterations;
  j["verified"] = c.simplified.verified;
  auto unknowns = nlohmann::ordered_json::array();
  for (int id : sys.unknowns()) unknowns.push_back(name(id));
  j["unknowns"] = std::move(unknowns);

  if (c.hamiltonian) {
    const auto& h = *c.hamiltonian;
    auto qubits = nlohmann::ordered_json::array();
    for (int id : h.qubit_variables) qubits.push_back(name(id));
    nlohmann::ordered_json hj;
    hj["qubits"] = std::move(qubits);
    hj["g1"] = num(h.g1);
    hj["offset"] = num(h.offset);
    std::vector<double> diag;
    for (Eigen::Index i = 0; i < h.op.rows(); ++i) diag.push_back(h.op(i, i).real());
    hj["diagonal"] = nums(diag);
    j["hamiltonian"] = std::move(hj);
    auto ground = nlohmann::ordered_json::array();
    for (int b : factor::ground_basis_states(h)) {
      const auto d = factor::decode_solution(b, h, c.table);
      nlohmann::ordered_json g;
      g["basis"] = h.n_qubits() ? basis_label(b, h.n_qubits()) : std::string("-");
      g["x"] = d.x;
      g["y"] = d.y;
      g["is_factorization"] = d.is_factorization;
      ground.push_back(std::move(g));
    }
    j["ground_states"] = std::move(ground);
  } else {
    j["hamiltonian"] = nullptr;
    j["ground_states"] = nullptr;
  }
  try {
    auto pairs = nlohmann::ordered_json::array();
    for (const auto& [x, y] : enumerated_factors(c)) pairs.push_back({x, y});
    j["enumerated_factors"] = std::move(pairs);
  } catch (const TooLarge&) {
    j["enumerated_factors"] = nullptr;
  }
  return j;
}

std::vector<double> uniform_grid(int count) {
  std::vector<double> s(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) s[static_cast<std::size_t>(k)] = static_cast<double>(k) / (count - 1);
  return s;
}

int qubits_of(int dim) {
  int n = 0;
  while ((1 << n) < dim) ++n;
  return n;
}

std::vector<std::string> population_headers(int dim) {
  std::vector<std::string> h;
  for (int i = 0; i < dim; ++i) h.push_back("p" + basis_label(i, qubits_of(dim)));
  return h;
}

// Ground-space fidelity of `state` with respect to Hp.
double final_ground_fidelity(const adiabatic::AdiabaticProblem& p, const StateVector& state) {
  return adiabatic::ground_subspace_fidelity(state, p.hp, 1e-9 * std::max(1.0, p.hp.norm()));
}

std::string trajectory_csv(const adiabatic::AdiabaticProblem& p, const adiabatic::Trajectory& tr) {
  std::ostringstream os;
  std::vector<std::string> header{"t", "s"};
  for (auto& h : population_headers(p.dim())) header.push_back(h);
  header.insert(header.end(), {"ground_fidelity", "hp_ground_fidelity", "energy"});
  if (p.dim() == 4) header.push_back("target_fidelity");
  write_csv_row(os, header);
  for (const auto& c : tr.points) {
    std::vector<double> row{c.t, c.s};
    row.insert(row.end(), c.populations.begin(), c.populations.end());
    row.push_back(c.ground_fidelity);
    row.push_back(final_ground_fidelity(p, c.state));
    row.push_back(c.energy);
    if (p.dim() == 4) row.push_back(fidelity(c.state, adiabatic::bell_target()));
    write_csv_row(os, row);
  }
  return os.str();
}

std::string ensemble_csv(const noise::EnsembleResult& e) {
  std::ostringstream os;
  const int dim = static_cast<int>(e.checkpoints.front().mean.size());
  std::vector<std::string> header{"t"};
  for (const auto& h : population_headers(dim)) {
    header.push_back(h + "_mean");
    header.push_back(h + "_std");
  }
  write_csv_row(os, header);
  for (const auto& c : e.checkpoints) {
    std::vector<double> row{c.t};
    for (std::size_t i = 0; i < c.mean.size(); ++i) {
      row.push_back(c.mean[i]);
      row.push_back(c.stddev[i]);
    }
    write_csv_row(os, row);
  }
  return os.str();
}

std::string records_csv(const std::vector<tomo::TomographyRecord>& records) {
  std::ostringstream os;
  write_csv_row(os, std::vector<std::string>{"setting_id", "mw_pulse", "rf_pulse", "p00", "p01", "p10", "p11", "shots"});
  for (const auto& r : records) {
    const auto s = tomo::setting_from_id(r.setting_id);
    std::vector<std::string> row{std::to_string(r.setting_id), tomo::pulse_name(s.mw), tomo::pulse_name(s.rf)};
    for (double p : r.populations) row.push_back(format_number(p));
    row.push_back(r.shots ? std::to_string(*r.shots) : std::string("exact"));
    write_csv_row(os, row);
  }
  return os.str();
}

nlohmann::ordered_json rho_json(const tomo::Reconstruction& rec) {
  nlohmann::ordered_json j;
  j["rho"] = matrix_json(rec.rho.matrix());
  j["raw_estimate"] = matrix_json(rec.raw);
  j["fidelity"] = num(tomo::report_fidelity(rec.rho));
  j["condition_number"] = num(rec.condition_number);
  j["residual"] = num(rec.residual);
  return j;
}

std::string convergence_csv(const pulse::OptimizeResult& r) {
  std::ostringstream os;
  write_csv_row(os, std::vector<std::string>{"iter", "fidelity", "step", "gradient_norm"});
  for (const auto& rec : r.log) {
    os << rec.iter << ',' << format_number(rec.fidelity) << ',' << format_number(rec.step) << ','
       << format_number(rec.gradient_norm) << '\n';
  }
  return os.str();
}

std::string pulse_text(const pulse::PulseSequence& p) {
  std::ostringstream os;
  pulse::write_pulse(os, p);
  return os.str();
}

pulse::OptimizeResult run_grape(const RunConfig& cfg, const pulse::ControlProblem& cp, Exec exec) {
  pulse::OptimizeOptions opt;
  opt.max_iters = cfg.max_iters;
  opt.target_fidelity = cfg.target_fidelity;
  return pulse::optimize(cp, initial_pulse(cfg, cp), opt, exec);
}

std::optional<std::int64_t> shots_of(const RunConfig& cfg) {
  return cfg.shots > 0 ? std::optional<std::int64_t>(cfg.shots) : std::nullopt;
}

void announce(const fs::path& path) { std::cout << "wrote " << path.string() << '\n'; }

}  // namespace

factor::CompiledProblem compile_from(const RunConfig& cfg) {
  if (cfg.width_x > 0) return factor::compile(cfg.n, cfg.width_x, cfg.width_y, cfg.g1, cfg.qubit_budget);
  return factor::compile_auto(cfg.n, cfg.g1, cfg.qubit_budget);
}

adiabatic::AdiabaticProblem problem_from(const RunConfig& cfg, const factor::CompiledProblem& compiled) {
  if (!compiled.hamiltonian) {
    throw TooManyQubits(std::to_string(compiled.simplified.system.unknowns().size()) + " qubits exceed the budget of " +
                        std::to_string(cfg.qubit_budget));
  }
  if (compiled.hamiltonian->n_qubits() == 0) {
    throw InvalidArgument("N = " + std::to_string(cfg.n) + " is fully determined classically; nothing to evolve");
  }
  return adiabatic::make_problem(compiled.hamiltonian->op, cfg.g1, cfg.g2,
                                 adiabatic::Schedule::parse(cfg.schedule, cfg.t_total));
}

adiabatic::StepPolicy policy_from(const RunConfig& cfg) {
  adiabatic::StepPolicy policy;
  policy.initial_dt = cfg.initial_dt;
  policy.refine_tol = cfg.refine_tol;
  return policy;
}

pulse::ControlProblem control_problem_from(const RunConfig& cfg) {
  return pulse::nv_transfer_problem(cfg.pulse_duration_us, cfg.pulse_bound_mhz);
}

pulse::PulseSequence initial_pulse(const RunConfig& cfg, const pulse::ControlProblem& cp) {
  if (cfg.pulse_init == "random") return pulse::random_pulse(cp, cfg.pulse_segments, cfg.seed);
  if (cfg.pulse_init == "zero") return pulse::zero_pulse(cp, cfg.pulse_segments);
  return pulse::adiabatic_pulse(cp, cfg.pulse_segments, cfg.pulse_init_g_mhz);
}

PipelineResult noisy_pipeline(const RunConfig& cfg, const pulse::ControlProblem& cp, const pulse::PulseSequence& pulse,
                              const noise::ErrorConfig& errors, Exec exec) {
  PipelineResult out;
  out.ensemble = noise::noisy_pulse_ensemble(cp, pulse, errors, exec);
  out.records = tomo::simulate_all(out.ensemble.final_state, shots_of(cfg), cfg.seed + 1, exec);
  out.reconstruction = tomo::reconstruct(out.records);
  out.fidelity = tomo::report_fidelity(out.reconstruction.rho);
  return out;
}

CalibrationResult calibrate(const RunConfig& cfg, const pulse::ControlProblem& cp, const pulse::PulseSequence& pulse,
                            Exec exec) {
  CalibrationResult out;
  double best = std::numeric_limits<double>::infinity();
  for (double eps : cfg.calibration_grid) {
    noise::ErrorConfig e = cfg.errors;
    e.polarization_error = eps;
    const double f = noisy_pipeline(cfg, cp, pulse, e, exec).fidelity;
    out.sweep.emplace_back(eps, f);
    if (std::abs(f - cfg.calibration_target) < best) {
      best = std::abs(f - cfg.calibration_target);
      out.chosen = eps;
      out.chosen_fidelity = f;
    }
  }
  return out;
}

int cmd_compile(const CommandContext& ctx) {
  fs::create_directories(ctx.out_dir);
  const fs::path path = ctx.out_dir / "compile.json";
  factor::CompiledProblem c;
  try {
    c = compile_from(ctx.cfg);
  } catch (const Infeasible& e) {
    nlohmann::ordered_json j;
    j["n"] = ctx.cfg.n;
    j["status"] = "infeasible";
    j["message"] = e.what();
    write_json(path, j);
    announce(path);
    throw;
  }
  nlohmann::ordered_json j;
  j["status"] = c.hamiltonian ? "ok" : "too_many_qubits";
  j.update(compile_json(c));
  write_json(path, j);
  announce(path);
  if (!c.hamiltonian) {
    std::cerr << "error: " << c.simplified.system.unknowns().size() << " qubits needed, budget is "
              << ctx.cfg.qubit_budget << '\n';
    return kExitTooManyQubits;
  }
  std::cout << "N = " << c.table.n << ": " << c.hamiltonian->n_qubits() << " qubit(s)\n";
  return kExitOk;
}

int cmd_gap(const CommandContext& ctx) {
  const auto compiled = compile_from(ctx.cfg);
  const auto p = problem_from(ctx.cfg, compiled);
  fs::create_directories(ctx.out_dir);

  const auto grid = uniform_grid(ctx.cfg.gap_points);
  const auto scan = adiabatic::spectrum_scan(p, grid, ctx.exec);
  std::ostringstream csv;
  std::vector<std::string> header{"s"};
  for (int k = 0; k < p.dim(); ++k) header.push_back("e" + std::to_string(k));
  header.push_back("sector_gap");
  write_csv_row(csv, header);
  for (std::size_t i = 0; i < scan.s.size(); ++i) {
    std::vector<double> row{scan.s[i]};
    for (Eigen::Index k = 0; k < scan.energies[i].size(); ++k) row.push_back(scan.energies[i](k));
    row.push_back(scan.sector_gap[i]);
    write_csv_row(csv, row);
  }
  write_text(ctx.out_dir / "spectrum.csv", csv.str());
  announce(ctx.out_dir / "spectrum.csv");

  const auto g = adiabatic::min_gap(p, ctx.cfg.gap_points, ctx.exec);
  nlohmann::ordered_json j;
  j["n"] = ctx.cfg.n;
  j["g1"] = num(ctx.cfg.g1);
  j["g2"] = num(ctx.cfg.g2);
  j["symmetry_sector"] = p.symmetry.has_value();
  j["g_min"] = num(g.g_min);
  j["s_star"] = num(g.s_star);
  j["gap_s0"] = num(adiabatic::sector_gap(p, 0.0));
  j["gap_s1"] = num(adiabatic::sector_gap(p, 1.0));
  j["adiabatic_time_scale"] = num(1.0 / (g.g_min * g.g_min));
  write_json(ctx.out_dir / "gap.json", j);
  announce(ctx.out_dir / "gap.json");
  std::cout << "g_min = " << format_number(g.g_min) << " at s* = " << format_number(g.s_star) << '\n';
  return kExitOk;
}

int cmd_evolve(const CommandContext& ctx) {
  const auto compiled = compile_from(ctx.cfg);
  const auto p = problem_from(ctx.cfg, compiled);
  const auto policy = policy_from(ctx.cfg);
  fs::create_directories(ctx.out_dir);

  const auto checkpoints = adiabatic::uniform_checkpoints(ctx.cfg.t_total, ctx.cfg.checkpoints);
  const auto tr = adiabatic::evolve(p, policy, checkpoints);
  write_text(ctx.out_dir / "trajectory.csv", trajectory_csv(p, tr));
  announce(ctx.out_dir / "trajectory.csv");

  const auto& last = tr.final_point();
  nlohmann::ordered_json j;
  j["n"] = ctx.cfg.n;
  j["schedule"] = p.schedule.describe();
  j["t_total"] = num(p.total_time());
  j["dt"] = num(tr.dt);
  j["refinement_infidelity"] = num(tr.refinement_infidelity);
  j["final_populations"] = nums(last.populations);
  j["final_ground_fidelity"] = num(final_ground_fidelity(p, last.state));
  if (p.dim() == 4) j["final_target_fidelity"] = num(fidelity(last.state, adiabatic::bell_target()));

  if (!ctx.cfg.scan_t.empty()) {
    const auto scan = adiabatic::scan_total_time(p, ctx.cfg.scan_t, policy, ctx.exec);
    std::ostringstream csv;
    write_csv_row(csv, std::vector<std::string>{"t_total", "ground_fidelity", "target_fidelity"});
    bool monotone = true;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      write_csv_row(csv, std::vector<double>{scan[i].total_time, scan[i].ground_fidelity, scan[i].target_fidelity});
      if (i > 0 && scan[i].ground_fidelity < scan[i - 1].ground_fidelity) monotone = false;
    }
    write_text(ctx.out_dir / "t_scan.csv", csv.str());
    announce(ctx.out_dir / "t_scan.csv");
    j["t_scan_monotone"] = monotone;
  }

  if (ctx.noisy_evolve) {
    const auto ens = noise::noisy_adiabatic_ensemble(p, ctx.cfg.errors, checkpoints, tr.dt, ctx.exec);
    write_text(ctx.out_dir / "adiabatic_ensemble.csv", ensemble_csv(ens));
    announce(ctx.out_dir / "adiabatic_ensemble.csv");
    j["noisy_final_target_fidelity"] = num(ens.target_fidelity);
  }
  write_json(ctx.out_dir / "evolve.json", j);
  announce(ctx.out_dir / "evolve.json");
  std::cout << "final ground-space fidelity " << format_number(final_ground_fidelity(p, last.state)) << '\n';
  return kExitOk;
}

int cmd_nv(const CommandContext& ctx) {
  fs::create_directories(ctx.out_dir);
  const nv::NvParams params;
  std::ostringstream levels;
  write_csv_row(levels, std::vector<std::string>{"m_s", "m_i", "energy_mhz"});
  for (const auto& l : nv::level_energies(params)) {
    levels << l.m_s << ',' << l.m_i << ',' << format_number(l.energy_mhz) << '\n';
  }
  write_text(ctx.out_dir / "levels.csv", levels.str());
  announce(ctx.out_dir / "levels.csv");
  if (ctx.levels_only) return kExitOk;

  const auto compiled = compile_from(ctx.cfg);
  const auto p = problem_from(ctx.cfg, compiled);
  std::ostringstream controls;
  write_csv_row(controls, std::vector<std::string>{"t", "s", "omega_mw", "omega_rf", "delta_mw", "delta_rf"});
  double worst = 0.0;
  for (double s : uniform_grid(101)) {
    const double t = s * p.total_time();
    const auto r = nv::schedule_to_controls(p, t);
    write_csv_row(controls, std::vector<double>{t, p.schedule(t), r.omega_mw, r.omega_rf, r.delta_mw, r.delta_rf});
    const ComplexMatrix mapped = nv::hadamard_conjugate_electron(nv::rot_frame_hamiltonian(r).traceless);
    worst = std::max(worst, max_abs_diff(mapped, adiabatic::hamiltonian_at(p, t)));
  }
  write_text(ctx.out_dir / "controls.csv", controls.str());
  announce(ctx.out_dir / "controls.csv");

  nlohmann::ordered_json j;
  nlohmann::ordered_json pj;
  pj["d_mhz"] = num(params.d_mhz);
  pj["q_mhz"] = num(params.q_mhz);
  pj["bz_gauss"] = num(params.bz_gauss);
  pj["gamma_e_mhz_per_g"] = num(params.gamma_e_mhz_per_g);
  pj["gamma_n_khz_per_g"] = num(params.gamma_n_khz_per_g);
  pj["a_par_mhz"] = num(params.a_par_mhz);
  j["params"] = std::move(pj);
  auto encoded = nlohmann::ordered_json::array();
  int idx = 0;
  for (const auto& [ms, mi] : nv::encoded_levels()) {
    nlohmann::ordered_json e;
    e["basis"] = basis_label(idx++, 2);
    e["m_s"] = ms;
    e["m_i"] = mi;
    encoded.push_back(std::move(e));
  }
  j["encoded_levels"] = std::move(encoded);
  j["mapping_max_deviation"] = num(worst);
  write_json(ctx.out_dir / "nv.json", j);
  announce(ctx.out_dir / "nv.json");
  std::cout << "rotating-frame mapping deviation " << format_number(worst) << '\n';
  return kExitOk;
}

int cmd_grape(const CommandContext& ctx) {
  const auto cp = control_problem_from(ctx.cfg);
  const auto result = run_grape(ctx.cfg, cp, ctx.exec);
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "pulse.txt", pulse_text(result.pulse));
  announce(ctx.out_dir / "pulse.txt");
  write_text(ctx.out_dir / "convergence.csv", convergence_csv(result));
  announce(ctx.out_dir / "convergence.csv");

  const auto robust = pulse::robustness_scan(cp, result.pulse, ctx.cfg.robustness_eps);
  std::ostringstream csv;
  write_csv_row(csv, std::vector<std::string>{"epsilon", "fidelity"});
  for (std::size_t i = 0; i < robust.size(); ++i) write_csv_row(csv, std::vector<double>{ctx.cfg.robustness_eps[i], robust[i]});
  write_text(ctx.out_dir / "robustness.csv", csv.str());
  announce(ctx.out_dir / "robustness.csv");

  const double f = pulse::transfer_fidelity(cp, result.pulse);
  nlohmann::ordered_json j;
  j["duration_us"] = num(cp.duration_us);
  j["segments"] = result.pulse.n_segments();
  j["bound_mhz"] = num(ctx.cfg.pulse_bound_mhz);
  j["init"] = ctx.cfg.pulse_init;
  j["initial_fidelity"] = num(result.log.front().fidelity);
  j["fidelity"] = num(f);
  j["iterations"] = result.log.back().iter;
  j["reached_target"] = result.reached_target;
  write_json(ctx.out_dir / "grape.json", j);
  announce(ctx.out_dir / "grape.json");
  std::cout << "pulse fidelity " << format_number(f) << '\n';
  return kExitOk;
}

int cmd_tomo(const CommandContext& ctx) {
  if (ctx.tomo_state != "pipeline" && ctx.tomo_state != "ideal") {
    throw ConfigError("tomo --state must be pipeline or ideal");
  }
  std::vector<tomo::TomographyRecord> records;
  if (ctx.tomo_state == "ideal") {
    records = tomo::simulate_all(DensityMatrix::pure(adiabatic::bell_target()), shots_of(ctx.cfg), ctx.cfg.seed + 1,
                                 ctx.exec);
  } else {
    const auto cp = control_problem_from(ctx.cfg);
    const auto grape = run_grape(ctx.cfg, cp, ctx.exec);
    records = noisy_pipeline(ctx.cfg, cp, grape.pulse, ctx.cfg.errors, ctx.exec).records;
  }
  const auto rec = tomo::reconstruct(records);
  fs::create_directories(ctx.out_dir);
  write_text(ctx.out_dir / "records.csv", records_csv(records));
  announce(ctx.out_dir / "records.csv");
  write_json(ctx.out_dir / "rho.json", rho_json(rec));
  announce(ctx.out_dir / "rho.json");
  std::cout << "reconstructed fidelity " << format_number(tomo::report_fidelity(rec.rho)) << '\n';
  return kExitOk;
}

int cmd_report(const CommandContext& ctx) {
  RunConfig cfg = ctx.cfg;
  const auto compiled = compile_from(cfg);
  const auto p = problem_from(cfg, compiled);
  const auto gap = adiabatic::min_gap(p, cfg.gap_points, ctx.exec);
  const auto checkpoints = adiabatic::uniform_checkpoints(cfg.t_total, cfg.checkpoints);
  const auto tr = adiabatic::evolve(p, policy_from(cfg), checkpoints);

  const auto cp = control_problem_from(cfg);
  const auto grape = run_grape(cfg, cp, ctx.exec);
  fs::create_directories(ctx.out_dir);

  nlohmann::ordered_json calib = nullptr;
  if (ctx.calibrate) {
    const auto c = calibrate(cfg, cp, grape.pulse, ctx.exec);
    std::ostringstream csv;
    write_csv_row(csv, std::vector<std::string>{"polarization_error", "fidelity"});
    for (const auto& [eps, f] : c.sweep) write_csv_row(csv, std::vector<double>{eps, f});
    write_text(ctx.out_dir / "calibration.csv", csv.str());
    announce(ctx.out_dir / "calibration.csv");
    cfg.errors.polarization_error = c.chosen;
    calib = nlohmann::ordered_json::object();
    calib["target"] = num(cfg.calibration_target);
    calib["chosen_polarization_error"] = num(c.chosen);
    calib["chosen_fidelity"] = num(c.chosen_fidelity);
  }

  const auto pipe = noisy_pipeline(cfg, cp, grape.pulse, cfg.errors, ctx.exec);
  write_text(ctx.out_dir / "pulse.txt", pulse_text(grape.pulse));
  write_text(ctx.out_dir / "ensemble.csv", ensemble_csv(pipe.ensemble));
  write_text(ctx.out_dir / "records.csv", records_csv(pipe.records));
  write_json(ctx.out_dir / "rho.json", rho_json(pipe.reconstruction));

  nlohmann::ordered_json j;
  j["config"] = to_json(cfg);
  nlohmann::ordered_json cj;
  cj["width_x"] = compiled.table.width_x;
  cj["width_y"] = compiled.table.width_y;
  auto reduced = nlohmann::ordered_json::array();
  for (const auto& eq : compiled.simplified.system.equations) reduced.push_back(compiled.simplified.system.render(eq));
  cj["reduced_equations"] = std::move(reduced);
  cj["qubits"] = compiled.hamiltonian->n_qubits();
  auto factors = nlohmann::ordered_json::array();
  for (int b : factor::ground_basis_states(*compiled.hamiltonian)) {
    const auto d = factor::decode_solution(b, *compiled.hamiltonian, compiled.table);
    factors.push_back({d.x, d.y});
  }
  cj["ground_state_factors"] = std::move(factors);
  j["compile"] = std::move(cj);
  nlohmann::ordered_json sj;
  sj["g_min"] = num(gap.g_min);
  sj["s_star"] = num(gap.s_star);
  j["spectrum"] = std::move(sj);
  nlohmann::ordered_json aj;
  aj["t_total"] = num(cfg.t_total);
  aj["dt"] = num(tr.dt);
  aj["final_ground_fidelity"] = num(final_ground_fidelity(p, tr.final_point().state));
  if (p.dim() == 4) aj["final_target_fidelity"] = num(fidelity(tr.final_point().state, adiabatic::bell_target()));
  j["adiabatic"] = std::move(aj);
  nlohmann::ordered_json pj;
  pj["duration_us"] = num(cp.duration_us);
  pj["fidelity"] = num(pulse::transfer_fidelity(cp, grape.pulse));
  pj["iterations"] = grape.log.back().iter;
  pj["reached_target"] = grape.reached_target;
  j["pulse"] = std::move(pj);
  nlohmann::ordered_json nj;
  nj["polarization_error"] = num(cfg.errors.polarization_error);
  nj["sigma_mw"] = num(cfg.errors.amplitude_sigma_mw);
  nj["sigma_rf"] = num(cfg.errors.amplitude_sigma_rf);
  nj["n_samples"] = cfg.errors.n_samples;
  nj["shots"] = cfg.shots;
  nj["ensemble_fidelity"] = num(pipe.ensemble.target_fidelity);
  nj["reconstructed_fidelity"] = num(pipe.fidelity);
  nj["condition_number"] = num(pipe.reconstruction.condition_number);
  j["noisy_pipeline"] = std::move(nj);
  nlohmann::ordered_json band;
  band["center"] = kBandCenter;
  band["low"] = kBandLow;
  band["high"] = kBandHigh;
  j["reference_band"] = std::move(band);
  j["in_band"] = pipe.fidelity >= kBandLow && pipe.fidelity <= kBandHigh;
  j["calibration"] = std::move(calib);
  write_json(ctx.out_dir / "report.json", j);
  announce(ctx.out_dir / "report.json");
  std::cout << "noisy pipeline fidelity " << format_number(pipe.fidelity)
            << (j["in_band"].get<bool>() ? " (in band)" : " (out of band)") << '\n';
  return kExitOk;
}

int run_command(const std::string& name, const CommandContext& ctx) {
  try {
    if (name == "compile") return cmd_compile(ctx);
    if (name == "gap") return cmd_gap(ctx);
    if (name == "evolve") return cmd_evolve(ctx);
    if (name == "nv") return cmd_nv(ctx);
    if (name == "grape") return cmd_grape(ctx);
    if (name == "tomo") return cmd_tomo(ctx);
    if (name == "report") return cmd_report(ctx);
    std::cerr << "error: unknown command " << name << '\n';
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const TooManyQubits& e) {
    std::cerr << "too many qubits: " << e.what() << '\n';
    return kExitTooManyQubits;
  } catch (const NonConvergent& e) {
    std::cerr << "not converged: " << e.what() << '\n';
    return kExitNonConvergent;
  } catch (const NoProgress& e) {
    std::cerr << "not converged: " << e.what() << '\n';
    return kExitNonConvergent;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace nvfactor::app
