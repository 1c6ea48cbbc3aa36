// nvfactor: compile -> gap -> evolve -> nv -> grape -> tomo -> report.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"

namespace {

template <class T>
void override_with(const std::optional<T>& flag, T& field) {
  if (flag) field = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace nvfactor::app;

  CLI::App app{"Adiabatic factoring pipeline on a simulated NV-centre register"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::string> config_path, out_dir, schedule, scan_t, pulse_init, tomo_state;
  std::optional<std::uint64_t> n, seed;
  std::optional<int> wx, wy, checkpoints, qubit_budget, segments, max_iters, samples;
  std::optional<double> g1, g2, t_total, initial_dt, duration_us, bound_mhz, init_g, target_fid, eps, sigma_mw,
      sigma_rf;
  std::optional<std::int64_t> shots;
  bool serial = false, levels = false, calibrate = false, noisy = false;

  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out-dir", out_dir, "Output directory (default: $NVFACTOR_OUT_DIR or ./out)");
  app.add_flag("--serial", serial, "Use the serial reference kernels");
  app.add_option("--n", n, "Integer to factor");
  app.add_option("--wx", wx, "Bit width of the first factor");
  app.add_option("--wy", wy, "Bit width of the second factor");
  app.add_option("--qubit-budget", qubit_budget);
  app.add_option("--g1", g1, "Problem coupling");
  app.add_option("--g2", g2, "Transverse coupling");
  app.add_option("--schedule", schedule, "linear | poly:c1,c2,... | table:tau:s,...");
  app.add_option("--t-total", t_total, "Total evolution time");
  app.add_option("--checkpoints", checkpoints);
  app.add_option("--scan-T", scan_t, "Comma-separated total times to scan");
  app.add_option("--initial-dt", initial_dt);
  app.add_option("--duration-us", duration_us, "Pulse budget in microseconds");
  app.add_option("--bound-mhz", bound_mhz, "Amplitude bound per channel");
  app.add_option("--segments", segments);
  app.add_option("--init", pulse_init, "adiabatic | random | zero");
  app.add_option("--init-g-mhz", init_g);
  app.add_option("--max-iters", max_iters);
  app.add_option("--target-fidelity", target_fid);
  app.add_option("--polarization-error", eps);
  app.add_option("--sigma-mw", sigma_mw);
  app.add_option("--sigma-rf", sigma_rf);
  app.add_option("--samples", samples);
  app.add_option("--shots", shots, "Shots per tomography setting, 0 for exact");
  app.add_option("--seed", seed);

  const char* names[] = {"compile", "gap", "evolve", "nv", "grape", "tomo", "report"};
  const char* help[] = {"Compile N into a problem Hamiltonian", "Spectrum scan and minimum gap",
                        "Adiabatic evolution with checkpoints", "NV levels and rotating-frame controls",
                        "Optimal-control pulse synthesis", "Simulated 16-setting tomography",
                        "End-to-end noisy pipeline report"};
  for (std::size_t k = 0; k < std::size(names); ++k) app.add_subcommand(names[k], help[k]);
  app.get_subcommand("nv")->add_flag("--levels", levels, "Only the 9-level energy table");
  app.get_subcommand("tomo")->add_option("--state", tomo_state, "pipeline | ideal");
  app.get_subcommand("report")->add_flag("--calibrate", calibrate, "Sweep the polarization error first");
  app.get_subcommand("evolve")->add_flag("--noisy", noisy, "Also run the noisy NV ensemble");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  CommandContext ctx;
  try {
    if (config_path) ctx.cfg = load_config(*config_path);
    auto& c = ctx.cfg;
    override_with(n, c.n);
    override_with(wx, c.width_x);
    override_with(wy, c.width_y);
    override_with(qubit_budget, c.qubit_budget);
    override_with(g1, c.g1);
    override_with(g2, c.g2);
    override_with(schedule, c.schedule);
    override_with(t_total, c.t_total);
    override_with(checkpoints, c.checkpoints);
    if (scan_t) c.scan_t = parse_number_list(*scan_t);
    override_with(initial_dt, c.initial_dt);
    override_with(duration_us, c.pulse_duration_us);
    override_with(bound_mhz, c.pulse_bound_mhz);
    override_with(segments, c.pulse_segments);
    override_with(pulse_init, c.pulse_init);
    override_with(init_g, c.pulse_init_g_mhz);
    override_with(max_iters, c.max_iters);
    override_with(target_fid, c.target_fidelity);
    override_with(eps, c.errors.polarization_error);
    override_with(sigma_mw, c.errors.amplitude_sigma_mw);
    override_with(sigma_rf, c.errors.amplitude_sigma_rf);
    override_with(samples, c.errors.n_samples);
    override_with(shots, c.shots);
    override_with(seed, c.seed);
    c.errors.seed = c.seed;
    validate(c);
    ctx.out_dir = resolve_out_dir(out_dir, c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  ctx.exec = serial ? nvfactor::Exec::serial : nvfactor::Exec::parallel;
  ctx.levels_only = levels;
  ctx.calibrate = calibrate;
  ctx.noisy_evolve = noisy;
  if (tomo_state) ctx.tomo_state = *tomo_state;

  return run_command(app.get_subcommands().front()->get_name(), ctx);
}
