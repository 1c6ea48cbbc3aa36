#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "app/commands.hpp"
#include "app/config.hpp"

using namespace nvfactor;
using namespace nvfactor::app;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nvfactor_unit_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

CommandContext context(const std::string& name) {
  CommandContext ctx;
  ctx.out_dir = fresh_dir(name);
  return ctx;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config file keys and errors") {
  RunConfig c;
  apply_json(c, nlohmann::json::parse(R"({"n": 21, "g1": 2.0, "scan_t": [5, 10], "sigma_mw": 0.1, "seed": 9})"));
  CHECK(c.n == 21);
  CHECK(c.g1 == 2.0);
  CHECK(c.scan_t == std::vector<double>{5, 10});
  CHECK(c.errors.amplitude_sigma_mw == 0.1);
  CHECK(c.errors.seed == 9);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
  CHECK_THROWS_AS(apply_json(c, nlohmann::json::parse(R"({"g1": "big"})")), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  RunConfig bad;
  bad.pulse_init = "sine";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  CHECK_NOTHROW(validate(RunConfig{}));
  CHECK(parse_number_list("5,10,20") == std::vector<double>{5, 10, 20});
  CHECK_THROWS_AS(parse_number_list("5,x"), ConfigError);
}

TEST_CASE("output directory precedence") {
  RunConfig c;
  ::unsetenv("NVFACTOR_OUT_DIR");
  CHECK(resolve_out_dir(std::nullopt, c) == fs::path("out"));
  ::setenv("NVFACTOR_OUT_DIR", "from_env", 1);
  CHECK(resolve_out_dir(std::nullopt, c) == fs::path("from_env"));
  c.out_dir = "from_config";
  CHECK(resolve_out_dir(std::nullopt, c) == fs::path("from_config"));
  CHECK(resolve_out_dir(std::string("from_flag"), c) == fs::path("from_flag"));
  ::unsetenv("NVFACTOR_OUT_DIR");
}

TEST_CASE("compile artifacts and exit codes") {
  auto ctx = context("compile");
  CHECK(run_command("compile", ctx) == kExitOk);
  const auto j = read_json(ctx.out_dir / "compile.json");
  CHECK(j["reduced_equations"] == nlohmann::json::array({"p + q = 1"}));
  CHECK(j["ground_states"].size() == 2);
  CHECK(j["enumerated_factors"] == nlohmann::json::parse("[[5,7],[7,5]]"));

  ctx.cfg.n = 9;
  ctx.cfg.width_x = ctx.cfg.width_y = 2;
  CHECK(run_command("compile", ctx) == kExitOk);
  CHECK(read_json(ctx.out_dir / "compile.json")["hamiltonian"]["qubits"].empty());

  ctx.cfg = RunConfig{};
  ctx.cfg.n = 15;
  CHECK(run_command("compile", ctx) == kExitOk);
  CHECK(read_json(ctx.out_dir / "compile.json")["enumerated_factors"] == nlohmann::json::parse("[[3,5]]"));

  ctx.cfg.n = 13;
  CHECK(run_command("compile", ctx) == kExitInfeasible);
  CHECK(read_json(ctx.out_dir / "compile.json")["status"] == "infeasible");

  ctx.cfg.n = 143;
  ctx.cfg.qubit_budget = 2;
  CHECK(run_command("compile", ctx) == kExitTooManyQubits);
  const auto tm = read_json(ctx.out_dir / "compile.json");
  CHECK(tm["status"] == "too_many_qubits");
  CHECK(tm["hamiltonian"].is_null());
}

TEST_CASE("gap and nv artifacts") {
  auto ctx = context("gap");
  CHECK(run_command("gap", ctx) == kExitOk);
  const auto g = read_json(ctx.out_dir / "gap.json");
  CHECK(g["g_min"].get<double>() == doctest::Approx(0.8));
  CHECK(g["gap_s0"].get<double>() == doctest::Approx(1.0));
  ctx.levels_only = true;
  CHECK(run_command("nv", ctx) == kExitOk);
  const auto levels = slurp(ctx.out_dir / "levels.csv");
  CHECK(std::count(levels.begin(), levels.end(), '\n') == 10);
  CHECK(levels.find("\n0,0,0\n") != std::string::npos);
  ctx.levels_only = false;
  CHECK(run_command("nv", ctx) == kExitOk);
  CHECK(read_json(ctx.out_dir / "nv.json")["mapping_max_deviation"].get<double>() <= 1e-12);
}

TEST_CASE("evolve limits and exit codes") {
  auto ctx = context("evolve");
  ctx.cfg.t_total = 0.01;
  CHECK(run_command("evolve", ctx) == kExitOk);
  for (const auto& p : read_json(ctx.out_dir / "evolve.json")["final_populations"]) {
    CHECK(p.get<double>() == doctest::Approx(0.25).epsilon(1e-3));
  }
  ctx.cfg = RunConfig{};
  ctx.cfg.scan_t = {5, 10, 20, 40, 80};
  CHECK(run_command("evolve", ctx) == kExitOk);
  const auto j = read_json(ctx.out_dir / "evolve.json");
  CHECK(j["t_scan_monotone"] == true);
  CHECK(j["final_target_fidelity"].get<double>() >= 0.99);

  ctx.cfg = RunConfig{};
  ctx.cfg.t_total = 100.0;
  ctx.cfg.initial_dt = 50.0;
  ctx.cfg.refine_tol = 1e-30;
  CHECK(run_command("evolve", ctx) == kExitNonConvergent);

  ctx.cfg = RunConfig{};
  ctx.cfg.n = 15;
  CHECK(run_command("evolve", ctx) == kExitDomain);
}

TEST_CASE("stalled pulse optimisation maps to the non-convergence exit code") {
  auto ctx = context("grape_zero");
  ctx.cfg.pulse_init = "zero";
  CHECK(run_command("grape", ctx) == kExitNonConvergent);
}

TEST_CASE("floats carry at most 12 significant digits") {
  auto ctx = context("digits");
  ctx.cfg.scan_t = {5, 10};
  CHECK(run_command("evolve", ctx) == kExitOk);
  const std::regex number(R"([-+]?(\d+)(?:\.(\d+))?(?:[eE][-+]?\d+)?)");
  for (const auto& name : {"trajectory.csv", "evolve.json", "t_scan.csv"}) {
    const std::string text = slurp(ctx.out_dir / name);
    for (std::sregex_iterator it(text.begin(), text.end(), number), end; it != end; ++it) {
      std::string digits = (*it)[1].str() + (*it)[2].str();
      digits.erase(0, digits.find_first_not_of('0'));
      while (!digits.empty() && digits.back() == '0' && (*it)[2].matched) digits.pop_back();
      CHECK_MESSAGE(digits.size() <= 12, name << ": " << it->str());
    }
  }
}

TEST_CASE("commands write only inside the output directory") {
  auto ctx = context("confined");
  ctx.cfg.errors.n_samples = 20;
  ctx.cfg.shots = 1000;
  const fs::path cwd = fs::current_path();
  std::set<fs::path> before{fs::directory_iterator(cwd), fs::directory_iterator()};
  for (const char* cmd : {"grape", "tomo"}) CHECK(run_command(cmd, ctx) == kExitOk);
  std::set<fs::path> after{fs::directory_iterator(cwd), fs::directory_iterator()};
  CHECK(before == after);
  for (const char* f : {"pulse.txt", "convergence.csv", "robustness.csv", "grape.json", "records.csv", "rho.json"}) {
    CHECK(fs::exists(ctx.out_dir / f));
  }
}

}  // TEST_SUITE
