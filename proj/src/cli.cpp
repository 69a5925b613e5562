#include "chb/cli.hpp"

#include "chb/acceptance.hpp"
#include "chb/config.hpp"
#include "chb/experiments.hpp"
#include "chb/output.hpp"

#include "CLI11.hpp"
#include <fmt/chrono.h>
#include <fmt/format.h>

#include <chrono>
#include <cstdio>
#include <filesystem>

namespace chb {

namespace {

namespace fs = std::filesystem;

/// A .json argument is a run manifest carrying the resolved config; anything else is a config file.
ModelConfig load_input(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError(fmt::format("no such file '{}'", path));
  if (fs::path(path).extension() == ".json") return parse_config(read_manifest(path).config_text);
  return load_config(path);
}

std::string out_dir_for(const std::string& requested, const ModelConfig& cfg) {
  const std::string dir = requested.empty() ? "out/" + cfg.name : requested;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  return dir;
}

std::string utc_now() { return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::time(nullptr))); }

void print_warnings(const ModelConfig& cfg) {
  const ValidationReport rep = validate_assumptions(cfg.params, cfg.sources, cfg.experiment.mode);
  for (const Violation& w : rep.warnings) fmt::print(stderr, "warning {}: {}\n", w.assumption, w.message);
}

int cmd_run(const std::string& input, const std::string& out, const std::string& restart) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelConfig cfg = load_input(input);
  print_warnings(cfg);
  const Model model(cfg);
  Trajectory traj;
  if (restart.empty()) {
    traj = run(model);
  } else {
    const RestartPoint start = read_sidecar(restart);
    if (start.state.a.size() != model.size()) throw ConfigError("sidecar size does not match basis.modes");
    traj = run(model, &start);
  }
  const std::string dir = out_dir_for(out, cfg);
  RunManifest m;
  m.config_text = emit_config(cfg);
  m.version = CHB_VERSION;
  m.command = restart.empty() ? "run" : "run --restart " + restart;
  m.started_utc = utc_now();
  write_text(dir + "/config.cfg", m.config_text);
  emit_timeseries(traj, dir + "/timeseries.csv");
  emit_snapshot(traj.points.back(), model, dir + "/snapshot_final.csv");
  m.files = {"config.cfg", "timeseries.csv", "snapshot_final.csv", "snapshot_final.csv.coef"};
  m.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_manifest(m, dir + "/manifest.json");
  const DiagnosticsRecord& last = traj.points.back().record;
  fmt::print("{}: {} output points, t = {}, E = {:.10e}, identity residual {:.3e}\n", cfg.name, traj.points.size(),
             last.t, last.E_total, last.identity_residual);
  fmt::print("wrote {}\n", dir);
  if (!traj.complete) {
    fmt::print(stderr, "error: run stopped early: {}\n", traj.error);
    return 2;
  }
  return 0;
}

int cmd_validate(const std::string& input) {
  const ModelConfig cfg = load_input(input);
  const Model model(cfg);  // checks the quadrature floor
  print_warnings(cfg);
  const BoundConstants b = effective_bounds(cfg.params);
  fmt::print("{}: valid ({} mode, {} modes, {}x{} quadrature)\n", cfg.name, to_string(cfg.experiment.mode), model.size(),
             model.bases().quad().nx, model.bases().quad().ny);
  fmt::print("bounds: m [{:g}, {:g}] kappa [{:g}, {:g}] M [{:g}, {:g}] C [{:g}, {:g}] C_T {:g}\n", b.c_m, b.C_m, b.c_kappa,
             b.C_kappa, b.c_M, b.C_M, b.c_C, b.C_C, b.C_T);
  return 0;
}

int cmd_dissipation(const std::string& input, const std::string& out, const std::vector<double>& dts, int threads) {
  const ModelConfig cfg = load_input(input);
  print_warnings(cfg);
  const DissipationStudy st = dissipation_study(cfg, dts, threads);
  const std::string dir = out_dir_for(out, cfg);
  emit_dissipation_study(st, dir + "/dissipation.csv");
  bool complete = true;
  for (const DissipationLevel& l : st.levels) {
    fmt::print("dt {:<10g} max|r| {:.6e}  max energy increase {:.3e}{}\n", l.dt, l.max_abs_residual,
               l.max_energy_increase, l.complete ? "" : "  (incomplete)");
    complete = complete && l.complete;
  }
  fmt::print("fitted order {:.4f}, min pairwise order {:.4f}\nwrote {}/dissipation.csv\n", st.fitted_order,
             st.min_pair_order, dir);
  return complete ? 0 : 2;
}

int cmd_continuity(const std::string& input, const std::string& out, int threads) {
  const ModelConfig cfg = load_input(input);
  if (cfg.experiment.mode != ExperimentMode::continuity)
    throw ValidationError("(B2)", "continuity-study needs experiment.mode = continuity");
  const ContinuityStudy st = continuous_dependence_experiment(cfg, cfg.experiment.perturbation, cfg.experiment.epsilons, threads);
  const std::string dir = out_dir_for(out, cfg);
  emit_continuity_study(st, dir + "/continuity.csv");
  for (const ContinuityLevel& l : st.levels)
    fmt::print("eps {:<8g} LHS {:.6e} RHS {:.6e} ratio {:.6f} flux bound {}\n", l.epsilon, l.lhs, l.rhs, l.ratio,
               l.flux_bound_holds ? "holds" : "VIOLATED");
  for (std::size_t i = 0; i < st.slopes.size(); ++i)
    fmt::print("slope {:<18} {:.4f}\n", continuity_term_names()[i], st.slopes[i]);
  fmt::print("ratio spread {:.4f}\nwrote {}/continuity.csv\n", st.ratio_spread, dir);
  return 0;
}

int cmd_selftest(const std::string& presets, int threads, const std::vector<int>& only) {
  AcceptanceOptions o;
  o.preset_dir = presets;
  o.threads = threads;
  o.only = only;
  bool all = true;
  run_acceptance(o, [&](const CriterionResult& r) {
    fmt::print("{}\n", format_result(r));
    std::fflush(stdout);
    all = all && r.pass;
  });
  return all ? 0 : 2;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Cahn-Hilliard-Biot spectral Galerkin solver"};
  app.require_subcommand(1);
  int threads = 1;
  std::string out;
  app.add_option("--threads", threads, "Upper bound on concurrent runs")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "Output directory (default out/<run.name>)");

  std::string input, restart, presets = "presets";
  std::vector<double> dts;
  std::vector<int> only;
  auto* run_cmd = app.add_subcommand("run", "Integrate a configuration and write time series, snapshot and manifest");
  run_cmd->add_option("config", input, "Config file or run manifest (.json)")->required();
  run_cmd->add_option("--restart", restart, "Coefficient sidecar to restart from");
  auto* val_cmd = app.add_subcommand("validate", "Parse and check the model assumptions");
  val_cmd->add_option("config", input)->required();
  auto* dis_cmd = app.add_subcommand("dissipation-study", "Energy identity residual under a dt sweep");
  dis_cmd->add_option("config", input)->required();
  dis_cmd->add_option("--dt", dts, "Time steps (default: time.dt halved experiment.dt_levels times)");
  auto* con_cmd = app.add_subcommand("continuity-study", "Perturbation sweep of the continuous dependence estimates");
  con_cmd->add_option("config", input)->required();
  auto* self_cmd = app.add_subcommand("selftest", "Run the acceptance criteria");
  self_cmd->add_option("--presets", presets, "Preset directory");
  self_cmd->add_option("--only", only, "Criterion numbers to run");
  for (CLI::App* sub : {run_cmd, val_cmd, dis_cmd, con_cmd, self_cmd}) {
    sub->add_option("--threads", threads, "Upper bound on concurrent runs")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*run_cmd) return cmd_run(input, out, restart);
    if (*val_cmd) return cmd_validate(input);
    if (*dis_cmd) return cmd_dissipation(input, out, dts, threads);
    if (*con_cmd) return cmd_continuity(input, out, threads);
    if (*self_cmd) return cmd_selftest(presets, threads, only);
  } catch (const ConfigError& e) {
    if (e.line() > 0) fmt::print(stderr, "config error {}: {}\n", input, e.what());
    else fmt::print(stderr, "config error: {}\n", e.what());
    return 1;
  } catch (const ValidationError& e) {
    fmt::print(stderr, "validation error {}: {}\n", e.assumption(), e.what());
    return 1;
  } catch (const NumericalError& e) {
    fmt::print(stderr, "numerical error: {}\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 1;
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"chb"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace chb
