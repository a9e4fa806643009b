// Command-line front end: one subcommand per experiment.
//
//   pnp_cli <mms|closed-cell|switching|ac|compare> --config FILE [--out DIR]
//           [--solver newton|fixed-point] [--seed N]
//
// Exit status: 0 success, 2 config error, 3 solver non-convergence,
// 4 invariant violation. Failures also print a one-line JSON record to stderr.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnp/pnp.hpp"

namespace fs = std::filesystem;

namespace {

int fail(const char* kind, const std::string& message, int code, long step = -1)
{
  nlohmann::json rec{{"error", kind}, {"message", message}, {"exit_code", code}};
  if (step >= 0) rec["step"] = step;
  std::cerr << rec.dump() << '\n';
  return code;
}

std::string omega_tag(double omega)
{
  const double multiple = omega / std::numbers::pi;
  char buf[32];
  std::snprintf(buf, sizeof buf, "omega_%gpi", multiple);
  return buf;
}

void run(const std::string& cmd, const pnp::RunConfig& cfg, const fs::path& out)
{
  using namespace pnp;
  fs::create_directories(out);
  io::write_config_json(out / "config.json", cfg);

  if (cmd == "mms") {
    const ErrorTable t = run_mms_accuracy(cfg);
    io::write_error_table_csv(out / "error_table.csv", t);
    for (const auto& r : t.rows)
      std::printf("h=1/%d  err_psi=%.3e  order_psi=%.2f\n", r.n, r.err_psi, r.order_psi);
  } else if (cmd == "closed-cell") {
    const PnpProblem p = build_problem(cfg);
    const Trajectory traj = run_closed_cell(cfg);
    io::write_trajectory_csv(out / "trajectory.csv", traj);
    io::write_snapshot_csv(out / "psi_final.csv", p.grid(), traj.final_state.psi);
    for (std::size_t l = 0; l < traj.final_state.c.size(); ++l)
      io::write_snapshot_csv(out / ("c" + std::to_string(l + 1) + "_final.csv"), p.grid(),
                             traj.final_state.c[l]);
    std::printf("steps=%zu  F_h: %.10g -> %.10g\n", traj.steps, traj.diagnostics.front().F_h,
                traj.diagnostics.back().F_h);
  } else if (cmd == "switching") {
    const SwitchingResult r = run_adaptive_switching(cfg);
    io::write_trajectory_csv(out / "adaptive.csv", r.adaptive);
    io::write_trajectory_csv(out / "uniform.csv", r.uniform);
    auto summary = io::open_out(out / "steps.csv");
    summary << "run,steps[count],F_h_end[nondim]\n"
            << "adaptive," << r.adaptive.steps << ',' << io::num(r.adaptive.diagnostics.back().F_h)
            << "\nuniform," << r.uniform.steps << ',' << io::num(r.uniform.diagnostics.back().F_h)
            << '\n';
    std::printf("adaptive steps=%zu  uniform steps=%zu\n", r.adaptive.steps, r.uniform.steps);
  } else if (cmd == "ac") {
    const PnpProblem p = build_problem(cfg);
    for (const AcRun& run : run_ac_dynamics(cfg)) {
      const fs::path dir = out / omega_tag(run.omega);
      io::write_trajectory_csv(dir / "trajectory.csv", run.trajectory);
      for (const auto& s : run.snapshots) {
        char t[32];
        std::snprintf(t, sizeof t, "t%.3f", s.t);
        io::write_snapshot_csv(dir / (std::string("psi_") + t + ".csv"), p.grid(), s.state.psi);
        for (std::size_t l = 0; l < s.state.c.size(); ++l)
          io::write_snapshot_csv(dir / ("c" + std::to_string(l + 1) + "_" + t + ".csv"), p.grid(),
                                 s.state.c[l]);
      }
      std::printf("%s  rho(T)=%.6g\n", omega_tag(run.omega).c_str(),
                  run.trajectory.diagnostics.back().net_charge_left);
    }
  } else if (cmd == "compare") {
    const auto rows = run_solver_comparison(cfg);
    io::write_comparison_csv(out / "comparison.csv", rows);
    io::write_timing_csv(out / "timing.csv", rows);
    for (const auto& r : rows)
      std::printf("n=%d  newton=%.2f it/step  fixed-point=%.2f it/step  diff=%.2e\n", r.n,
                  r.newton_mean_iters, r.fixed_point_mean_iters, r.max_state_diff);
  }
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Finite-difference Poisson-Nernst-Planck solver"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", solver;
  std::optional<std::uint64_t> seed;
  const std::pair<const char*, const char*> commands[] = {
      {"mms", "manufactured-solution accuracy table"},
      {"closed-cell", "conservation and energy dissipation in a closed cell"},
      {"switching", "adaptive time stepping under a switching potential"},
      {"ac", "charge dynamics under an AC potential"},
      {"compare", "Newton versus fixed-point iteration counts"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--solver", solver, "newton or fixed-point")
        ->check(CLI::IsMember({"newton", "fixed-point"}));
    sub->add_option("--seed", seed, "random seed recorded with the run");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string cmd = app.get_subcommands().front()->get_name();

  try {
    pnp::RunConfig cfg = pnp::load_config(config_path);
    if (!solver.empty()) cfg.solver = pnp::parse_solver_kind(solver);
    if (seed) cfg.seed = *seed;
    run(cmd, cfg, out_dir);
  } catch (const pnp::ConfigError& e) {
    return fail("config_error", e.what(), 2);
  } catch (const pnp::ConvergenceError& e) {
    return fail("non_convergence", e.what(), 3);
  } catch (const pnp::InvariantViolation& e) {
    return fail("invariant_violation", e.what(), 4, e.step());
  } catch (const std::exception& e) {
    return fail("error", e.what(), 1);
  }
  return 0;
}
