#include "riskflow/run.hpp"

#include <chrono>
#include <cmath>

#include "riskflow/error.hpp"
#include "riskflow/report_io.hpp"
#include "riskflow/validate.hpp"

namespace riskflow {

namespace {

// Maps library exceptions to exit codes; `body` returns the code on success.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InvalidParameter& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InvalidGrid& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const InvalidCost& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const PolicySpaceTooLarge& e) {
    err << "config error: " << e.what() << '\n';
    return exit_code::config;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::failure;
  }
}

std::filesystem::path config_dir(const std::filesystem::path& config) {
  return config.has_parent_path() ? config.parent_path() : std::filesystem::path(".");
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int exit_code_for(LpStatus status) {
  switch (status) {
    case LpStatus::optimal:
      return exit_code::ok;
    case LpStatus::infeasible:
    case LpStatus::unbounded:
      return exit_code::infeasible;
    case LpStatus::max_iter:
      return exit_code::max_iter;
  }
  return exit_code::failure;
}

SolveReport solve_problem(const ProblemInstance& instance, const RiskSpec& risk, const SolveOptions& options) {
  risk.validate();
  const ForwardProgram fp = assemble_forward_program(instance.product, instance.initial, instance.t_grid);
  const StateLayout layout = instance.layout();
  if (risk.is_linear()) return optimize_linear_risk(fp, instance.product, layout, risk, options);
  return optimize_smooth_risk(fp, instance.product, layout, risk, options);
}

int run_solve(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err, bool write_joint, bool verbose) {
  return guarded(err, [&] {
    const ProblemSpec spec = load_config(config);
    const ProblemInstance inst = build_instance(spec, config_dir(config));
    SolveOptions options = solve_options(spec);
    if (verbose) options.lp.log = &err;
    const auto start = std::chrono::steady_clock::now();
    const SolveReport report = solve_problem(inst, spec.risk, options);
    const double elapsed = seconds_since(start);

    write_solve_outputs(out_dir, report);
    if (write_joint) write_trajectory_csv(out_dir / "trajectory.csv", report);

    out << "status " << to_string(report.status) << '\n'
        << "rho_star " << format_double(report.rho_star) << '\n'
        << "duality_gap " << format_double(report.duality_gap) << '\n'
        << "iterations " << report.iterations << '\n'
        << "stationarity_w1 " << format_double(report.stationarity_w1) << '\n'
        << "boundary_mass " << format_double(report.boundary_mass) << '\n'
        << "strictness_fraction " << format_double(report.strictness_fraction) << '\n'
        << "seconds " << elapsed << '\n';
    if (report.boundary_mass > 1e-3) {
      err << "warning: " << report.boundary_mass << " of the terminal mass sits in the top cost cell\n";
    }
    return exit_code_for(report.status);
  });
}

int run_validate(const std::filesystem::path& config, const std::filesystem::path& report_path,
                 std::optional<std::size_t> paths, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const ProblemSpec spec = load_config(config);
    const ProblemInstance inst = build_instance(spec, config_dir(config));
    const StateLayout layout = inst.layout();
    const auto dir = config_dir(report_path);
    const nlohmann::json prior = read_json(report_path);

    const MarkovPolicy policy = read_policy_csv(dir / "policy.csv", layout);
    const TrajectoryDistribution ys = read_marginals_csv(dir / "marginal_y.csv");
    if (ys.slices.empty()) throw IoError("no rows in " + (dir / "marginal_y.csv").string());

    McConfig mc_cfg;
    mc_cfg.paths = paths.value_or(spec.validation.paths);
    mc_cfg.seed = seed.value_or(spec.validation.seed);
    const auto start = std::chrono::steady_clock::now();
    const McResult mc =
        simulate_paths(inst.base, policy, inst.cost, inst.discount, inst.nu, inst.y_grid, inst.t_grid, mc_cfg);
    const double mc_seconds = seconds_since(start);
    const McComparison cmp = compare_to_marginal(mc, ys.slices.back(), inst.y_grid.hi, inst.y_grid.spacing);

    // Risk-neutral value of the same discretized problem.
    const DpResult dp = risk_neutral_dp(inst.product, CostTable::Zero(static_cast<Eigen::Index>(layout.num_states()),
                                                                       static_cast<Eigen::Index>(inst.base.num_actions())),
                                        0.0, inst.t_grid, inst.initial, inst.terminal_total_cost(), inst.sampling);
    Eigen::VectorXd base_terminal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(inst.base.dim()));
    for (std::size_t x = 0; x < inst.terminal_cost.size(); ++x) base_terminal(static_cast<Eigen::Index>(x)) = inst.terminal_cost[x];
    const DpResult dp_base =
        risk_neutral_dp(inst.base, inst.cost, inst.discount, inst.t_grid, inst.nu, base_terminal, inst.sampling);

    nlohmann::json summary = {{"paths", mc_cfg.paths},
                              {"seed", mc_cfg.seed},
                              {"mean", mc.mean},
                              {"stddev", mc.stddev},
                              {"stderr", mc.stderr_mean},
                              {"capped_mean", cmp.capped_mean},
                              {"w1_capped", cmp.w1_capped},
                              {"w1_raw", cmp.w1_raw},
                              {"grid_allowance", cmp.grid_allowance},
                              {"stderr_allowance", cmp.stderr_allowance},
                              {"within_allowance", cmp.within()},
                              {"fallback_events", mc.fallback_events},
                              {"mc_seconds", mc_seconds},
                              {"dp_value", dp.value},
                              {"dp_value_untruncated", dp_base.value},
                              {"report_rho_star", prior.value("rho_star", std::nan(""))}};
    write_json(dir / "mc_summary.json", summary);
    write_samples_csv(dir / "mc_samples.csv", mc.samples);
    out << summary.dump(2) << '\n';
    return exit_code::ok;
  });
}

int run_oracle(const std::filesystem::path& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ProblemSpec spec = load_config(config);
    const ProblemInstance inst = build_instance(spec, config_dir(config));
    const EnumerationResult en = enumerate_policies(inst.product, inst.initial, inst.t_grid, inst.x_values,
                                                    inst.y_grid.points, inst.terminal_cost, spec.risk);
    const SolveReport lp = solve_problem(inst, spec.risk, solve_options(spec));
    out << "policies_evaluated " << en.policies_evaluated << '\n'
        << "enumeration_value " << format_double(en.best_value) << '\n'
        << "solver_value " << format_double(lp.rho_star) << '\n'
        << "difference " << format_double(en.best_value - lp.rho_star) << '\n';
    return exit_code_for(lp.status);
  });
}

}  // namespace riskflow
