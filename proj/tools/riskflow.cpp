#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "riskflow/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"riskflow: risk-aware stochastic control through the forward equation"};
  app.require_subcommand(1);

  std::string config;
  std::string out_dir;
  bool joint = false;
  bool verbose = false;
  auto* solve = app.add_subcommand("solve", "solve the control problem and write reports");
  solve->add_option("--config", config, "JSON problem description")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_dir, "output directory")->required();
  solve->add_flag("--joint", joint, "also write the joint trajectory.csv");
  solve->add_flag("-v,--verbose", verbose, "log interior point iterations");

  std::string report;
  std::optional<std::size_t> paths;
  std::optional<std::uint64_t> seed;
  auto* validate = app.add_subcommand("validate", "Monte Carlo and DP checks of a prior solve");
  validate->add_option("--config", config, "JSON problem description")->required()->check(CLI::ExistingFile);
  validate->add_option("--report", report, "report.json written by solve")->required()->check(CLI::ExistingFile);
  validate->add_option("--paths", paths, "number of simulated paths");
  validate->add_option("--seed", seed, "random seed");

  auto* oracle = app.add_subcommand("oracle", "brute-force policy search on a tiny instance");
  oracle->add_option("--config", config, "JSON problem description")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : riskflow::exit_code::config;
  }

  if (solve->parsed()) return riskflow::run_solve(config, out_dir, std::cout, std::cerr, joint, verbose);
  if (validate->parsed()) return riskflow::run_validate(config, report, paths, seed, std::cout, std::cerr);
  if (oracle->parsed()) return riskflow::run_oracle(config, std::cout, std::cerr);
  return riskflow::exit_code::failure;
}
