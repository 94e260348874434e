#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

#include "riskflow/optimize.hpp"
#include "riskflow/problem.hpp"

namespace riskflow {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int config = 2;
inline constexpr int infeasible = 3;
inline constexpr int max_iter = 4;
inline constexpr int io = 5;
}  // namespace exit_code

int exit_code_for(LpStatus status);

// Assembles the forward program and dispatches to the LP or the
// conditional-gradient solver depending on the risk.
SolveReport solve_problem(const ProblemInstance& instance, const RiskSpec& risk, const SolveOptions& options);

int run_solve(const std::filesystem::path& config, const std::filesystem::path& out_dir, std::ostream& out,
              std::ostream& err, bool write_joint = false, bool verbose = false);

// Monte Carlo and dynamic-programming checks of a report written by
// run_solve; writes mc_summary.json beside it.
int run_validate(const std::filesystem::path& config, const std::filesystem::path& report,
                 std::optional<std::size_t> paths, std::optional<std::uint64_t> seed, std::ostream& out,
                 std::ostream& err);

// Exhaustive policy search on a tiny instance, compared with the LP.
int run_oracle(const std::filesystem::path& config, std::ostream& out, std::ostream& err);

}  // namespace riskflow
