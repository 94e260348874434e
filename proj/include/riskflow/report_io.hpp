#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "riskflow/distribution.hpp"
#include "riskflow/optimize.hpp"
#include "riskflow/policy.hpp"

namespace riskflow {

// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

// Rows "t,<label>,mass" for every time and support point.
void write_marginals_csv(const std::filesystem::path& path, const std::string& label,
                         const std::vector<double>& times, const std::vector<DiscreteDistribution>& slices);
TrajectoryDistribution read_marginals_csv(const std::filesystem::path& path);

// Rows "t,x,y,a,prob" for reachable cells.
void write_policy_csv(const std::filesystem::path& path, const MarkovPolicy& policy, const StateLayout& layout);
MarkovPolicy read_policy_csv(const std::filesystem::path& path, const StateLayout& layout);

// Rows "t,x,y,a,mass" of the joint solution.
void write_trajectory_csv(const std::filesystem::path& path, const SolveReport& report);

// One "sample" column of terminal costs.
void write_samples_csv(const std::filesystem::path& path, const std::vector<double>& samples);

nlohmann::json report_to_json(const SolveReport& report);
void write_json(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json read_json(const std::filesystem::path& path);

// report.json, marginal_x.csv, marginal_y.csv and policy.csv under `dir`.
void write_solve_outputs(const std::filesystem::path& dir, const SolveReport& report);

}  // namespace riskflow
