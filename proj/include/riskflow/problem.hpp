#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "riskflow/generator.hpp"
#include "riskflow/grids.hpp"
#include "riskflow/optimize.hpp"
#include "riskflow/risk.hpp"

namespace riskflow {

enum class Family { circle_follower, custom };

struct SolverSettings {
  double tol_gap = 1e-9;
  double tol_feas = 1e-9;
  int max_iter = 200;
  int fw_max_iter = 50;
  double fw_tol = 1e-6;
  bool operator==(const SolverSettings&) const = default;
};

struct ValidationSettings {
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
  bool operator==(const ValidationSettings&) const = default;
};

// Everything needed to build and solve one problem. Defaults reproduce the
// follower-on-a-circle instance.
struct ProblemSpec {
  Family family = Family::circle_follower;
  double sigma = 1.0;
  double gamma = 2.0;
  double alpha = 0.25;
  double a_min = -0.5;
  double a_max = 0.5;
  std::optional<double> y_max;  // default 2 + gamma * a_max^2
  double horizon = 25.0;
  std::size_t n_x = 21;
  std::size_t n_y = 21;
  std::size_t n_a = 21;
  std::size_t n_t = 21;
  RiskSpec risk{RiskKind::entropic, 1.0, 0.0};
  std::size_t initial_state = 0;
  std::vector<double> initial_weights;  // overrides initial_state when set
  std::vector<double> terminal_cost;    // v(x); empty means zero
  double cost_scale = 1.0;
  DiscountSampling discount_sampling = DiscountSampling::left;
  std::string generator_file;                // custom family: action,row,col,rate CSV
  std::vector<std::vector<double>> cost_rate;  // custom family: states x actions
  SolverSettings solver;
  ValidationSettings validation;

  double effective_y_max() const;
  bool operator==(const ProblemSpec&) const = default;
};

ProblemSpec spec_from_json(const nlohmann::json& config);
nlohmann::json spec_to_json(const ProblemSpec& spec);
ProblemSpec load_config(const std::filesystem::path& path);

// Generator triplets "action_index,row,col,rate"; an optional header line is
// skipped and diagonal entries are recomputed from the row sums.
ControlledGenerator load_generator_triplets(const std::filesystem::path& path);

// Concrete grids, generators and initial law for a spec.
struct ProblemInstance {
  std::vector<double> x_values;
  std::vector<double> action_values;
  UniformGrid y_grid;
  UniformGrid t_grid;
  ControlledGenerator base;
  CostTable cost;
  double discount = 0.0;
  Eigen::VectorXd nu;
  std::vector<double> terminal_cost;
  DiscountSampling sampling = DiscountSampling::left;

  ControlledGenerator product;      // augmented, per time step and action
  Eigen::VectorXd initial;          // nu x delta_0

  AugmentedGenerator augmented() const;
  StateLayout layout() const;
  // Terminal values y + v(x) on the product grid.
  Eigen::VectorXd terminal_total_cost() const;
};

// `base_dir` resolves a relative generator_file.
ProblemInstance build_instance(const ProblemSpec& spec, const std::filesystem::path& base_dir = {});

SolveOptions solve_options(const ProblemSpec& spec);

}  // namespace riskflow
