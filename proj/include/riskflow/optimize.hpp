#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "riskflow/distribution.hpp"
#include "riskflow/forward.hpp"
#include "riskflow/lp.hpp"
#include "riskflow/policy.hpp"
#include "riskflow/risk.hpp"

namespace riskflow {

// Labels of the product space z = x * n_y + j on which a ForwardProgram is
// posed, plus the terminal cost v(x) folded into the total cost y + v(x).
struct StateLayout {
  std::vector<double> x_values;
  std::vector<double> y_values;
  std::vector<double> action_values;
  std::vector<double> times;
  std::vector<double> terminal_cost;  // empty means v = 0

  std::size_t num_states() const { return x_values.size() * y_values.size(); }
  std::vector<Axis> state_axes() const;
};

struct SolveOptions {
  LpOptions lp;
  int max_fw_iter = 50;
  double fw_tol = 1e-6;
  double mass_floor = kMassFloor;
};

struct SolveReport {
  RiskSpec risk;
  LpStatus status = LpStatus::max_iter;
  double rho_star = 0.0;      // risk of the optimal total-cost law
  double rho_linear = 0.0;    // value of the linear LP objective
  double duality_gap = 0.0;   // relative, on the unscaled objective
  double primal_residual = 0.0;
  int iterations = 0;         // interior point iterations, summed over LP solves
  int fw_iterations = 0;
  double fw_gap = 0.0;
  double stationarity_w1 = 0.0;  // W1 between the last two y-marginals
  double boundary_mass = 0.0;    // terminal mass in the top y-cell
  double strictness_fraction = 0.0;
  double policy_reproduction_error = 0.0;  // LP slices vs. re-propagated policy

  Eigen::VectorXd solution;  // joint measure, layout of ForwardProgram::column
  MarkovPolicy policy;
  std::vector<Eigen::VectorXd> state_slices;  // per time, over z
  DiscreteDistribution terminal_cost;          // law of y + v(x) at the final time

  std::vector<DiscreteDistribution> x_marginals() const;
  std::vector<DiscreteDistribution> y_marginals() const;

  StateLayout layout;
};

// Linear objectives (expectation, entropic, entropic_linear) in one LP.
SolveReport optimize_linear_risk(const ForwardProgram& fp, const ControlledGenerator& gen,
                                 const StateLayout& layout, const RiskSpec& spec,
                                 const SolveOptions& options = {});

// Conditional gradient over the feasible measures; any RiskSpec.
SolveReport optimize_smooth_risk(const ForwardProgram& fp, const ControlledGenerator& gen,
                                 const StateLayout& layout, const RiskSpec& spec,
                                 const SolveOptions& options = {});

// Law of the total cost y + v(x) from a state slice over z.
DiscreteDistribution total_cost_distribution(const StateLayout& layout, const Eigen::VectorXd& slice);

}  // namespace riskflow
