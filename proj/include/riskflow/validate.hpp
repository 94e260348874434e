#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "riskflow/distribution.hpp"
#include "riskflow/forward.hpp"
#include "riskflow/generator.hpp"
#include "riskflow/grids.hpp"
#include "riskflow/policy.hpp"
#include "riskflow/risk.hpp"

namespace riskflow {

// ---- distances -----------------------------------------------------------

// Integral of |F_p - F_q| over the merged support.
double wasserstein1(const DiscreteDistribution& p, const DiscreteDistribution& q);

// sup sum f (p - q) over |f| <= s, Lip(f) <= l, s + l <= 1, solved as an LP.
double bounded_lipschitz_distance(const DiscreteDistribution& p, const DiscreteDistribution& q);

// Empirical law of samples; equal values are merged.
DiscreteDistribution empirical_distribution(std::vector<double> samples);

// ---- Monte Carlo -----------------------------------------------------------

struct McConfig {
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double horizon = 0.0;  // defaults to the end of the time grid when 0
};

struct McResult {
  std::vector<double> samples;     // terminal discounted cost per path
  std::vector<double> x_occupancy; // terminal law of the base state
  double mean = 0.0;
  double stddev = 0.0;
  double stderr_mean = 0.0;
  std::size_t fallback_events = 0;  // lookups on cells masked unreachable
};

// Exact simulation of the controlled base chain with exponential clocks.
// The policy (on the product grid x * n_y + j) is looked up at the nearest
// y-cell; slice k+1 applies on (t_k, t_{k+1}].
McResult simulate_paths(const ControlledGenerator& base, const MarkovPolicy& policy,
                        const CostTable& cost_rate, double discount, const Eigen::VectorXd& nu,
                        const UniformGrid& y_grid, const UniformGrid& t_grid, const McConfig& cfg);

// ---- dynamic programming ---------------------------------------------------

struct DpResult {
  double value = 0.0;
  Eigen::VectorXd initial_values;  // V_0 per state
  MarkovPolicy policy;             // greedy deterministic policy
};

// Risk-neutral backward recursion with the implicit Euler operator:
// V_k = (I - dt Q_pi)^{-1} (V_{k+1} + dt e^{-alpha t} c_pi), where the
// per-state action is optimized by policy iteration within each step.
// Returns sum_z initial(z) V_0(z).
DpResult risk_neutral_dp(const ControlledGenerator& gen, const CostTable& cost_rate, double discount,
                         const UniformGrid& t_grid, const Eigen::VectorXd& initial,
                         const Eigen::VectorXd& terminal_value,
                         DiscountSampling sampling = DiscountSampling::left);

// ---- policy enumeration ----------------------------------------------------

struct EnumerationResult {
  double best_value = 0.0;
  MarkovPolicy best_policy;
  std::size_t policies_evaluated = 0;
};

inline constexpr double kMaxEnumeratedPolicies = 1e6;

// Deterministic Markov policies over slices 1..n_t-1 (slice 0 never acts).
// Each is propagated and the risk of its terminal total cost evaluated.
EnumerationResult enumerate_policies(const ControlledGenerator& gen, const Eigen::VectorXd& initial,
                                     const UniformGrid& t_grid, const std::vector<double>& x_values,
                                     const std::vector<double>& y_values,
                                     const std::vector<double>& terminal_cost, const RiskSpec& spec);

}  // namespace riskflow

namespace riskflow {

// Empirical terminal costs against a model marginal on a grid capped at
// `y_cap`. Samples are clipped at the cap before the comparison.
struct McComparison {
  double w1_capped = 0.0;
  double w1_raw = 0.0;
  double grid_allowance = 0.0;   // grid spacing
  double stderr_allowance = 0.0; // 3 x standard error of the capped mean
  double capped_mean = 0.0;
  bool within() const { return w1_capped <= grid_allowance + stderr_allowance; }
};

McComparison compare_to_marginal(const McResult& mc, const DiscreteDistribution& model, double y_cap,
                                 double grid_spacing);

}  // namespace riskflow
