#include "riskflow/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "riskflow/error.hpp"
#include "riskflow/validate.hpp"

namespace riskflow {

namespace {

double terminal_value(const StateLayout& layout, std::size_t z) {
  const std::size_t ny = layout.y_values.size();
  const double v = layout.terminal_cost.empty() ? 0.0 : layout.terminal_cost[z / ny];
  return layout.y_values[z % ny] + v;
}

// Chain rule through the pushforward z -> y + v(x): coefficient of z is the
// gradient entry of the total-cost value it lands on.
std::vector<double> per_state_coefficients(const StateLayout& layout, const DiscreteDistribution& total,
                                           const std::vector<double>& gradient) {
  const auto& values = total.values();
  std::vector<double> out(layout.num_states());
  for (std::size_t z = 0; z < out.size(); ++z) {
    const double v = terminal_value(layout, z);
    auto it = std::lower_bound(values.begin(), values.end(), v - 1e-12);
    if (it == values.end()) --it;
    out[z] = gradient[static_cast<std::size_t>(it - values.begin())];
  }
  return out;
}

RiskSpec linear_objective_of(const RiskSpec& spec) {
  RiskSpec lin = spec;
  if (spec.kind == RiskKind::entropic) {
    lin.kind = spec.theta == 0.0 ? RiskKind::expectation : RiskKind::entropic_linear;
  }
  return lin;
}

struct LpRun {
  LpSolution lp;
  double scale = 1.0;
  double shift = 0.0;
};

// Affine rescaling of the terminal coefficients to [0, 1]. Terminal mass is
// fixed at one on the feasible set, so the argmin is unchanged.
LpRun solve_terminal_lp(const ForwardProgram& fp, const std::vector<double>& coeff, const LpOptions& options) {
  LpRun run;
  const auto [lo, hi] = std::minmax_element(coeff.begin(), coeff.end());
  run.shift = *lo;
  run.scale = *hi > *lo ? *hi - *lo : 1.0;
  std::vector<double> scaled(coeff.size());
  for (std::size_t i = 0; i < coeff.size(); ++i) scaled[i] = (coeff[i] - run.shift) / run.scale;
  LpProblem problem{fp.constraints(), fp.rhs(), fp.terminal_objective(scaled)};
  run.lp = solve_lp(problem, options);
  return run;
}

void finalize(SolveReport& r, const ForwardProgram& fp, const ControlledGenerator& gen, const StateLayout& layout,
              const SolveOptions& options) {
  r.layout = layout;
  r.policy = extract_policy(std::span<const double>(r.solution.data(), static_cast<std::size_t>(r.solution.size())),
                            fp.num_times(), fp.num_states(), fp.num_actions(), options.mass_floor);
  r.strictness_fraction = r.policy.strictness_fraction(0.99);

  // Report the law generated by the extracted Markov control; it agrees with
  // the LP slices up to solver tolerance and conserves mass exactly.
  const auto lp_slices = fp.state_slices(r.solution);
  UniformGrid t_grid = build_uniform_grid(layout.times.front(), layout.times.back(), layout.times.size());
  const Eigen::VectorXd initial = fp.rhs().head(static_cast<Eigen::Index>(fp.num_states()));
  auto prop = propagate_forward(gen, r.policy, initial, t_grid);
  r.policy_reproduction_error = 0.0;
  for (std::size_t k = 0; k < lp_slices.size(); ++k) {
    r.policy_reproduction_error =
        std::max(r.policy_reproduction_error, (lp_slices[k] - prop.slices[k]).lpNorm<Eigen::Infinity>());
  }
  r.state_slices = std::move(prop.slices);

  r.terminal_cost = total_cost_distribution(layout, r.state_slices.back());
  r.rho_star = evaluate(r.risk, r.terminal_cost);
  const auto ys = r.y_marginals();
  r.stationarity_w1 = ys.size() >= 2 ? wasserstein1(ys[ys.size() - 1], ys[ys.size() - 2]) : 0.0;
  r.boundary_mass = ys.back().mass().back();
}

}  // namespace

std::vector<Axis> StateLayout::state_axes() const { return {Axis{"x", x_values}, Axis{"y", y_values}}; }

std::vector<DiscreteDistribution> SolveReport::x_marginals() const {
  std::vector<DiscreteDistribution> out;
  for (const auto& s : state_slices) {
    out.push_back(marginal(DiscreteDistribution(layout.state_axes(), std::vector<double>(s.data(), s.data() + s.size())),
                           {"x"}));
  }
  return out;
}

std::vector<DiscreteDistribution> SolveReport::y_marginals() const {
  std::vector<DiscreteDistribution> out;
  for (const auto& s : state_slices) {
    out.push_back(marginal(DiscreteDistribution(layout.state_axes(), std::vector<double>(s.data(), s.data() + s.size())),
                           {"y"}));
  }
  return out;
}

DiscreteDistribution total_cost_distribution(const StateLayout& layout, const Eigen::VectorXd& slice) {
  DiscreteDistribution joint(layout.state_axes(), std::vector<double>(slice.data(), slice.data() + slice.size()));
  const std::vector<double> v =
      layout.terminal_cost.empty() ? std::vector<double>(layout.x_values.size(), 0.0) : layout.terminal_cost;
  return apply_terminal_cost(joint, v);
}

SolveReport optimize_linear_risk(const ForwardProgram& fp, const ControlledGenerator& gen,
                                 const StateLayout& layout, const RiskSpec& spec, const SolveOptions& options) {
  spec.validate();
  if (!spec.is_linear()) throw InvalidParameter("optimize_linear_risk needs a linear risk objective");
  if (layout.num_states() != fp.num_states()) throw AssemblyError("state layout does not match the program");

  SolveReport r;
  r.risk = spec;
  const RiskSpec lin = linear_objective_of(spec);
  // Gradient of a linear risk does not depend on the distribution; evaluate
  // it at the initial law.
  const auto start = total_cost_distribution(layout, Eigen::VectorXd::Constant(
                                                         static_cast<Eigen::Index>(fp.num_states()),
                                                         1.0 / static_cast<double>(fp.num_states())));
  const auto coeff = per_state_coefficients(layout, start, risk_gradient(lin, start));
  const LpRun run = solve_terminal_lp(fp, coeff, options.lp);

  r.status = run.lp.status;
  r.iterations = run.lp.iterations;
  r.fw_iterations = 1;
  r.primal_residual = run.lp.primal_residual;
  r.rho_linear = run.shift + run.scale * run.lp.primal_objective;
  r.duality_gap = std::abs(run.lp.primal_objective - run.lp.dual_objective) * run.scale /
                  (1.0 + std::abs(r.rho_linear));
  if (r.status == LpStatus::infeasible || r.status == LpStatus::unbounded) return r;
  r.solution = run.lp.x;
  finalize(r, fp, gen, layout, options);
  return r;
}

SolveReport optimize_smooth_risk(const ForwardProgram& fp, const ControlledGenerator& gen,
                                 const StateLayout& layout, const RiskSpec& spec, const SolveOptions& options) {
  spec.validate();
  if (layout.num_states() != fp.num_states()) throw AssemblyError("state layout does not match the program");

  SolveReport r;
  r.risk = spec;
  r.status = LpStatus::optimal;

  std::vector<double> last_coeff;
  LpRun last_run;
  auto vertex = [&](const std::vector<double>& coeff) -> const LpRun& {
    if (coeff != last_coeff) {
      last_run = solve_terminal_lp(fp, coeff, options.lp);
      last_coeff = coeff;
      r.iterations += last_run.lp.iterations;
      r.duality_gap = std::max(r.duality_gap,
                               std::abs(last_run.lp.primal_objective - last_run.lp.dual_objective) *
                                   last_run.scale / (1.0 + std::abs(last_run.shift + last_run.scale *
                                                                                          last_run.lp.primal_objective)));
      r.primal_residual = std::max(r.primal_residual, last_run.lp.primal_residual);
      if (last_run.lp.status != LpStatus::optimal) r.status = last_run.lp.status;
    }
    return last_run;
  };

  auto terminal_of = [&](const Eigen::VectorXd& mu) { return total_cost_distribution(layout, fp.state_slices(mu).back()); };

  // Start from the vertex minimizing the gradient at the initial law.
  Eigen::VectorXd initial_slice = fp.rhs().head(static_cast<Eigen::Index>(fp.num_states()));
  auto start = total_cost_distribution(layout, initial_slice);
  Eigen::VectorXd mu = vertex(per_state_coefficients(layout, start, risk_gradient(spec, start))).lp.x;
  if (r.status == LpStatus::infeasible || r.status == LpStatus::unbounded) return r;

  Eigen::VectorXd best = mu;
  double best_value = evaluate(spec, terminal_of(mu));
  r.fw_gap = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_fw_iter; ++it) {
    const auto current = terminal_of(mu);
    const auto grad = risk_gradient(spec, current);
    const auto coeff = per_state_coefficients(layout, current, grad);
    const LpRun& run = vertex(coeff);
    if (run.lp.status == LpStatus::infeasible || run.lp.status == LpStatus::unbounded) return r;
    const Eigen::VectorXd& s = run.lp.x;

    // Gap on the terminal slice: <coeff, slice(mu) - slice(s)>.
    const auto mu_slice = fp.state_slices(mu).back();
    const auto s_slice = fp.state_slices(s).back();
    double gap = 0.0;
    for (std::size_t z = 0; z < coeff.size(); ++z) {
      gap += coeff[z] * (mu_slice(static_cast<Eigen::Index>(z)) - s_slice(static_cast<Eigen::Index>(z)));
    }
    r.fw_iterations = it;
    r.fw_gap = std::max(gap, 0.0);
    if (gap <= options.fw_tol) break;

    const double step = 2.0 / (static_cast<double>(it) + 1.0);
    mu += step * (s - mu);
    const double value = evaluate(spec, terminal_of(mu));
    if (value < best_value) {
      best_value = value;
      best = mu;
    }
  }
  if (r.fw_gap > options.fw_tol && r.status == LpStatus::optimal) r.status = LpStatus::max_iter;

  r.solution = evaluate(spec, terminal_of(mu)) <= best_value ? mu : best;
  r.rho_linear = evaluate(linear_objective_of(spec), terminal_of(r.solution));
  finalize(r, fp, gen, layout, options);
  return r;
}

}  // namespace riskflow
