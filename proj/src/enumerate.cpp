#include <cmath>
#include <limits>
#include <string>

#include "riskflow/error.hpp"
#include "riskflow/optimize.hpp"
#include "riskflow/validate.hpp"

namespace riskflow {

EnumerationResult enumerate_policies(const ControlledGenerator& gen, const Eigen::VectorXd& initial,
                                     const UniformGrid& t_grid, const std::vector<double>& x_values,
                                     const std::vector<double>& y_values,
                                     const std::vector<double>& terminal_cost, const RiskSpec& spec) {
  spec.validate();
  const std::size_t nz = gen.dim();
  const std::size_t na = gen.num_actions();
  const std::size_t steps = t_grid.n - 1;
  if (x_values.size() * y_values.size() != nz) throw InvalidParameter("state labels do not match the generator");

  const double count = std::pow(static_cast<double>(na), static_cast<double>(nz * steps));
  if (count > kMaxEnumeratedPolicies) {
    throw PolicySpaceTooLarge("policy space has " + std::to_string(count) + " deterministic policies (limit 1e6)");
  }

  StateLayout layout{x_values, y_values, {}, t_grid.points, terminal_cost};
  EnumerationResult result;
  result.best_value = std::numeric_limits<double>::infinity();
  MarkovPolicy current(t_grid.n, nz, na);
  for (std::size_t z = 0; z < nz; ++z) current.set_action(0, z, 0);

  const auto per_slice = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(na), static_cast<double>(nz))));

  // Depth-first over steps; each level fixes the deterministic action of
  // every state in slice k+1 and advances one implicit Euler step.
  auto descend = [&](auto&& self, std::size_t k, const Eigen::VectorXd& m) -> void {
    if (k == steps) {
      const double value = evaluate(spec, total_cost_distribution(layout, m));
      ++result.policies_evaluated;
      if (value < result.best_value) {
        result.best_value = value;
        result.best_policy = current;
      }
      return;
    }
    for (std::size_t code = 0; code < per_slice; ++code) {
      std::size_t rest = code;
      for (std::size_t z = 0; z < nz; ++z) {
        current.set_action(k + 1, z, rest % na);
        rest /= na;
      }
      const RateMatrix q = policy_averaged_generator(gen, k, current, k + 1);
      self(self, k + 1, implicit_euler_step(q, m, t_grid.spacing));
    }
  };
  descend(descend, 0, initial);
  return result;
}

}  // namespace riskflow
