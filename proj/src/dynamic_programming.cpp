#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

#include "riskflow/error.hpp"
#include "riskflow/validate.hpp"

namespace riskflow {

DpResult risk_neutral_dp(const ControlledGenerator& gen, const CostTable& cost_rate, double discount,
                         const UniformGrid& t_grid, const Eigen::VectorXd& initial,
                         const Eigen::VectorXd& terminal_value, DiscountSampling sampling) {
  const std::size_t n = gen.dim();
  const std::size_t na = gen.num_actions();
  if (static_cast<std::size_t>(cost_rate.rows()) != n || static_cast<std::size_t>(cost_rate.cols()) != na) {
    throw InvalidParameter("cost table must be (states x actions)");
  }
  if (static_cast<std::size_t>(initial.size()) != n || static_cast<std::size_t>(terminal_value.size()) != n) {
    throw InvalidParameter("initial law and terminal values must match the state count");
  }
  const double dt = t_grid.spacing;
  const auto nn = static_cast<Eigen::Index>(n);

  DpResult result;
  result.policy = MarkovPolicy(t_grid.n, n, na);
  Eigen::VectorXd v = terminal_value;
  std::vector<std::size_t> choice(n, 0);

  for (std::size_t k = t_grid.n - 1; k-- > 0;) {
    const double t = sampling == DiscountSampling::left ? t_grid.points[k] : t_grid.points[k + 1];
    const double weight = dt * std::exp(-discount * t);
    const Eigen::VectorXd w = v;
    Eigen::VectorXd u = w;

    // Policy iteration on the implicit step.
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool changed = false;
      for (std::size_t z = 0; z < n; ++z) {
        auto action_value = [&](std::size_t a) {
          const auto& q = gen.at(k, a).q;
          double out_rate = 0.0;
          double inflow = 0.0;
          for (SparseRowMatrix::InnerIterator it(q, static_cast<Eigen::Index>(z)); it; ++it) {
            if (it.col() == static_cast<Eigen::Index>(z)) {
              out_rate = -it.value();
            } else {
              inflow += it.value() * u(it.col());
            }
          }
          return (w(static_cast<Eigen::Index>(z)) +
                  weight * cost_rate(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(a)) + dt * inflow) /
                 (1.0 + dt * out_rate);
        };
        // Keep the incumbent unless another action is strictly better.
        double best = action_value(choice[z]);
        std::size_t best_a = choice[z];
        for (std::size_t a = 0; a < na; ++a) {
          const double val = action_value(a);
          if (val < best - 1e-13 * (1.0 + std::abs(best))) {
            best = val;
            best_a = a;
          }
        }
        if (best_a != choice[z]) changed = true;
        choice[z] = best_a;
      }

      std::vector<Triplet> entries;
      Eigen::VectorXd rhs(nn);
      for (std::size_t z = 0; z < n; ++z) {
        const auto& q = gen.at(k, choice[z]).q;
        entries.emplace_back(static_cast<int>(z), static_cast<int>(z), 1.0);
        for (SparseRowMatrix::InnerIterator it(q, static_cast<Eigen::Index>(z)); it; ++it) {
          entries.emplace_back(static_cast<int>(z), static_cast<int>(it.col()), -dt * it.value());
        }
        rhs(static_cast<Eigen::Index>(z)) =
            w(static_cast<Eigen::Index>(z)) +
            weight * cost_rate(static_cast<Eigen::Index>(z), static_cast<Eigen::Index>(choice[z]));
      }
      Eigen::SparseMatrix<double> system(nn, nn);
      system.setFromTriplets(entries.begin(), entries.end());
      Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(system);
      if (lu.info() != Eigen::Success) throw PropagationError("singular step in dynamic programming");
      u = lu.solve(rhs);
      if (!changed && sweep > 0) break;
    }

    for (std::size_t z = 0; z < n; ++z) result.policy.set_action(k + 1, z, choice[z]);
    v = u;
  }
  result.initial_values = v;
  result.value = initial.dot(v);
  return result;
}

}  // namespace riskflow
