#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "riskflow/distribution.hpp"
#include "riskflow/generator.hpp"
#include "riskflow/grids.hpp"
#include "riskflow/policy.hpp"

namespace riskflow {

// Generator of the chain obtained by mixing the action generators of
// `step` with the action law of policy slice `slice`.
RateMatrix policy_averaged_generator(const ControlledGenerator& gen, std::size_t step,
                                     const MarkovPolicy& policy, std::size_t slice);

// Solves (I - dt Q^T) m_next = m for one implicit Euler step.
Eigen::VectorXd implicit_euler_step(const RateMatrix& q, const Eigen::VectorXd& m, double dt);

struct PropagationResult {
  std::vector<Eigen::VectorXd> slices;
  std::vector<double> step_mass_deviation;
  double max_mass_deviation = 0.0;
  double min_mass = 0.0;
  bool flagged = false;  // some step drifted by more than 1e-8
};

// Implicit Euler over t_grid. The control of the step [t_k, t_{k+1}] is
// the policy slice k+1, so the new slice carries the action. No
// renormalization is applied.
PropagationResult propagate_forward(const ControlledGenerator& gen, const MarkovPolicy& policy,
                                    const Eigen::VectorXd& initial, const UniformGrid& t_grid);

// Wraps per-time state vectors as distributions over `state_axes`.
TrajectoryDistribution make_trajectory(const std::vector<Eigen::VectorXd>& slices,
                                       const std::vector<Axis>& state_axes,
                                       const std::vector<double>& times);

// The time-stacked forward equation as linear equality constraints on the
// joint measures mu_k(z, a) >= 0.
class ForwardProgram {
 public:
  std::size_t num_times() const { return num_times_; }
  std::size_t num_states() const { return num_states_; }
  std::size_t num_actions() const { return num_actions_; }
  double dt() const { return dt_; }

  std::size_t num_variables() const { return num_times_ * num_states_ * num_actions_; }
  std::size_t num_constraints() const { return static_cast<std::size_t>(constraints_.rows()); }
  std::size_t column(std::size_t k, std::size_t z, std::size_t a) const {
    return (k * num_states_ + z) * num_actions_ + a;
  }

  const Eigen::SparseMatrix<double>& constraints() const { return constraints_; }
  const Eigen::VectorXd& rhs() const { return rhs_; }

  // Appends user-supplied equality rows over the same columns.
  void add_constraints(const Eigen::SparseMatrix<double>& rows, const Eigen::VectorXd& rhs);

  // Objective vector that weights terminal-slice variable (z, a) by
  // per_state[z].
  Eigen::VectorXd terminal_objective(std::span<const double> per_state) const;

  // Sums a solution vector over actions, one vector per time index.
  std::vector<Eigen::VectorXd> state_slices(const Eigen::VectorXd& solution) const;

  friend ForwardProgram assemble_forward_program(const ControlledGenerator&, const Eigen::VectorXd&,
                                                 const UniformGrid&);

 private:
  std::size_t num_times_ = 0;
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  double dt_ = 0.0;
  Eigen::SparseMatrix<double> constraints_;
  Eigen::VectorXd rhs_;
};

ForwardProgram assemble_forward_program(const ControlledGenerator& gen, const Eigen::VectorXd& initial,
                                        const UniformGrid& t_grid);

}  // namespace riskflow
