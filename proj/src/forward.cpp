#include "riskflow/forward.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "riskflow/error.hpp"

namespace riskflow {

RateMatrix policy_averaged_generator(const ControlledGenerator& gen, std::size_t step,
                                     const MarkovPolicy& policy, std::size_t slice) {
  const std::size_t n = gen.dim();
  std::vector<Triplet> entries;
  for (std::size_t a = 0; a < gen.num_actions(); ++a) {
    const auto& q = gen.at(step, a).q;
    for (Eigen::Index z = 0; z < q.outerSize(); ++z) {
      const double w = policy.prob(slice, static_cast<std::size_t>(z), a);
      if (w == 0.0) continue;
      for (SparseRowMatrix::InnerIterator it(q, z); it; ++it) {
        entries.emplace_back(static_cast<int>(z), static_cast<int>(it.col()), w * it.value());
      }
    }
  }
  return rate_matrix_from_triplets(n, entries);
}

Eigen::VectorXd implicit_euler_step(const RateMatrix& q, const Eigen::VectorXd& m, double dt) {
  const auto n = static_cast<Eigen::Index>(q.dim());
  Eigen::SparseMatrix<double> identity(n, n);
  identity.setIdentity();
  Eigen::SparseMatrix<double> system = identity - dt * Eigen::SparseMatrix<double>(q.q.transpose());
  system.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(system);
  if (lu.info() != Eigen::Success) throw PropagationError("implicit Euler system is singular");
  Eigen::VectorXd next = lu.solve(m);
  if (lu.info() != Eigen::Success || !next.allFinite()) {
    throw PropagationError("implicit Euler solve failed");
  }
  return next;
}

PropagationResult propagate_forward(const ControlledGenerator& gen, const MarkovPolicy& policy,
                                    const Eigen::VectorXd& initial, const UniformGrid& t_grid) {
  if (static_cast<std::size_t>(initial.size()) != gen.dim()) {
    throw PropagationError("initial distribution does not match the generator dimension");
  }
  if (policy.num_states() != gen.dim() || policy.num_actions() != gen.num_actions() ||
      policy.num_times() != t_grid.n) {
    throw PropagationError("policy shape does not match generator and time grid");
  }
  if (gen.time_dependent() && gen.num_steps() + 1 < t_grid.n) {
    throw PropagationError("time-dependent generator covers fewer steps than the time grid");
  }
  PropagationResult r;
  r.slices.reserve(t_grid.n);
  r.slices.push_back(initial);
  r.min_mass = initial.minCoeff();
  for (std::size_t k = 0; k + 1 < t_grid.n; ++k) {
    const RateMatrix q = policy_averaged_generator(gen, k, policy, k + 1);
    Eigen::VectorXd next = implicit_euler_step(q, r.slices.back(), t_grid.spacing);
    const double dev = std::abs(next.sum() - r.slices.back().sum());
    r.step_mass_deviation.push_back(dev);
    r.max_mass_deviation = std::max(r.max_mass_deviation, dev);
    r.min_mass = std::min(r.min_mass, next.minCoeff());
    r.slices.push_back(std::move(next));
  }
  r.flagged = r.max_mass_deviation > 1e-8;
  return r;
}

TrajectoryDistribution make_trajectory(const std::vector<Eigen::VectorXd>& slices,
                                       const std::vector<Axis>& state_axes,
                                       const std::vector<double>& times) {
  TrajectoryDistribution traj;
  traj.times = times;
  traj.slices.reserve(slices.size());
  for (const auto& s : slices) {
    traj.slices.emplace_back(state_axes, std::vector<double>(s.data(), s.data() + s.size()));
  }
  return traj;
}

void ForwardProgram::add_constraints(const Eigen::SparseMatrix<double>& rows, const Eigen::VectorXd& rhs) {
  if (static_cast<std::size_t>(rows.cols()) != num_variables() || rows.rows() != rhs.size()) {
    throw AssemblyError("extra constraint rows have inconsistent dimensions");
  }
  Eigen::SparseMatrix<double> stacked(constraints_.rows() + rows.rows(), constraints_.cols());
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(constraints_.nonZeros() + rows.nonZeros()));
  for (Eigen::Index j = 0; j < constraints_.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(constraints_, j); it; ++it) {
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(j), it.value());
    }
  }
  for (Eigen::Index j = 0; j < rows.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(rows, j); it; ++it) {
      entries.emplace_back(static_cast<int>(constraints_.rows() + it.row()), static_cast<int>(j), it.value());
    }
  }
  stacked.setFromTriplets(entries.begin(), entries.end());
  constraints_ = std::move(stacked);
  Eigen::VectorXd b(rhs_.size() + rhs.size());
  b << rhs_, rhs;
  rhs_ = std::move(b);
}

Eigen::VectorXd ForwardProgram::terminal_objective(std::span<const double> per_state) const {
  if (per_state.size() != num_states_) throw AssemblyError("terminal objective has wrong length");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_variables()));
  const std::size_t k = num_times_ - 1;
  for (std::size_t z = 0; z < num_states_; ++z) {
    for (std::size_t a = 0; a < num_actions_; ++a) {
      c(static_cast<Eigen::Index>(column(k, z, a))) = per_state[z];
    }
  }
  return c;
}

std::vector<Eigen::VectorXd> ForwardProgram::state_slices(const Eigen::VectorXd& solution) const {
  std::vector<Eigen::VectorXd> out(num_times_, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_states_)));
  for (std::size_t k = 0; k < num_times_; ++k) {
    for (std::size_t z = 0; z < num_states_; ++z) {
      double s = 0.0;
      for (std::size_t a = 0; a < num_actions_; ++a) s += solution(static_cast<Eigen::Index>(column(k, z, a)));
      out[k](static_cast<Eigen::Index>(z)) = s;
    }
  }
  return out;
}

ForwardProgram assemble_forward_program(const ControlledGenerator& gen, const Eigen::VectorXd& initial,
                                        const UniformGrid& t_grid) {
  const std::size_t nz = gen.dim();
  const std::size_t na = gen.num_actions();
  const std::size_t nt = t_grid.n;
  if (static_cast<std::size_t>(initial.size()) != nz) {
    throw AssemblyError("initial distribution has " + std::to_string(initial.size()) +
                        " entries, generator has " + std::to_string(nz) + " states");
  }
  if (gen.time_dependent() && gen.num_steps() + 1 < nt) {
    throw AssemblyError("time-dependent generator covers fewer steps than the time grid");
  }

  ForwardProgram fp;
  fp.num_times_ = nt;
  fp.num_states_ = nz;
  fp.num_actions_ = na;
  fp.dt_ = t_grid.spacing;

  std::vector<Triplet> entries;
  std::size_t nnz_estimate = nz * na;
  for (std::size_t a = 0; a < na; ++a) nnz_estimate += static_cast<std::size_t>(gen.at(0, a).q.nonZeros());
  entries.reserve(nnz_estimate * nt + nz * na * nt);

  // Initial condition: sum_a mu_0(z, a) = initial(z).
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t a = 0; a < na; ++a) {
      entries.emplace_back(static_cast<int>(z), static_cast<int>(fp.column(0, z, a)), 1.0);
    }
  }

  // Step k, row z: sum_a mu_{k+1}(z,a) - dt sum_{z',a} Q_{k,a}(z', z) mu_{k+1}(z',a)
  //                  - sum_a mu_k(z,a) = 0.
  const double dt = t_grid.spacing;
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const std::size_t row0 = (k + 1) * nz;
    for (std::size_t a = 0; a < na; ++a) {
      const auto& q = gen.at(k, a).q;
      for (std::size_t src = 0; src < nz; ++src) {
        const auto col = static_cast<int>(fp.column(k + 1, src, a));
        double diag = 1.0;
        for (SparseRowMatrix::InnerIterator it(q, static_cast<Eigen::Index>(src)); it; ++it) {
          const auto dst = static_cast<std::size_t>(it.col());
          if (dst == src) {
            diag -= dt * it.value();
          } else {
            entries.emplace_back(static_cast<int>(row0 + dst), col, -dt * it.value());
          }
        }
        entries.emplace_back(static_cast<int>(row0 + src), col, diag);
        entries.emplace_back(static_cast<int>(row0 + src), static_cast<int>(fp.column(k, src, a)), -1.0);
      }
    }
  }

  const auto rows = static_cast<Eigen::Index>(nt * nz);
  fp.constraints_.resize(rows, static_cast<Eigen::Index>(fp.num_variables()));
  fp.constraints_.setFromTriplets(entries.begin(), entries.end());
  fp.constraints_.makeCompressed();
  fp.rhs_ = Eigen::VectorXd::Zero(rows);
  fp.rhs_.head(static_cast<Eigen::Index>(nz)) = initial;
  return fp;
}

}  // namespace riskflow
