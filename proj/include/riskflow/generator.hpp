#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "riskflow/grids.hpp"

namespace riskflow {

using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// Generator of a finite-state continuous-time Markov chain. Entry (i, j)
// is the jump rate from state i to state j; rows sum to zero.
struct RateMatrix {
  SparseRowMatrix q;

  std::size_t dim() const { return static_cast<std::size_t>(q.rows()); }
  double rate(std::size_t from, std::size_t to) const {
    return q.coeff(static_cast<Eigen::Index>(from), static_cast<Eigen::Index>(to));
  }
};

// Builds a generator from off-diagonal rates; the diagonal is filled with
// the negative row sum. Duplicate (row, col) entries are summed.
RateMatrix make_rate_matrix(std::size_t dim, const std::vector<Triplet>& off_diagonal);

// Builds a matrix verbatim from triplets (diagonal included). Used for
// imported generators and for exercising validate_generator.
RateMatrix rate_matrix_from_triplets(std::size_t dim, const std::vector<Triplet>& entries);

struct GeneratorDiagnostics {
  double max_row_sum_deviation = 0.0;
  double min_off_diagonal = 0.0;
  bool valid = true;
};

GeneratorDiagnostics validate_generator(const RateMatrix& q);

// Upwind drift plus central diffusion for dx = a dt + sigma dW on a
// periodic grid.
RateMatrix discretize_circle_diffusion(const CircleGrid& grid, double action, double sigma);

// One generator per action, optionally varying over time steps.
class ControlledGenerator {
 public:
  ControlledGenerator() = default;
  explicit ControlledGenerator(std::vector<RateMatrix> per_action);
  // per_step[k][a] governs the transition from t_k to t_{k+1}.
  explicit ControlledGenerator(std::vector<std::vector<RateMatrix>> per_step);

  std::size_t dim() const { return dim_; }
  std::size_t num_actions() const { return num_actions_; }
  bool time_dependent() const { return per_step_.size() > 1; }
  std::size_t num_steps() const { return per_step_.size(); }

  const RateMatrix& at(std::size_t step, std::size_t action) const;

 private:
  std::vector<std::vector<RateMatrix>> per_step_;
  std::size_t dim_ = 0;
  std::size_t num_actions_ = 0;
};

// Where e^{-alpha t} is sampled inside a time step [t_k, t_{k+1}].
enum class DiscountSampling { left, right };

// Cost table: rows are base states, columns are actions.
using CostTable = Eigen::MatrixXd;

// The base chain on X coupled with the running-cost coordinate y. Product
// states are indexed z = x * n_y + j.
class AugmentedGenerator {
 public:
  AugmentedGenerator(ControlledGenerator base, CostTable cost_rate, double discount,
                     UniformGrid y_grid);

  const ControlledGenerator& base() const { return base_; }
  const CostTable& cost_rate() const { return cost_rate_; }
  double discount() const { return discount_; }
  const UniformGrid& y_grid() const { return y_grid_; }

  std::size_t num_x() const { return base_.dim(); }
  std::size_t num_y() const { return y_grid_.n; }
  std::size_t dim() const { return num_x() * num_y(); }
  std::size_t num_actions() const { return base_.num_actions(); }
  std::size_t index(std::size_t x, std::size_t y) const { return x * num_y() + y; }

  // Product-space generator for one action at time t, using base step `step`.
  RateMatrix slice(std::size_t action, double t, std::size_t step = 0) const;

  // Per-step, per-action generators on the product space over a time grid.
  ControlledGenerator assemble(const UniformGrid& t_grid, DiscountSampling sampling) const;

 private:
  ControlledGenerator base_;
  CostTable cost_rate_;
  double discount_;
  UniformGrid y_grid_;
};

// All action slices of the augmented generator at time t.
std::vector<RateMatrix> augment_generator(const ControlledGenerator& base, const CostTable& cost_rate,
                                          double discount, const UniformGrid& y_grid, double t);

// Initial law nu x delta_0 on the product space.
Eigen::VectorXd augmented_initial(const Eigen::VectorXd& nu, std::size_t num_y);

}  // namespace riskflow
