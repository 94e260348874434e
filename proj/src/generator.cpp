#include "riskflow/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskflow/error.hpp"

namespace riskflow {

RateMatrix make_rate_matrix(std::size_t dim, const std::vector<Triplet>& off_diagonal) {
  std::vector<Triplet> entries;
  entries.reserve(off_diagonal.size() + dim);
  std::vector<double> row_sum(dim, 0.0);
  for (const auto& t : off_diagonal) {
    if (t.row() == t.col()) continue;
    if (static_cast<std::size_t>(t.row()) >= dim || static_cast<std::size_t>(t.col()) >= dim) {
      throw AssemblyError("rate entry outside a " + std::to_string(dim) + "-state generator");
    }
    if (t.value() == 0.0) continue;
    entries.push_back(t);
    row_sum[static_cast<std::size_t>(t.row())] += t.value();
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (row_sum[i] != 0.0) {
      entries.emplace_back(static_cast<int>(i), static_cast<int>(i), -row_sum[i]);
    }
  }
  return rate_matrix_from_triplets(dim, entries);
}

RateMatrix rate_matrix_from_triplets(std::size_t dim, const std::vector<Triplet>& entries) {
  RateMatrix m;
  const auto n = static_cast<Eigen::Index>(dim);
  m.q.resize(n, n);
  m.q.setFromTriplets(entries.begin(), entries.end());
  m.q.makeCompressed();
  return m;
}

GeneratorDiagnostics validate_generator(const RateMatrix& q) {
  GeneratorDiagnostics d;
  double min_off = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < q.q.outerSize(); ++i) {
    double sum = 0.0;
    for (SparseRowMatrix::InnerIterator it(q.q, i); it; ++it) {
      sum += it.value();
      if (it.col() != i) min_off = std::min(min_off, it.value());
    }
    d.max_row_sum_deviation = std::max(d.max_row_sum_deviation, std::abs(sum));
  }
  d.min_off_diagonal = std::isinf(min_off) ? 0.0 : min_off;
  d.valid = d.max_row_sum_deviation <= 1e-10 && d.min_off_diagonal >= -1e-12;
  return d;
}

RateMatrix discretize_circle_diffusion(const CircleGrid& grid, double action, double sigma) {
  if (!(sigma > 0.0)) throw InvalidParameter("diffusion coefficient sigma must be positive");
  const double h = grid.spacing;
  const double diffusion = sigma * sigma / (2.0 * h * h);
  const double right = diffusion + std::max(action, 0.0) / h;
  const double left = diffusion + std::max(-action, 0.0) / h;
  std::vector<Triplet> off;
  off.reserve(2 * grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const auto r = static_cast<std::ptrdiff_t>(i);
    off.emplace_back(static_cast<int>(i), static_cast<int>(grid.wrap(r + 1)), right);
    off.emplace_back(static_cast<int>(i), static_cast<int>(grid.wrap(r - 1)), left);
  }
  return make_rate_matrix(grid.n, off);
}

ControlledGenerator::ControlledGenerator(std::vector<RateMatrix> per_action)
    : ControlledGenerator(std::vector<std::vector<RateMatrix>>{std::move(per_action)}) {}

ControlledGenerator::ControlledGenerator(std::vector<std::vector<RateMatrix>> per_step)
    : per_step_(std::move(per_step)) {
  if (per_step_.empty() || per_step_.front().empty()) {
    throw AssemblyError("controlled generator needs at least one action");
  }
  num_actions_ = per_step_.front().size();
  dim_ = per_step_.front().front().dim();
  for (const auto& step : per_step_) {
    if (step.size() != num_actions_) {
      throw AssemblyError("every time step must provide one generator per action");
    }
    for (const auto& q : step) {
      if (q.dim() != dim_) throw AssemblyError("per-action generators must share a dimension");
    }
  }
}

const RateMatrix& ControlledGenerator::at(std::size_t step, std::size_t action) const {
  const auto& s = per_step_.size() == 1 ? per_step_.front() : per_step_.at(step);
  return s.at(action);
}

AugmentedGenerator::AugmentedGenerator(ControlledGenerator base, CostTable cost_rate,
                                       double discount, UniformGrid y_grid)
    : base_(std::move(base)),
      cost_rate_(std::move(cost_rate)),
      discount_(discount),
      y_grid_(std::move(y_grid)) {
  if (static_cast<std::size_t>(cost_rate_.rows()) != base_.dim() ||
      static_cast<std::size_t>(cost_rate_.cols()) != base_.num_actions()) {
    throw AssemblyError("cost table must be (states x actions) of the base generator");
  }
  if ((cost_rate_.array() < 0.0).any() || !cost_rate_.allFinite()) {
    throw InvalidCost("cost rate must be finite and non-negative");
  }
  if (!(discount_ >= 0.0)) throw InvalidParameter("discount rate must be non-negative");
}

RateMatrix AugmentedGenerator::slice(std::size_t action, double t, std::size_t step) const {
  const RateMatrix& g = base_.at(step, action);
  const std::size_t ny = num_y();
  const double transport_scale = std::exp(-discount_ * t) / y_grid_.spacing;
  std::vector<Triplet> off;
  off.reserve(static_cast<std::size_t>(g.q.nonZeros()) * ny + dim());
  for (Eigen::Index x = 0; x < g.q.outerSize(); ++x) {
    for (SparseRowMatrix::InnerIterator it(g.q, x); it; ++it) {
      if (it.col() == x) continue;
      for (std::size_t j = 0; j < ny; ++j) {
        off.emplace_back(static_cast<int>(index(static_cast<std::size_t>(x), j)),
                         static_cast<int>(index(static_cast<std::size_t>(it.col()), j)), it.value());
      }
    }
    const double transport = cost_rate_(x, static_cast<Eigen::Index>(action)) * transport_scale;
    if (transport == 0.0) continue;
    // The top cell absorbs: no outflow past y_max.
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      off.emplace_back(static_cast<int>(index(static_cast<std::size_t>(x), j)),
                       static_cast<int>(index(static_cast<std::size_t>(x), j + 1)), transport);
    }
  }
  return make_rate_matrix(dim(), off);
}

ControlledGenerator AugmentedGenerator::assemble(const UniformGrid& t_grid,
                                                 DiscountSampling sampling) const {
  const std::size_t steps = t_grid.n - 1;
  std::vector<std::vector<RateMatrix>> per_step(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = sampling == DiscountSampling::left ? t_grid.points[k] : t_grid.points[k + 1];
    per_step[k].reserve(num_actions());
    for (std::size_t a = 0; a < num_actions(); ++a) {
      per_step[k].push_back(slice(a, t, k));
    }
  }
  return ControlledGenerator(std::move(per_step));
}

std::vector<RateMatrix> augment_generator(const ControlledGenerator& base, const CostTable& cost_rate,
                                          double discount, const UniformGrid& y_grid, double t) {
  AugmentedGenerator aug(base, cost_rate, discount, y_grid);
  std::vector<RateMatrix> out;
  out.reserve(aug.num_actions());
  for (std::size_t a = 0; a < aug.num_actions(); ++a) out.push_back(aug.slice(a, t));
  return out;
}

Eigen::VectorXd augmented_initial(const Eigen::VectorXd& nu, std::size_t num_y) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(nu.size() * static_cast<Eigen::Index>(num_y));
  for (Eigen::Index x = 0; x < nu.size(); ++x) {
    v(x * static_cast<Eigen::Index>(num_y)) = nu(x);
  }
  return v;
}

}  // namespace riskflow
