#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "riskflow/forward.hpp"
#include "riskflow/generator.hpp"
#include "riskflow/grids.hpp"
#include "riskflow/optimize.hpp"
#include "riskflow/policy.hpp"

namespace support {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t index_below(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline std::vector<double> random_simplex(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (auto& v : p) {
    v = -std::log(uniform(rng, 1e-12, 1.0));
    total += v;
  }
  for (auto& v : p) v /= total;
  return p;
}

// Off-diagonal rates drawn at the given density; the diagonal is implied.
inline riskflow::RateMatrix random_generator(Rng& rng, std::size_t n, double density = 0.6, double max_rate = 5.0) {
  std::vector<riskflow::Triplet> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && uniform(rng, 0.0, 1.0) < density) {
        t.emplace_back(static_cast<int>(i), static_cast<int>(j), uniform(rng, 0.0, max_rate));
      }
    }
  }
  return riskflow::make_rate_matrix(n, t);
}

inline riskflow::MarkovPolicy random_policy(Rng& rng, std::size_t nt, std::size_t nz, std::size_t na) {
  riskflow::MarkovPolicy p(nt, nz, na);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t z = 0; z < nz; ++z) {
      const auto cell = random_simplex(rng, na);
      p.set_cell(k, z, cell);
    }
  }
  return p;
}

inline std::vector<double> iota_values(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
  return v;
}

// A small problem on an arbitrary base chain with state-action costs.
struct Tiny {
  riskflow::ControlledGenerator base;
  riskflow::CostTable cost;
  double alpha = 0.0;
  riskflow::UniformGrid y_grid;
  riskflow::UniformGrid t_grid;
  riskflow::ControlledGenerator product;
  Eigen::VectorXd nu;
  Eigen::VectorXd initial;
  riskflow::StateLayout layout;
  riskflow::ForwardProgram fp;
};

inline Tiny make_tiny(riskflow::ControlledGenerator base, riskflow::CostTable cost, double alpha,
                      std::size_t ny, double y_max, std::size_t nt, double horizon,
                      std::vector<double> terminal_cost = {}) {
  Tiny t;
  t.base = std::move(base);
  t.cost = std::move(cost);
  t.alpha = alpha;
  t.y_grid = riskflow::build_uniform_grid(0.0, y_max, ny);
  t.t_grid = riskflow::build_uniform_grid(0.0, horizon, nt);
  riskflow::AugmentedGenerator aug(t.base, t.cost, alpha, t.y_grid);
  t.product = aug.assemble(t.t_grid, riskflow::DiscountSampling::left);
  t.nu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(t.base.dim()));
  t.nu(0) = 1.0;
  t.initial = riskflow::augmented_initial(t.nu, ny);
  t.layout = riskflow::StateLayout{iota_values(t.base.dim()), t.y_grid.points, iota_values(t.base.num_actions()),
                                   t.t_grid.points, std::move(terminal_cost)};
  t.fp = riskflow::assemble_forward_program(t.product, t.initial, t.t_grid);
  return t;
}

// Random base chain and nonnegative costs on nx states and na actions.
inline Tiny random_tiny(Rng& rng, std::size_t nx, std::size_t ny, std::size_t na, std::size_t nt) {
  std::vector<riskflow::RateMatrix> mats;
  for (std::size_t a = 0; a < na; ++a) mats.push_back(random_generator(rng, nx, 1.0, 2.0));
  riskflow::CostTable cost(static_cast<Eigen::Index>(nx), static_cast<Eigen::Index>(na));
  for (Eigen::Index i = 0; i < cost.rows(); ++i) {
    for (Eigen::Index a = 0; a < cost.cols(); ++a) cost(i, a) = uniform(rng, 0.0, 2.0);
  }
  return make_tiny(riskflow::ControlledGenerator(std::move(mats)), std::move(cost), uniform(rng, 0.0, 0.5), ny,
                   2.0, nt, uniform(rng, 0.5, 2.0));
}

}  // namespace support
