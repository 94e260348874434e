#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace riskflow {

// minimize c'x subject to A x = b, x >= 0.
struct LpProblem {
  Eigen::SparseMatrix<double> a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  void check() const;
};

enum class LpStatus { optimal, infeasible, unbounded, max_iter };
std::string to_string(LpStatus status);

struct LpOptions {
  double tol_gap = 1e-9;   // relative duality gap
  double tol_feas = 1e-9;  // scaled primal and dual residuals
  int max_iter = 200;
  std::ostream* log = nullptr;
};

struct LpIterate {
  double primal_objective;
  double dual_objective;
  double primal_residual;
  double dual_residual;
  double complementarity;  // x's / tau^2
};

struct LpSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double relative_gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  LpStatus status = LpStatus::max_iter;
  std::vector<LpIterate> trace;
};

// Homogeneous self-dual primal-dual interior point method with Mehrotra
// predictor-corrector steps. Deterministic for identical inputs.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace riskflow
