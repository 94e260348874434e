#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "riskflow/error.hpp"
#include "riskflow/lp.hpp"
#include "support.hpp"

using namespace riskflow;

namespace {

LpProblem dense_problem(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  return LpProblem{a.sparseView(), b, c};
}

// Minimum of c'x over the basic feasible solutions of Ax = b, x >= 0.
double vertex_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const auto m = static_cast<int>(a.rows());
  const auto n = static_cast<int>(a.cols());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(m));
  auto visit = [&](auto&& self, int start, int depth) -> void {
    if (depth == m) {
      Eigen::MatrixXd basis(m, m);
      for (int i = 0; i < m; ++i) basis.col(i) = a.col(pick[static_cast<std::size_t>(i)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
      if (lu.rank() < m) return;
      const Eigen::VectorXd xb = lu.solve(b);
      if (xb.minCoeff() < -1e-10) return;
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += c(pick[static_cast<std::size_t>(i)]) * xb(i);
      best = std::min(best, v);
      return;
    }
    for (int j = start; j < n; ++j) {
      pick[static_cast<std::size_t>(depth)] = j;
      self(self, j + 1, depth + 1);
    }
  };
  visit(visit, 0, 0);
  return best;
}

}  // namespace

TEST_CASE("single variable fixed by an equality") {
  Eigen::MatrixXd a(1, 1);
  a << 1.0;
  const auto sol = solve_lp(dense_problem(a, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1)));
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.x(0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.relative_gap <= 1e-9);
}

TEST_CASE("two variables under a budget") {
  Eigen::MatrixXd a(1, 3);
  a << 1.0, 1.0, 1.0;
  Eigen::VectorXd c(3);
  c << -1.0, -1.0, 0.0;
  const auto sol = solve_lp(dense_problem(a, Eigen::VectorXd::Ones(1), c));
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.primal_objective == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(vertex_oracle(a, Eigen::VectorXd::Ones(1), c) == doctest::Approx(-1.0));
}

TEST_CASE("contradictory equalities are infeasible") {
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 1.0;
  Eigen::VectorXd b(2);
  b << 1.0, 2.0;
  const auto sol = solve_lp(dense_problem(a, b, Eigen::VectorXd::Ones(1)));
  CHECK(sol.status == LpStatus::infeasible);
}

TEST_CASE("unbounded objective is detected") {
  Eigen::MatrixXd a(1, 2);
  a << 1.0, -1.0;
  Eigen::VectorXd c(2);
  c << -1.0, 0.0;
  const auto sol = solve_lp(dense_problem(a, Eigen::VectorXd::Zero(1), c));
  CHECK(sol.status == LpStatus::unbounded);
}

TEST_CASE("iteration limit is reported") {
  support::Rng rng(51);
  Eigen::MatrixXd a = Eigen::MatrixXd::Random(3, 8).cwiseAbs();
  LpOptions opt;
  opt.max_iter = 1;
  const auto sol = solve_lp(dense_problem(a, a * Eigen::VectorXd::Ones(8), Eigen::VectorXd::Ones(8)), opt);
  CHECK(sol.status == LpStatus::max_iter);
  CHECK(sol.iterations == 1);
}

TEST_CASE("malformed problems are rejected") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(solve_lp(dense_problem(a, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2))), InvalidParameter);
  Eigen::MatrixXd ok = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(solve_lp(dense_problem(ok, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2))), InvalidParameter);
}

TEST_CASE("property: random bounded LPs match vertex enumeration") {
  support::Rng rng(52);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int m = 1 + static_cast<int>(support::index_below(rng, 3));
    const int n = m + 1 + static_cast<int>(support::index_below(rng, 4));
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = support::uniform(rng, -1.0, 2.0);
    a.row(0) = a.row(0).cwiseAbs().array() + 0.1;
    Eigen::VectorXd x0(n);
    for (int j = 0; j < n; ++j) x0(j) = support::uniform(rng, 0.1, 1.0);
    const Eigen::VectorXd b = a * x0;
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c(j) = support::uniform(rng, -1.0, 1.0);
    const auto sol = solve_lp(dense_problem(a, b, c));
    REQUIRE(sol.status == LpStatus::optimal);
    const double oracle = vertex_oracle(a, b, c);
    REQUIRE(sol.primal_objective == doctest::Approx(oracle).epsilon(1e-7));
    REQUIRE(sol.x.minCoeff() >= -1e-12);
    REQUIRE((a * sol.x - b).norm() <= 1e-7 * (1.0 + b.norm()));
    ++solved;
  }
  CHECK(solved == 60);
}

TEST_CASE("property: optimal status implies small gap and residual") {
  support::Rng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(support::index_below(rng, 4));
    const int n = m + 2 + static_cast<int>(support::index_below(rng, 6));
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = support::uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd b = a * Eigen::VectorXd::Ones(n);
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c(j) = support::uniform(rng, -1.0, 1.0);
    LpOptions opt;
    opt.tol_gap = 1e-8;
    opt.tol_feas = 1e-8;
    const auto sol = solve_lp(dense_problem(a, b, c), opt);
    REQUIRE(sol.status == LpStatus::optimal);
    REQUIRE(sol.relative_gap <= opt.tol_gap);
    REQUIRE(sol.primal_residual <= opt.tol_feas);
  }
}

TEST_CASE("property: weak duality on nearly feasible iterates") {
  support::Rng rng(54);
  int checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int m = 2 + static_cast<int>(support::index_below(rng, 3));
    const int n = m + 3;
    Eigen::MatrixXd a(m, n);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = support::uniform(rng, 0.0, 1.0);
    const Eigen::VectorXd b = a * Eigen::VectorXd::Ones(n);
    Eigen::VectorXd c(n);
    for (int j = 0; j < n; ++j) c(j) = support::uniform(rng, -1.0, 1.0);
    const auto sol = solve_lp(dense_problem(a, b, c));
    for (const auto& it : sol.trace) {
      if (it.primal_residual > 1e-8 || it.dual_residual > 1e-8) continue;
      ++checked;
      REQUIRE(it.dual_objective <= it.primal_objective + 1e-8 * (1.0 + std::abs(it.primal_objective)));
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("solves are deterministic") {
  support::Rng rng(55);
  Eigen::MatrixXd a(3, 7);
  for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = support::uniform(rng, 0.0, 1.0);
  Eigen::VectorXd c(7);
  for (int j = 0; j < 7; ++j) c(j) = support::uniform(rng, -1.0, 1.0);
  const auto p = dense_problem(a, a * Eigen::VectorXd::Ones(7), c);
  const auto s1 = solve_lp(p);
  const auto s2 = solve_lp(p);
  CHECK(s1.x == s2.x);
  CHECK(s1.iterations == s2.iterations);
}
