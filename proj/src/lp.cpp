#include "riskflow/lp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include <Eigen/SparseCholesky>

#include "riskflow/error.hpp"

namespace riskflow {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

// A D A' on a fixed lower-triangular pattern. Every column j of A
// contributes a_ij a_kj d_j to entry (i, k).
class NormalMatrix {
 public:
  explicit NormalMatrix(const SpMat& a) {
    const auto m = a.rows();
    std::vector<Eigen::Triplet<double>> pattern;
    for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
      for (SpMat::InnerIterator it(a, j); it; ++it) {
        for (SpMat::InnerIterator jt(a, j); jt; ++jt) {
          if (jt.row() >= it.row()) pattern.emplace_back(static_cast<int>(jt.row()), static_cast<int>(it.row()), 1.0);
        }
      }
    }
    for (Eigen::Index i = 0; i < m; ++i) pattern.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
    matrix_.resize(m, m);
    matrix_.setFromTriplets(pattern.begin(), pattern.end());
    matrix_.makeCompressed();

    for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
      for (SpMat::InnerIterator it(a, j); it; ++it) {
        for (SpMat::InnerIterator jt(a, j); jt; ++jt) {
          if (jt.row() < it.row()) continue;
          terms_.push_back({slot(jt.row(), it.row()), static_cast<int>(j), it.value() * jt.value()});
        }
      }
    }
    std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) {
      return x.slot != y.slot ? x.slot < y.slot : x.column < y.column;
    });
    diag_slots_.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) diag_slots_[static_cast<std::size_t>(i)] = slot(i, i);
  }

  const SpMat& update(const Vec& d, double regularization) {
    double* values = matrix_.valuePtr();
    std::fill(values, values + matrix_.nonZeros(), 0.0);
    for (const auto& t : terms_) values[t.slot] += t.product * d(t.column);
    for (auto s : diag_slots_) values[s] += regularization;
    return matrix_;
  }

  double max_diagonal() const {
    double top = 0.0;
    for (auto s : diag_slots_) top = std::max(top, matrix_.valuePtr()[s]);
    return top;
  }

  const SpMat& matrix() const { return matrix_; }

 private:
  struct Term {
    Eigen::Index slot;
    int column;
    double product;
  };

  Eigen::Index slot(Eigen::Index row, Eigen::Index col) const {
    const auto* begin = matrix_.innerIndexPtr() + matrix_.outerIndexPtr()[col];
    const auto* end = matrix_.innerIndexPtr() + matrix_.outerIndexPtr()[col + 1];
    const auto* hit = std::lower_bound(begin, end, static_cast<int>(row));
    return static_cast<Eigen::Index>(hit - matrix_.innerIndexPtr());
  }

  SpMat matrix_;
  std::vector<Term> terms_;
  std::vector<Eigen::Index> diag_slots_;
};

struct Direction {
  Vec dx, dy, ds;
  double dtau = 0.0;
  double dkappa = 0.0;
};

// Largest step in (0, 1] keeping v + alpha dv >= 0.
double max_step(const Vec& v, const Vec& dv) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
  }
  return alpha;
}

double max_step(double v, double dv) { return dv < 0.0 ? std::min(1.0, -v / dv) : 1.0; }

}  // namespace

void LpProblem::check() const {
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw InvalidParameter("LP dimensions are inconsistent");
  }
  Eigen::VectorXi row_count = Eigen::VectorXi::Zero(a.rows());
  for (Eigen::Index j = 0; j < a.outerSize(); ++j) {
    for (SpMat::InnerIterator it(a, j); it; ++it) {
      if (it.value() != 0.0) ++row_count(it.row());
    }
  }
  if (a.rows() > 0 && row_count.minCoeff() == 0) throw InvalidParameter("LP has an empty constraint row");
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.check();
  const SpMat& a = problem.a;
  const SpMat at = a.transpose();
  const Vec& b = problem.b;
  const Vec& c = problem.c;
  const auto n = a.cols();
  const auto m = a.rows();
  const double b_norm = inf_norm(b);
  const double c_norm = inf_norm(c);

  Vec x = Vec::Ones(n);
  Vec s = Vec::Ones(n);
  Vec y = Vec::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;

  NormalMatrix normal(a);
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
  ldlt.analyzePattern(normal.matrix());

  LpSolution sol;
  Vec best_x = x / tau;
  Vec best_y = y / tau;
  Vec best_s = s / tau;

  auto finish = [&](LpStatus status, int iterations) {
    sol.status = status;
    sol.iterations = iterations;
    if (status == LpStatus::optimal || status == LpStatus::max_iter) {
      sol.x = x / tau;
      sol.y = y / tau;
      sol.s = s / tau;
    } else {
      // Certificates are returned unscaled.
      sol.x = x;
      sol.y = y;
      sol.s = s;
    }
    return sol;
  };

  for (int iter = 0;; ++iter) {
    const Vec rp = b * tau - a * x;
    const Vec rd = c * tau - at * y - s;
    const double ctx = c.dot(x);
    const double bty = b.dot(y);
    const double rg = kappa + ctx - bty;
    const double mu = (x.dot(s) + tau * kappa) / static_cast<double>(n + 1);

    sol.primal_objective = ctx / tau;
    sol.dual_objective = bty / tau;
    sol.primal_residual = inf_norm(rp) / tau / (1.0 + b_norm);
    sol.dual_residual = inf_norm(rd) / tau / (1.0 + c_norm);
    sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                       (1.0 + std::abs(sol.primal_objective));
    sol.trace.push_back({sol.primal_objective, sol.dual_objective, sol.primal_residual,
                         sol.dual_residual, x.dot(s) / (tau * tau)});

    if (options.log) {
      *options.log << std::setw(4) << iter << std::scientific << std::setprecision(6)
                   << "  pobj " << sol.primal_objective << "  dobj " << sol.dual_objective
                   << "  pres " << sol.primal_residual << "  dres " << sol.dual_residual
                   << "  gap " << sol.relative_gap << "  tau " << tau << "  kappa " << kappa << '\n';
    }

    if (sol.primal_residual <= options.tol_feas && sol.dual_residual <= options.tol_feas &&
        sol.relative_gap <= options.tol_gap) {
      return finish(LpStatus::optimal, iter);
    }
    // Infeasibility certificates once tau has collapsed relative to kappa.
    if (tau <= 1e-6 * std::max(1.0, kappa)) {
      const Vec aty_s = at * y + s;
      if (bty > 0.0 && inf_norm(aty_s) <= 1e-6 * bty) return finish(LpStatus::infeasible, iter);
      const Vec ax = a * x;
      if (ctx < 0.0 && inf_norm(ax) <= 1e-6 * -ctx) return finish(LpStatus::unbounded, iter);
    }
    if (iter >= options.max_iter) {
      x = best_x * tau;
      y = best_y * tau;
      s = best_s * tau;
      return finish(LpStatus::max_iter, iter);
    }
    best_x = x / tau;
    best_y = y / tau;
    best_s = s / tau;

    const Vec d = x.cwiseQuotient(s);
    normal.update(d, 0.0);
    const double regularization = 1e-14 * std::max(1.0, normal.max_diagonal());
    ldlt.factorize(normal.update(d, regularization));
    if (ldlt.info() != Eigen::Success) {
      x = best_x * tau;
      y = best_y * tau;
      s = best_s * tau;
      return finish(LpStatus::max_iter, iter);
    }

    // Solve with the factorization plus refinement against the exact
    // normal matrix A D A'.
    auto normal_solve = [&](const Vec& rhs) {
      Vec sol_v = ldlt.solve(rhs);
      for (int pass = 0; pass < 2; ++pass) {
        const Vec resid = rhs - a * d.cwiseProduct(at * sol_v);
        sol_v += ldlt.solve(resid);
      }
      return sol_v;
    };

    const Vec q = normal_solve(a * d.cwiseProduct(c) + b);
    const Vec v = d.cwiseProduct(at * q - c);
    const double denom = c.dot(v) - b.dot(q) - kappa / tau;

    auto solve_direction = [&](double eta, const Vec& r_xs, double r_tk) {
      Direction dir;
      const Vec r_xs_x = r_xs.cwiseQuotient(x);
      const Vec p = normal_solve(eta * rp + a * d.cwiseProduct(eta * rd - r_xs_x));
      const Vec u = d.cwiseProduct(at * p - eta * rd + r_xs_x);
      dir.dtau = (-eta * rg - c.dot(u) + b.dot(p) - r_tk / tau) / denom;
      dir.dy = p + q * dir.dtau;
      dir.dx = u + v * dir.dtau;
      dir.ds = (r_xs - s.cwiseProduct(dir.dx)).cwiseQuotient(x);
      dir.dkappa = (r_tk - kappa * dir.dtau) / tau;
      return dir;
    };

    auto step_length = [&](const Direction& dir) {
      return std::min({max_step(x, dir.dx), max_step(s, dir.ds), max_step(tau, dir.dtau),
                       max_step(kappa, dir.dkappa)});
    };

    // Predictor: pure Newton step toward the solution set.
    const Vec xs = x.cwiseProduct(s);
    const Direction aff = solve_direction(1.0, -xs, -tau * kappa);
    const double alpha_aff = step_length(aff);
    const double mu_aff = ((x + alpha_aff * aff.dx).dot(s + alpha_aff * aff.ds) +
                           (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa)) /
                          static_cast<double>(n + 1);
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector with centering and second-order terms.
    const Vec r_xs = Vec::Constant(n, sigma * mu) - xs - aff.dx.cwiseProduct(aff.ds);
    const double r_tk = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const Direction dir = solve_direction(1.0 - sigma, r_xs, r_tk);
    const double alpha = std::min(1.0, 0.995 * step_length(dir));

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    s += alpha * dir.ds;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;

    if (!x.allFinite() || !y.allFinite() || !s.allFinite() || !std::isfinite(tau) ||
        !std::isfinite(kappa)) {
      x = best_x;
      y = best_y;
      s = best_s;
      tau = 1.0;
      return finish(LpStatus::max_iter, iter + 1);
    }
  }
}

}  // namespace riskflow
