#include <algorithm>
#include <cmath>

#include "riskflow/error.hpp"
#include "riskflow/lp.hpp"
#include "riskflow/validate.hpp"

namespace riskflow {

namespace {

struct Atom {
  double value;
  double p;
  double q;
};

// Merged, sorted support of two one-dimensional laws.
std::vector<Atom> merge_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  std::vector<Atom> atoms;
  const auto& pv = p.values();
  const auto& qv = q.values();
  atoms.reserve(pv.size() + qv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) atoms.push_back({pv[i], p.mass()[i], 0.0});
  for (std::size_t i = 0; i < qv.size(); ++i) atoms.push_back({qv[i], 0.0, q.mass()[i]});
  std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<Atom> merged;
  for (const auto& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value) {
      merged.back().p += a.p;
      merged.back().q += a.q;
    } else {
      merged.push_back(a);
    }
  }
  return merged;
}

}  // namespace

double wasserstein1(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto atoms = merge_support(p, q);
  double fp = 0.0;
  double fq = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
    fp += atoms[i].p;
    fq += atoms[i].q;
    w += std::abs(fp - fq) * (atoms[i + 1].value - atoms[i].value);
  }
  return w;
}

DiscreteDistribution empirical_distribution(std::vector<double> samples) {
  if (samples.empty()) throw InvalidParameter("empirical distribution of an empty sample");
  std::sort(samples.begin(), samples.end());
  std::vector<double> values;
  std::vector<double> mass;
  const double w = 1.0 / static_cast<double>(samples.size());
  for (double s : samples) {
    if (!values.empty() && values.back() == s) {
      mass.back() += w;
    } else {
      values.push_back(s);
      mass.push_back(w);
    }
  }
  return DiscreteDistribution::over_values(std::move(values), std::move(mass));
}

double bounded_lipschitz_distance(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto atoms = merge_support(p, q);
  const std::size_t n = atoms.size();
  if (n == 1) return 0.0;

  // f_i = g_i - s with 0 <= g_i <= 2s keeps the feasible set bounded.
  // Columns: g (n), s, l, one slack per row.
  // Rows: g_i - 2s + t = 0, +-(g_{i+1} - g_i) - l |dy_i| + t = 0, s + l + t = 1.
  const std::size_t s_col = n;
  const std::size_t l_col = n + 1;
  const std::size_t rows = n + 2 * (n - 1) + 1;
  const std::size_t slack0 = n + 2;
  const std::size_t cols = slack0 + rows;

  std::vector<Eigen::Triplet<double>> entries;
  std::size_t r = 0;
  for (std::size_t i = 0; i < n; ++i, ++r) {
    entries.emplace_back(static_cast<int>(r), static_cast<int>(i), 1.0);
    entries.emplace_back(static_cast<int>(r), static_cast<int>(s_col), -2.0);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double gap = atoms[i + 1].value - atoms[i].value;
    for (double sign : {1.0, -1.0}) {
      entries.emplace_back(static_cast<int>(r), static_cast<int>(i + 1), sign);
      entries.emplace_back(static_cast<int>(r), static_cast<int>(i), -sign);
      entries.emplace_back(static_cast<int>(r), static_cast<int>(l_col), -gap);
      ++r;
    }
  }
  entries.emplace_back(static_cast<int>(r), static_cast<int>(s_col), 1.0);
  entries.emplace_back(static_cast<int>(r), static_cast<int>(l_col), 1.0);
  for (std::size_t i = 0; i < rows; ++i) {
    entries.emplace_back(static_cast<int>(i), static_cast<int>(slack0 + i), 1.0);
  }

  LpProblem lp;
  lp.a.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  lp.a.setFromTriplets(entries.begin(), entries.end());
  lp.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));
  lp.b(static_cast<Eigen::Index>(rows - 1)) = 1.0;
  lp.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  double total_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = atoms[i].p - atoms[i].q;
    lp.c(static_cast<Eigen::Index>(i)) = -d;
    total_diff += d;
  }
  lp.c(static_cast<Eigen::Index>(s_col)) = total_diff;
  LpOptions opts;
  opts.tol_gap = 1e-12;
  opts.tol_feas = 1e-12;
  const auto sol = solve_lp(lp, opts);
  return std::max(0.0, -sol.primal_objective);
}

}  // namespace riskflow
