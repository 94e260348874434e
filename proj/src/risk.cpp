#include "riskflow/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskflow/error.hpp"

namespace riskflow {

namespace {

void check_theta(double theta) {
  if (!(theta >= 0.0)) throw InvalidParameter("entropic risk requires theta >= 0");
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidParameter("semideviation requires beta in [0, 1]");
}

}  // namespace

std::string to_string(RiskKind kind) {
  switch (kind) {
    case RiskKind::expectation: return "expectation";
    case RiskKind::entropic: return "entropic";
    case RiskKind::entropic_linear: return "entropic_linear";
    case RiskKind::mean_semideviation: return "mean_semideviation";
  }
  return "unknown";
}

RiskKind risk_kind_from_string(const std::string& name) {
  if (name == "expectation") return RiskKind::expectation;
  if (name == "entropic") return RiskKind::entropic;
  if (name == "entropic_linear") return RiskKind::entropic_linear;
  if (name == "mean_semideviation") return RiskKind::mean_semideviation;
  throw InvalidParameter("unknown risk kind '" + name + "'");
}

void RiskSpec::validate() const {
  if (kind == RiskKind::entropic || kind == RiskKind::entropic_linear) check_theta(theta);
  if (kind == RiskKind::mean_semideviation) check_beta(beta);
}

double eval_expectation(const DiscreteDistribution& dist) {
  const auto& y = dist.values();
  const auto& m = dist.mass();
  return std::inner_product(y.begin(), y.end(), m.begin(), 0.0);
}

double eval_entropic_linear(const DiscreteDistribution& dist, double theta) {
  check_theta(theta);
  const auto& y = dist.values();
  const auto& m = dist.mass();
  double s = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) s += std::exp(theta * y[j]) * m[j];
  return s;
}

double eval_entropic(const DiscreteDistribution& dist, double theta) {
  check_theta(theta);
  if (theta == 0.0) return eval_expectation(dist);
  const auto& y = dist.values();
  const auto& m = dist.mass();
  // Shifted log-sum-exp over cells carrying mass.
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (m[j] > 0.0) top = std::max(top, y[j]);
  }
  if (std::isinf(top)) throw InvalidParameter("entropic risk of a distribution without positive mass");
  // log(sum m e^{theta (y - top)}) as log1p of an expm1 sum.
  double d = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) {
    d += std::expm1(theta * (y[j] - top)) * m[j];
    total += m[j];
  }
  return top + std::log1p(d + (total - 1.0)) / theta;
}

double eval_mean_semideviation(const DiscreteDistribution& dist, double beta) {
  check_beta(beta);
  const double mean = eval_expectation(dist);
  const auto& y = dist.values();
  const auto& m = dist.mass();
  double dev = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) dev += std::max(y[j] - mean, 0.0) * m[j];
  return mean + beta * dev;
}

double evaluate(const RiskSpec& spec, const DiscreteDistribution& dist) {
  spec.validate();
  switch (spec.kind) {
    case RiskKind::expectation: return eval_expectation(dist);
    case RiskKind::entropic: return eval_entropic(dist, spec.theta);
    case RiskKind::entropic_linear: return eval_entropic_linear(dist, spec.theta);
    case RiskKind::mean_semideviation: return eval_mean_semideviation(dist, spec.beta);
  }
  return 0.0;
}

std::vector<double> risk_gradient(const RiskSpec& spec, const DiscreteDistribution& dist) {
  spec.validate();
  const auto& y = dist.values();
  const auto& m = dist.mass();
  std::vector<double> g(y.size());
  switch (spec.kind) {
    case RiskKind::expectation:
      g = y;
      break;
    case RiskKind::entropic_linear:
      for (std::size_t j = 0; j < y.size(); ++j) g[j] = std::exp(spec.theta * y[j]);
      break;
    case RiskKind::entropic: {
      if (spec.theta == 0.0) {
        g = y;
        break;
      }
      const double z = eval_entropic_linear(dist, spec.theta);
      for (std::size_t j = 0; j < y.size(); ++j) g[j] = std::exp(spec.theta * y[j]) / (spec.theta * z);
      break;
    }
    case RiskKind::mean_semideviation: {
      // d/dm_i [mean + beta sum_j (y_j - mean)_+ m_j] with mean = sum_j y_j m_j.
      const double mean = eval_expectation(dist);
      double upper_mass = 0.0;
      for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] >= mean) upper_mass += m[j];
      }
      for (std::size_t i = 0; i < y.size(); ++i) {
        g[i] = y[i] + spec.beta * (std::max(y[i] - mean, 0.0) - upper_mass * y[i]);
      }
      break;
    }
  }
  return g;
}

DiscreteDistribution apply_terminal_cost(const DiscreteDistribution& joint, const std::vector<double>& v) {
  if (joint.axes().size() != 2) throw InvalidParameter("terminal cost needs a joint (x, y) distribution");
  const auto& xs = joint.axes()[0].values;
  const auto& ys = joint.axes()[1].values;
  if (!v.empty() && v.size() != xs.size()) throw InvalidCost("terminal cost table does not match the state grid");
  for (double vi : v) {
    if (!(vi >= 0.0)) throw InvalidCost("terminal cost must be non-negative");
  }
  std::vector<std::pair<double, double>> points;
  points.reserve(joint.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      points.emplace_back(ys[j] + (v.empty() ? 0.0 : v[i]), joint.mass()[i * ys.size() + j]);
    }
  }
  std::sort(points.begin(), points.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<double> values;
  std::vector<double> mass;
  for (const auto& [value, m] : points) {
    if (!values.empty() && std::abs(value - values.back()) <= 1e-12) {
      mass.back() += m;
    } else {
      values.push_back(value);
      mass.push_back(m);
    }
  }
  return DiscreteDistribution({Axis{"total_cost", std::move(values)}}, std::move(mass));
}

}  // namespace riskflow
