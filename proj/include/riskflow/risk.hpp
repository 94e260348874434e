#pragma once

#include <string>
#include <vector>

#include "riskflow/distribution.hpp"

namespace riskflow {

enum class RiskKind { expectation, entropic, entropic_linear, mean_semideviation };

std::string to_string(RiskKind kind);
RiskKind risk_kind_from_string(const std::string& name);

struct RiskSpec {
  RiskKind kind = RiskKind::entropic;
  double theta = 1.0;  // entropic kinds, >= 0
  double beta = 0.0;   // mean_semideviation, in [0, 1]

  void validate() const;
  bool operator==(const RiskSpec&) const = default;
  // True when the objective is linear in the cost distribution.
  bool is_linear() const { return kind != RiskKind::mean_semideviation; }
};

// All evaluators take a one-dimensional distribution over cost values.
double eval_expectation(const DiscreteDistribution& dist);

// (1/theta) ln sum e^{theta y} m; theta == 0 gives the expectation.
double eval_entropic(const DiscreteDistribution& dist, double theta);

// sum e^{theta y} m.
double eval_entropic_linear(const DiscreteDistribution& dist, double theta);

// mean + beta * sum (y - mean)_+ m.
double eval_mean_semideviation(const DiscreteDistribution& dist, double beta);

double evaluate(const RiskSpec& spec, const DiscreteDistribution& dist);

// Partial derivatives with respect to each mass entry. At kinks of the
// semideviation the right derivative is used.
std::vector<double> risk_gradient(const RiskSpec& spec, const DiscreteDistribution& dist);

// Pushforward of a joint (x, y) law under (x, y) -> y + v(x). Equal totals
// (within 1e-12) are merged; values are sorted ascending.
DiscreteDistribution apply_terminal_cost(const DiscreteDistribution& joint, const std::vector<double>& v);

}  // namespace riskflow
