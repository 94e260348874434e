#include "riskflow/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "riskflow/error.hpp"

namespace riskflow {

DiscreteDistribution::DiscreteDistribution(std::vector<Axis> axes, std::vector<double> mass)
    : axes_(std::move(axes)), mass_(std::move(mass)) {
  std::size_t expected = 1;
  for (const auto& a : axes_) expected *= a.values.size();
  if (axes_.empty() || expected != mass_.size()) {
    throw InvalidParameter("distribution mass does not match the product of its axes");
  }
}

DiscreteDistribution DiscreteDistribution::over_values(std::vector<double> values,
                                                       std::vector<double> mass) {
  return DiscreteDistribution({Axis{"value", std::move(values)}}, std::move(mass));
}

std::size_t DiscreteDistribution::axis_index(std::string_view name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    if (axes_[i].name == name) return i;
  }
  throw InvalidParameter("unknown axis '" + std::string(name) + "'");
}

double DiscreteDistribution::total() const {
  return std::accumulate(mass_.begin(), mass_.end(), 0.0);
}

double DiscreteDistribution::min_mass() const {
  return mass_.empty() ? 0.0 : *std::min_element(mass_.begin(), mass_.end());
}

bool DiscreteDistribution::is_probability(double sum_tol, double floor) const {
  return min_mass() >= floor && std::abs(total() - 1.0) <= sum_tol;
}

const std::vector<double>& DiscreteDistribution::values() const {
  if (axes_.size() != 1) throw InvalidParameter("distribution is not one-dimensional");
  return axes_.front().values;
}

DiscreteDistribution marginal(const DiscreteDistribution& dist, const std::vector<std::string>& keep) {
  const auto& axes = dist.axes();
  std::vector<bool> kept(axes.size(), false);
  for (const auto& name : keep) kept[dist.axis_index(name)] = true;

  std::vector<Axis> out_axes;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (kept[i]) out_axes.push_back(axes[i]);
  }
  if (out_axes.empty()) throw InvalidParameter("marginal needs at least one axis");

  std::size_t out_size = 1;
  for (const auto& a : out_axes) out_size *= a.values.size();
  std::vector<double> out(out_size, 0.0);

  // Walk the full index space with a mixed-radix counter.
  std::vector<std::size_t> idx(axes.size(), 0);
  for (double m : dist.mass()) {
    std::size_t flat = 0;
    for (std::size_t i = 0; i < axes.size(); ++i) {
      if (kept[i]) flat = flat * axes[i].values.size() + idx[i];
    }
    out[flat] += m;
    for (std::size_t i = axes.size(); i-- > 0;) {
      if (++idx[i] < axes[i].values.size()) break;
      idx[i] = 0;
    }
  }
  return DiscreteDistribution(std::move(out_axes), std::move(out));
}

}  // namespace riskflow
