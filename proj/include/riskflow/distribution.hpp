#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace riskflow {

struct Axis {
  std::string name;
  std::vector<double> values;
};

// Mass over the product of labelled axes, stored row-major (last axis
// varies fastest).
class DiscreteDistribution {
 public:
  DiscreteDistribution() = default;
  DiscreteDistribution(std::vector<Axis> axes, std::vector<double> mass);

  // Single real-valued axis named "value".
  static DiscreteDistribution over_values(std::vector<double> values, std::vector<double> mass);

  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }

  std::size_t axis_index(std::string_view name) const;
  double total() const;
  double min_mass() const;

  // Masses >= -1e-12 and total within 1e-10 of one.
  bool is_probability(double sum_tol = 1e-10, double floor = -1e-12) const;

  // The axis values of a one-dimensional distribution.
  const std::vector<double>& values() const;

 private:
  std::vector<Axis> axes_;
  std::vector<double> mass_;
};

// Sums out every axis not named in `keep`. Kept axes retain their original
// relative order.
DiscreteDistribution marginal(const DiscreteDistribution& dist, const std::vector<std::string>& keep);

struct TrajectoryDistribution {
  std::vector<double> times;
  std::vector<DiscreteDistribution> slices;
};

}  // namespace riskflow
