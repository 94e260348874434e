#include "riskflow/grids.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "riskflow/error.hpp"

namespace riskflow {

double CircleGrid::distance(double a, double b) {
  return std::sqrt(std::max(0.0, 1.0 - std::cos(a - b)));
}

std::size_t UniformGrid::nearest(double v) const {
  const double r = std::round((v - lo) / spacing);
  if (!(r > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(r), n - 1);
}

CircleGrid build_circle_grid(std::size_t n) {
  if (n < 3) {
    throw InvalidGrid("circle grid needs at least 3 points, got " + std::to_string(n));
  }
  CircleGrid g;
  g.n = n;
  g.spacing = 2.0 * std::numbers::pi / static_cast<double>(n);
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.points[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
  }
  return g;
}

UniformGrid build_uniform_grid(double lo, double hi, std::size_t n) {
  if (!(lo < hi)) throw InvalidGrid("uniform grid requires lo < hi");
  if (n < 2) throw InvalidGrid("uniform grid needs at least 2 points, got " + std::to_string(n));
  UniformGrid g;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  g.spacing = (hi - lo) / static_cast<double>(n - 1);
  g.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    g.points[i] = lo + g.spacing * static_cast<double>(i);
  }
  g.points.back() = hi;
  return g;
}

}  // namespace riskflow
