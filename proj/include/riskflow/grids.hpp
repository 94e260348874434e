#pragma once

#include <cstddef>
#include <vector>

namespace riskflow {

// Periodic grid on the circle [0, 2pi): points 2*pi*i/n.
struct CircleGrid {
  std::size_t n = 0;
  double spacing = 0.0;
  std::vector<double> points;

  // Neighbor index with periodic wrap; offset may be negative.
  std::size_t wrap(std::ptrdiff_t i) const {
    const auto m = static_cast<std::ptrdiff_t>(n);
    return static_cast<std::size_t>(((i % m) + m) % m);
  }

  // Chordal metric d(a,b) = sqrt(1 - cos(a - b)).
  static double distance(double a, double b);
};

// Equispaced grid on [lo, hi], endpoints included.
struct UniformGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;
  double spacing = 0.0;
  std::vector<double> points;

  // Index of the grid point nearest to v, clamped to [0, n-1].
  std::size_t nearest(double v) const;
};

CircleGrid build_circle_grid(std::size_t n);
UniformGrid build_uniform_grid(double lo, double hi, std::size_t n);

}  // namespace riskflow
