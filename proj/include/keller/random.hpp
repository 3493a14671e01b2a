#ifndef KELLER_RANDOM_HPP
#define KELLER_RANDOM_HPP

// Seeded smooth random samples: moving averages of standard normals.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "keller/grid.hpp"

namespace keller::random {

using Rng = std::mt19937_64;

/// Moving average (window `width`) of iid standard normals, length n.
inline std::vector<double> smoothed_noise(Rng &rng, std::size_t n, std::size_t width) {
  if (width == 0)
    width = 1;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> raw(n + width - 1);
  for (double &x : raw)
    x = normal(rng);
  std::vector<double> out(n);
  double s = 0.0;
  for (std::size_t i = 0; i < width; ++i)
    s += raw[i];
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = s / std::sqrt(double(width));
    if (i + width < raw.size())
      s += raw[i + width] - raw[i];
  }
  return out;
}

/// Smooth taper equal to 1 for |x| <= inner and 0 for |x| >= outer.
inline double taper(double x, double inner, double outer) {
  const double a = std::abs(x);
  if (a <= inner)
    return 1.0;
  if (a >= outer)
    return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (a - inner) / (outer - inner));
  return c * c;
}

/// Smoothed noise on a grid, vanishing over the outer part of the domain so
/// that it does not feel the Dirichlet wall.
inline GridFunction smooth_field(Rng &rng, const GridPtr &grid, double correlation_length,
                                 double inner_fraction = 0.5, double outer_fraction = 0.8) {
  const auto width = std::size_t(std::max(1.0, correlation_length / grid->spacing()));
  auto v = smoothed_noise(rng, grid->size(), width);
  const double L = grid->extent();
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] *= taper(grid->coord(i), inner_fraction * L, outer_fraction * L);
  return GridFunction(grid, std::move(v));
}

} // namespace keller::random

#endif // KELLER_RANDOM_HPP
