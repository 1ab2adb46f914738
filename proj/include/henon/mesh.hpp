#pragma once

#include <span>
#include <utility>
#include <vector>

namespace henon {

/// Radii 0 = r_0 < r_1 < ... < r_{n-1} = 1.
///
/// Half of the points are spread logarithmically with respect to the
/// concentration length `scale` (so that a solution varying on [0, scale]
/// stays resolved), the other half follow r = sin(πs/2), which clusters
/// towards r = 1.
std::vector<double> graded_mesh(int num_points, double scale);

/// Inserts the midpoint of every cell; the result has 2n−1 points and contains
/// the input as its even-indexed subsequence.
std::vector<double> refine_mesh(std::span<const double> mesh);

/// Gauss–Legendre rule on [−1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

/// Piecewise-linear interpolation of (xs, ys) at x (clamped to the ends).
double interp_linear(std::span<const double> xs, std::span<const double> ys, double x);

}  // namespace henon
