#include "henon/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "henon/error.hpp"

namespace henon {

std::vector<double> graded_mesh(int num_points, double scale) {
  if (num_points < 3) throw Error(ErrorCode::invalid_argument, "mesh needs at least 3 points");
  if (!(scale > 0.0)) throw Error(ErrorCode::invalid_argument, "mesh scale must be positive");
  const double eps = std::min(scale, 0.5);
  const double log_norm = std::log1p(1.0 / eps);
  auto F = [&](double r) {
    return 0.5 * (2.0 / std::numbers::pi) * std::asin(r) + 0.5 * std::log1p(r / eps) / log_norm;
  };
  std::vector<double> mesh(num_points);
  mesh.front() = 0.0;
  mesh.back() = 1.0;
  for (int i = 1; i + 1 < num_points; ++i) {
    const double s = static_cast<double>(i) / (num_points - 1);
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (F(mid) < s ? lo : hi) = mid;
    }
    mesh[i] = 0.5 * (lo + hi);
  }
  return mesh;
}

std::vector<double> refine_mesh(std::span<const double> mesh) {
  std::vector<double> out;
  out.reserve(2 * mesh.size() - 1);
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (i > 0) out.push_back(0.5 * (mesh[i - 1] + mesh[i]));
    out.push_back(mesh[i]);
  }
  return out;
}

GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      if (n == 1) p0 = 1.0, p1 = x;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw Error(ErrorCode::interpolation_failure, "interp_linear: bad table");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - xs.begin());
  const double t = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return (1.0 - t) * ys[j - 1] + t * ys[j];
}

}  // namespace henon
