#include "henon/pencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "henon/error.hpp"

namespace henon {

TridiagonalPencil::TridiagonalPencil(std::vector<double> diag, std::vector<double> off,
                                     std::vector<double> mass)
    : diag_(std::move(diag)), off_(std::move(off)), mass_(std::move(mass)) {
  if (diag_.empty() || off_.size() + 1 != diag_.size() || mass_.size() != diag_.size())
    throw Error(ErrorCode::invalid_argument, "inconsistent pencil dimensions");
  for (double m : mass_)
    if (!(m > 0.0)) throw Error(ErrorCode::discretization_failure, "weight matrix is not positive definite");
}

int TridiagonalPencil::count_below(double shift) const {
  int count = 0;
  double d = 0.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < diag_.size(); ++i) {
    const double a = diag_[i] - shift * mass_[i];
    d = i == 0 ? a : a - off_[i - 1] * off_[i - 1] / d;
    if (d == 0.0) d = -tiny * (std::abs(a) + 1.0);
    if (d < 0.0) ++count;
  }
  return count;
}

double TridiagonalPencil::eigenvalue(int i) const {
  if (i < 1 || static_cast<std::size_t>(i) > size())
    throw Error(ErrorCode::invalid_argument, "eigenvalue index out of range");
  double lo = 0.0;
  while (count_below(lo) >= i) lo = lo == 0.0 ? -1.0 : 2.0 * lo;
  double hi = 1.0;
  while (count_below(hi) < i) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (count_below(mid) >= i ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> TridiagonalPencil::apply(std::span<const double> x, double lambda) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = (diag_[i] - lambda * mass_[i]) * x[i];
    if (i > 0) s += off_[i - 1] * x[i - 1];
    if (i + 1 < n) s += off_[i] * x[i + 1];
    y[i] = s;
  }
  return y;
}

std::vector<double> TridiagonalPencil::solve_shifted(double sigma, std::span<const double> b) const {
  // Gaussian elimination with partial pivoting on the tridiagonal system,
  // keeping the second superdiagonal created by row swaps (as in LAPACK gtsv).
  const std::size_t n = size();
  std::vector<double> dl(off_), d(n), du(off_), du2(n, 0.0), x(b.begin(), b.end());
  for (std::size_t i = 0; i < n; ++i) d[i] = diag_[i] - sigma * mass_[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) throw Error(ErrorCode::discretization_failure, "singular shifted pencil");
      const double f = dl[i] / d[i];
      d[i + 1] -= f * du[i];
      x[i + 1] -= f * x[i];
      if (i + 2 < n) du2[i] = 0.0;
    } else {
      const double f = d[i] / dl[i];
      d[i] = dl[i];
      const double tmp = d[i + 1];
      d[i + 1] = du[i] - f * tmp;
      du[i] = tmp;
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -f * du2[i];
      }
      std::swap(x[i], x[i + 1]);
      x[i + 1] -= f * x[i];
    }
  }
  if (d[n - 1] == 0.0) throw Error(ErrorCode::discretization_failure, "singular shifted pencil");
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    if (ii + 1 < n) s -= du[ii] * x[ii + 1];
    if (ii + 2 < n) s -= du2[ii] * x[ii + 2];
    x[ii] = s / d[ii];
  }
  return x;
}

std::vector<double> TridiagonalPencil::eigenvector(double lambda) const {
  const std::size_t n = size();
  std::vector<double> x(n);
  // deterministic, non-symmetric start vector
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * std::sin(1.0 + 7.0 * i);
  double sigma = lambda;
  for (int it = 0; it < 4; ++it) {
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = mass_[i] * x[i];
    try {
      x = solve_shifted(sigma, rhs);
    } catch (const Error&) {
      sigma = lambda * (1.0 + 1e-14) + 1e-300;
      x = solve_shifted(sigma, rhs);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += mass_[i] * x[i] * x[i];
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorCode::discretization_failure, "inverse iteration broke down");
    for (double& v : x) v /= norm;
  }
  return x;
}

}  // namespace henon
