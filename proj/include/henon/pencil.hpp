#pragma once

#include <span>
#include <utility>
#include <vector>

namespace henon {

/// Symmetric-definite tridiagonal pencil A − λM with diagonal M > 0.
///
/// Eigenvalues are isolated by Sturm-sequence bisection on the inertia of
/// the LDLᵀ factorization of A − λM itself, so badly scaled M (the weights
/// vanish at both ends of the interval) does not cost accuracy the way an
/// explicit reduction M^{−1/2} A M^{−1/2} would. Eigenvectors come from
/// inverse iteration.
class TridiagonalPencil {
 public:
  TridiagonalPencil(std::vector<double> diag, std::vector<double> off, std::vector<double> mass);

  std::size_t size() const { return diag_.size(); }
  std::span<const double> diag() const { return diag_; }
  std::span<const double> off() const { return off_; }
  std::span<const double> mass() const { return mass_; }

  /// Number of eigenvalues strictly below `shift`.
  int count_below(double shift) const;

  /// i-th smallest eigenvalue (1-based).
  double eigenvalue(int i) const;

  /// Eigenvector for an (accurately known) eigenvalue, M-normalized.
  std::vector<double> eigenvector(double lambda) const;

  /// y = (A − λM) x
  std::vector<double> apply(std::span<const double> x, double lambda) const;

  /// Solves (A − σM) x = b with partial pivoting; throws on exact singularity.
  std::vector<double> solve_shifted(double sigma, std::span<const double> b) const;

 private:
  std::vector<double> diag_, off_, mass_;
};

}  // namespace henon
