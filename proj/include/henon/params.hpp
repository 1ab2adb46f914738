#pragma once

#include <string>
#include <vector>

namespace henon {

/// Critical exponent (N+2+2α)/(N−2) of the weighted problem.
double critical_exponent(int N, double alpha);

/// Problem instance −Δu = |x|^α u^p on the unit ball of R^N.
///
/// The derived constants are filled in by make(); the struct is a plain value
/// so it can be copied freely between threads.
struct HenonParams {
  int N = 3;
  double alpha = 1.0;
  double p = 2.0;
  double p_alpha = 7.0;  // (N+2+2α)/(N−2)
  double kappa = 5.0;    // Emden–Fowler parameter (2(N−1)+α)/(N−2)
  double C_alpha = 0.25; // 1/((N−2)(N+α))

  /// Validates N ≥ 3 and α > 0 and fills the derived constants. p is stored
  /// as given; solvability (1 < p < p_α) is checked by the solvers.
  static HenonParams make(int N, double alpha, double p);

  bool subcritical() const { return p > 1.0 && p < p_alpha; }

  /// Human-readable caveats (currently: α > 1 leaves the two-value Morse
  /// index result unproven).
  std::vector<std::string> warnings() const;
};

}  // namespace henon
