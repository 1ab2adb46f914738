#pragma once

// Sweeps p across (1, p_α), tracks Λ_{1,1}(p) and the Morse index, and
// refines the points where Λ_{1,1} crosses 1.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "henon/radial.hpp"
#include "henon/spectral.hpp"

namespace henon {

struct ScanOptions {
  RadialOptions radial;
  SpectrumOptions spectrum;
  int k_max = 2;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct ScanRow {
  double p = 0.0;
  double lambda_11 = 0.0;
  int morse_index = 0;
  int morse_index_shortcut = 0;
  bool degenerate = false;
  double sup_norm = 0.0;      // +inf when not representable
  double log_sup_norm = 0.0;
};

struct ScanFailure {
  double p = 0.0;
  std::string error;
};

struct ScanResult {
  int N = 3;
  double alpha = 1.0;
  int k_max = 2;
  double p_lo = 0.0;
  double p_hi = 0.0;
  std::string grid_spec;
  std::vector<ScanRow> rows;          // sorted by p
  std::vector<ScanFailure> failures;  // rows skipped because a solver threw
};

/// `points` values with p_α − p geometric between p_α − 1 − δ and δ, so the
/// grid is densest next to p_α.
std::vector<double> default_grid(int N, double alpha, int points = 101, double delta = 1e-2);

ScanResult scan(int N, double alpha, std::vector<double> grid, const ScanOptions& options = {});

/// Λ_{1,1}(p) alone (cheaper than a full Morse report).
double lambda_11(int N, double alpha, double p, const ScanOptions& options = {});

struct DegeneracyPoint {
  double p_bar = 0.0;
  double p_lo = 0.0, p_hi = 0.0;          // bracket taken from the scan
  double lambda_lo = 0.0, lambda_hi = 0.0;
  double defect = 0.0;                    // |Λ_{1,1}(p̄) − 1|
  bool changing = false;                  // Morse index differs across the bracket
  int morse_below = 0, morse_above = 0;   // at p_lo and p_hi
  int iterations = 0;
  std::vector<double> mesh;               // profile mesh at p̄
  std::vector<double> kernel;             // ψ_{1,1}(p̄), weighted-L² normalized
};

struct DegeneracyReport {
  std::vector<DegeneracyPoint> points;
  std::vector<double> possible_tangencies;  // local minima of |Λ_{1,1}−1| < √tol without a sign change
  int changing_count = 0;
  bool parity_odd = false;
  bool grid_refined = false;                // the automatic refinement was used
  ScanResult scan;                          // the scan the points were taken from
};

/// Raises parity_violation (α ≤ 1 only) when, after one automatic grid
/// refinement, the number of changing points is even although the Morse
/// indices at the two ends of the scan differ, or odd although they agree.
/// Over the whole interval (1, p_α) this is the requirement of an odd count.
DegeneracyReport find_degeneracy_points(const ScanResult& scan, double tol = kDegeneracyTol,
                                        const ScanOptions& options = {});

// -- Quadratic form of the radial linearization --------------------------------

struct TestValues {
  std::vector<double> v;
  std::vector<double> dv;
};
/// A radial test function evaluated at sorted radii in [0, 1].
using TestFunction = std::function<TestValues(std::span<const double>)>;

/// v = Σ_m c_m cos((m − ½)πr): smooth, v'(0) = 0, v(1) = 0.
TestFunction cosine_series(std::vector<double> coefficients);

/// Piecewise-linear interpolant of nodal values on `mesh`.
TestFunction piecewise_linear(std::vector<double> mesh, std::vector<double> values);

/// v = u_p/‖u_p‖∞, the equality case.
TestFunction profile_function(const RadialProfile& profile);

/// Fixed-seed family of `count` cosine series with `modes` terms; coefficients
/// are standard normal draws (std::mt19937_64) divided by m.
std::vector<TestFunction> random_test_functions(std::uint64_t seed, int count, int modes = 12);

/// Relative size (against QuadformValue::scale) below which a value counts as
/// zero up to quadrature error.
inline constexpr double kQuadratureTol = 1e-9;

struct QuadformValue {
  double value = 0.0;
  double scale = 0.0;  // t1 + t2, the size the value is measured against
  double t1 = 0.0;     // ∫ r^{N−1} v'²
  double t2 = 0.0;     // p ∫ r^{N−1+α} u^{p−1} v²
  double t3 = 0.0;     // (p−1) (∫ r^{N−1+α} u^p v)² / ∫ r^{N−1+α} u^{p+1}
};

/// t1 − t2 + t3. The terms are evaluated with û = u/‖u‖∞ and
/// ‖u‖∞^{p−1} = R₀^{2+α}, so huge sup norms never enter. Gauss–Legendre with
/// `gauss_points` nodes per cell of the profile mesh.
QuadformValue quadform_R4(const RadialProfile& profile, const TestFunction& v, int gauss_points = 8);

}  // namespace henon
