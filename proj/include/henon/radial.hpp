#pragma once

// Positive radial solutions of −Δu = |x|^α u^p in the unit ball.
//
// Everything is computed from a single normalized initial value problem
//
//   v'' + (N−1)/x v' + x^α v^p = 0,   v(0) = 1, v'(0) = 0,
//
// whose first zero R₀ fixes the solution through the scaling
// u(r) = a v(R₀ r), a = R₀^{(2+α)/(p−1)} = ‖u‖∞. Internally the IVP is
// integrated in s = log x with w = x v'(x), which removes the coordinate
// singularity at the origin.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "henon/params.hpp"

namespace henon {

inline constexpr double kSeriesStart = 1e-6;

/// Solution of the normalized IVP recorded at the integrator's accepted steps.
struct NormalizedProfile {
  HenonParams params;
  double r_start = kSeriesStart;
  double tol = 1e-10;
  std::vector<double> mesh;     // radii x, strictly increasing from r_start
  std::vector<double> v;
  std::vector<double> v_prime;
  std::optional<double> first_zero;
  double v_prime_at_zero = 0.0;  // meaningful only when first_zero is set

  /// Values of the IVP at arbitrary sorted radii in [0, first_zero] (or
  /// [0, last mesh point] if there is no zero), obtained by re-integrating
  /// with the same tolerance and landing exactly on every requested radius.
  struct Samples {
    std::vector<double> v;
    std::vector<double> w;       // x v'(x)
    std::vector<double> defect;  // E(x), see one_minus_g
  };
  Samples sample(std::span<const double> xs) const;
};

/// Integrates the normalized IVP from the series start until v first crosses
/// zero or x reaches r_max. Reaching the horizon is not an error.
NormalizedProfile integrate_normalized(const HenonParams& params, double r_max, double tol);

struct RadialOptions {
  double tol = 1e-10;           // IVP relative tolerance
  double residual_tol = 1e-8;   // accepted relative residual of the radial equation
  int mesh_points = 2001;
  double r_max = 1e14;          // horizon for the first zero of the normalized IVP
};

/// The radial solution u_p on a graded mesh of [0, 1].
///
/// Values are stored normalized by ‖u‖∞ so that the profile stays
/// representable when ‖u‖∞ overflows (p → 1 with λ₁ > 1). The unnormalized
/// columns are available through u(), u_prime(), w(), z().
struct RadialProfile {
  HenonParams params;
  std::vector<double> mesh;
  double mesh_scale = 0.0;          // graded_mesh scale, 0 for a custom mesh
  std::vector<double> u_hat;        // u / ‖u‖∞
  std::vector<double> u_hat_prime;  // u' / ‖u‖∞
  std::vector<double> w_hat;        // −u' / ‖u‖∞
  std::vector<double> z_hat;        // (r u' + 2u/(p−1)) / ‖u‖∞
  std::vector<double> g;            // r^{1+α}u^p / ((N+α)(−u')), scale free
  std::vector<double> one_minus_g;  // 1 − g, computed without cancellation
  double R0 = 0.0;                  // ‖u‖∞^{(p−1)/(2+α)}
  double log_sup_norm = 0.0;
  double sup_norm = 0.0;            // may be +inf for p very close to 1
  // max over the mesh of |r^{N−1}u'(r) + ∫₀^r t^{N−1+α}u^p dt| / ‖u‖∞^p
  double residual = 0.0;
  std::vector<std::string> warnings;
  std::shared_ptr<const NormalizedProfile> normalized;

  std::size_t size() const { return mesh.size(); }
  /// ‖u‖∞^{p−1}, the factor multiplying û^{p−1} in every linearization.
  double weight_scale() const;
  std::vector<double> u() const;
  std::vector<double> u_prime() const;
  std::vector<double> w() const;
  std::vector<double> z() const;

  /// û and û' at arbitrary sorted radii in [0, 1].
  struct Values {
    std::vector<double> u_hat;
    std::vector<double> u_hat_prime;
  };
  Values evaluate(std::span<const double> radii) const;

  /// Same solution on another mesh of [0, 1] (re-integrated, not interpolated).
  RadialProfile resample(std::span<const double> mesh) const;

  /// Resampled on the mesh with every cell halved in the grading variable.
  RadialProfile refined() const;
};

RadialProfile solve_radial(const HenonParams& params, const RadialOptions& options = {});

/// Fills w, z, g from u, u' and checks −u' > 0 on (0, 1].
RadialProfile derived_functions(RadialProfile profile);

/// Max relative flux-balance residual of the radial equation on the profile's
/// mesh, see RadialProfile::residual.
double radial_residual(const RadialProfile& profile);

}  // namespace henon
