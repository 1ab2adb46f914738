#pragma once

// Endpoint behaviour of the radial family u_p.
//
// p → 1:   ‖u_p‖∞^{p−1} → λ₁ and u_p/‖u_p‖∞ → φ₁, the first eigenpair of
//          −Δφ = λ|x|^α φ in the unit ball.
// p → p_α: ũ_p(x) = u_p(x/μ_p)/‖u_p‖∞ with μ_p = ‖u_p‖∞^{(p−1)/(2+α)}
//          converges locally to U(x) = (1 + C_α|x|^{2+α})^{−(N−2)/(2+α)} and
//          stays below it.

#include <vector>

#include "henon/params.hpp"
#include "henon/radial.hpp"

namespace henon {

struct WeightedEigenpair {
  int N = 3;
  double alpha = 1.0;
  double R = 1.0;
  double lambda_1 = 0.0;             // Richardson-extrapolated
  double lambda_1_unextrapolated = 0.0;
  std::vector<double> mesh;          // radii in [0, R]
  std::vector<double> phi_1;         // φ₁(0) = 1, φ₁(R) = 0
};

/// First eigenpair of −(r^{N−1}φ')' = λ r^{N−1+α}φ on (0, R), φ'(0) = 0,
/// φ(R) = 0, on the unit graded mesh scaled by R (so λ_R R^{2+α} is
/// R-independent up to roundoff).
WeightedEigenpair weighted_first_eigen(int N, double alpha, double R, int mesh_points = 2001);

/// U(x) and the pointwise bound it provides.
double limit_profile(int N, double alpha, double x);

struct PToOneRow {
  double p = 0.0;
  double sup_pow = 0.0;        // ‖u_p‖∞^{p−1} = R₀^{2+α}
  double deviation = 0.0;      // |sup_pow − λ₁| / λ₁
  double sup_distance = 0.0;   // max_r |u_p/‖u_p‖∞ − φ₁|
  int morse_index = 0;
  double log_sup_norm = 0.0;
  std::vector<double> lambdas;  // Λ_{i,k}(p) for the pairs in PToOneReport::modes
};

/// Eigenvalue index i (1-based) of angular mode k.
struct ModeIndex {
  int i = 1;
  int k = 0;
};

struct PToOneReport {
  int N = 3;
  double alpha = 1.0;
  double lambda_1 = 0.0;
  std::vector<PToOneRow> rows;  // in the order of p_list
  double extrapolated = 0.0;    // linear Richardson of sup_pow in p−1 to p = 1
  double extrapolated_error = 0.0;  // |extrapolated − λ₁| / λ₁
  bool deviation_decreasing = false;
  bool distance_decreasing = false;
  bool non_convergent = false;  // deviations fail to decrease
  // Λ_{i,k}(p) is expected to approach λ_{i,k}/λ₁, the ratio of weighted
  // Dirichlet eigenvalues; reported without a tolerance
  std::vector<ModeIndex> modes;     // (2,0), (1,1), (1,2)
  std::vector<double> limit_ratios;  // λ_{i,k}/λ₁
};

/// i-th weighted Dirichlet eigenvalue of mode k on the unit ball,
/// −(r^{N−1}φ')' + μ_k r^{N−3}φ = λ r^{N−1+α}φ, Richardson-extrapolated.
double weighted_mode_eigenvalue(int N, double alpha, int i, int k, int mesh_points = 2001);

/// p_list must decrease towards 1.
PToOneReport verify_p_to_1(int N, double alpha, const std::vector<double>& p_list, const RadialOptions& options = {});

struct RescaledProfile {
  double p = 0.0;
  double mu_p = 0.0;
  std::vector<double> x;        // μ_p · profile mesh
  std::vector<double> u_tilde;  // ũ(x) = û on the profile mesh
  double max_excess = 0.0;      // max(ũ − U) over the mesh and the dense sample
  bool bounded_by_U = false;    // max_excess ≤ bound_tol
  double window = 5.0;
  double sup_distance = 0.0;    // max_{[0, window]} |ũ − U|
};

inline constexpr double kBoundTol = 1e-8;

/// `window_points` uniform samples of [0, window] are taken from the
/// integrator's dense output, not from the mesh.
RescaledProfile rescale_profile(const RadialProfile& profile, double window = 5.0, int window_points = 501);

struct EmdenFowlerSeries {
  double kappa = 0.0;
  double c = 0.0;               // t = c x^{−(N−2)}
  std::vector<double> t;        // decreasing with x
  std::vector<double> y;        // y(t) = ũ(x)
  std::vector<double> bound;    // (1 + 1/((κ−1)t^{κ−2}))^{−1/(κ−2)}
  double max_violation = 0.0;   // max(y − bound)
  bool bounded = false;
  double y_at_largest_t = 0.0;
};

double emden_fowler_t(int N, double alpha, double x);
double emden_fowler_bound(int N, double alpha, double t);

EmdenFowlerSeries emden_fowler(const RescaledProfile& rescaled, const HenonParams& params);

/// max over `radii` of |bound(t(x)) − U(x)| / U(x).
double pullback_identity_error(int N, double alpha, const std::vector<double>& radii);

struct BlowupRow {
  double p = 0.0;
  double log_sup_norm = 0.0;
  double sup_norm = 0.0;        // +inf if not representable
  double R0 = 0.0;
  double scaling_error = 0.0;   // |log‖u‖∞ − (2+α)/(p−1) log R₀| / log‖u‖∞
};

struct BlowupReport {
  std::vector<BlowupRow> rows;
  bool tail_increasing = false;  // over the last three rows (all rows if fewer)
};

/// p_list must increase towards p_α.
BlowupReport blowup_table(int N, double alpha, const std::vector<double>& p_list, const RadialOptions& options = {});

struct PToCriticalReport {
  std::vector<RescaledProfile> profiles;
  bool all_bounded = false;
  bool distance_decreasing = false;
};

PToCriticalReport verify_p_to_critical(int N, double alpha, const std::vector<double>& p_list,
                                       const RadialOptions& options = {});

}  // namespace henon
