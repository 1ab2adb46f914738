#pragma once

// Linearized spectrum of the radial solution, one spherical-harmonic mode at
// a time. For mode k the weighted Sturm–Liouville problem is
//
//   −(r^{N−1}ψ')' + μ_k r^{N−3}ψ = Λ p r^{N−1+α} u^{p−1} ψ  on (0, 1),
//   ψ(1) = 0,  ψ'(0) = 0 (k = 0)  or  ψ(0) = 0 (k ≥ 1),
//
// and the Morse index is Σ_k m(k)·#{i : Λ_{i,k} < 1}.

#include <span>
#include <vector>

#include "henon/pencil.hpp"
#include "henon/radial.hpp"

namespace henon {

/// μ_k = k(k+N−2), eigenvalue of −Δ on S^{N−1}.
double angular_eigenvalue(int k, int N);

/// Dimension of the degree-k spherical harmonics on S^{N−1}.
long long multiplicity(int k, int N);

enum class OriginCondition { neumann, dirichlet };

/// Generic discrete problem −(r^{N−1}ψ')' + μ r^{N−3}ψ = Λ ρ(r) r^{N−1+α} ψ
/// on a mesh of [0, R] with ψ(R) = 0, discretized by linear finite elements
/// with lumped weights. ρ is given at the nodes.
struct SturmLiouvilleProblem {
  int N = 3;
  double alpha = 1.0;
  double mu = 0.0;
  OriginCondition origin = OriginCondition::neumann;
  std::vector<double> mesh;
  std::vector<double> rho;
};

/// Linear-element matrices on a radial mesh, boundary nodes included:
/// stiffness ∫ r^{N−1} φ_i' φ_j' (exact for the element integrals up to
/// Gauss quadrature) and the lumped weights ∫ r^e φ_i for e = N−3, N−1+α,
/// N−1.
struct RadialMatrices {
  std::vector<double> stiff_diag;
  std::vector<double> stiff_off;   // (i, i+1)
  std::vector<double> potential;   // e = N−3, pairs with μ
  std::vector<double> weight;      // e = N−1+α, pairs with the nonlinearity
  std::vector<double> mass;        // e = N−1, plain L² mass
};
RadialMatrices radial_matrices(int N, double alpha, std::span<const double> mesh);

/// The assembled pencil together with the node indices it acts on.
struct DiscretePencil {
  TridiagonalPencil pencil;
  std::size_t first_node;  // 0 for Neumann, 1 for Dirichlet at the origin
};
DiscretePencil assemble(const SturmLiouvilleProblem& problem);

/// Lowest eigenpairs of a Sturm–Liouville problem; eigenfunctions are returned
/// on the full mesh (boundary nodes included), normalized by
/// Σ M_i ψ_i² = 1 (discrete ∫ρ r^{N−1+α}ψ² = 1) with the first lobe positive.
struct SturmLiouvilleSolution {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenfunctions;
  std::vector<double> residuals;
};
SturmLiouvilleSolution solve_sturm_liouville(const SturmLiouvilleProblem& problem, int num_eigs);

struct ModeProblem {
  RadialProfile profile;
  int k = 0;
  double mu_k = 0.0;
  OriginCondition origin = OriginCondition::neumann;
};
ModeProblem make_mode_problem(const RadialProfile& profile, int k);

/// Weight ρ_i = p ‖u‖∞^{p−1} û_i^{p−1} of the mode problem on the profile mesh.
SturmLiouvilleProblem to_sturm_liouville(const ModeProblem& problem);

struct SpectrumOptions {
  /// Richardson-extrapolate eigenvalues from the profile mesh and its
  /// refinement (second-order scheme, so (4Λ_h/2 − Λ_h)/3).
  bool extrapolate = true;
  double residual_tol = 1e-8;
};

struct ModeSpectrum {
  double p = 0.0;
  int k = 0;
  double mu_k = 0.0;
  std::vector<double> eigenvalues;              // increasing
  std::vector<double> mesh;                     // the profile mesh, or its refinement
  std::vector<std::vector<double>> eigenfunctions;  // on `mesh`
  std::vector<double> residuals;
  std::vector<int> zero_counts;                 // interior sign changes of ψ_i
  std::vector<double> unextrapolated;           // eigenvalues on `mesh`
};

/// Residuals above `residual_tol` trigger one retry on the refined profile
/// before discretization_failure is raised.
ModeSpectrum solve_mode_spectrum(const ModeProblem& problem, int num_eigs, const SpectrumOptions& options = {});

/// Sign changes of a discrete function, ignoring values below 1e−10·max|ψ|.
int count_sign_changes(const std::vector<double>& psi);

// -- Prüfer-angle shooting, independent of any matrix discretization --------

/// Prüfer angle at r = 1 for the mode problem with spectral parameter Λ.
/// The profile's normalized IVP is re-integrated alongside the angle.
double prufer_angle(const ModeProblem& problem, double lambda);

/// Number of eigenvalues strictly below `threshold` (phase half-turns).
int prufer_count(const ModeProblem& problem, double threshold);

/// i-th eigenvalue by root-finding on the Prüfer angle.
double prufer_eigenvalue(const ModeProblem& problem, int i);

/// Same machinery for −(r^{N−1}φ')' = λ r^{N−1+α} φ on (0, R), φ(R) = 0.
double prufer_weighted_angle(int N, double alpha, double R, double lambda);
double prufer_weighted_eigenvalue(int N, double alpha, double R, int i);

// -- Morse index ------------------------------------------------------------

struct MorseReport {
  double p = 0.0;
  double lambda_11 = 0.0;
  int morse_index = 0;
  int morse_index_shortcut = 0;
  bool degenerate = false;
  std::vector<double> lambda_1k;       // Λ_{1,k}, k = 0..k_max
  std::vector<int> negative_counts;    // #{i : Λ_{i,k} < 1}, k = 0..k_max
};

inline constexpr double kDegeneracyTol = 1e-8;

MorseReport morse_index(const RadialProfile& profile, int k_max = 2, const SpectrumOptions& options = {});

}  // namespace henon
