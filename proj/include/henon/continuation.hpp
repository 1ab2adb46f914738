#pragma once

// Axisymmetric (O(N−1)-invariant) discretization of −Δu = |x|^α |u|^{p−1}u
// in the unit ball and pseudo-arclength continuation of the branch that
// leaves the radial curve where Λ_{1,1}(p) crosses 1.
//
// Functions of (r, θ) are discretized with linear elements in r, the same
// ones the spectral module uses, tensored with a Gauss–Gegenbauer collocation
// in x = cos θ for the weight (1 − x²)^{(N−3)/2}. The angular stiffness is
// built from the orthonormal Gegenbauer polynomials, so the degree-k modes
// are exact eigenvectors with eigenvalue k(k+N−2) and the discrete operator
// splits into the 1D mode problems of the spectral module. The origin is a
// single unknown shared by all angles; u = 0 at r = 1.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "henon/morse_scan.hpp"

namespace henon {

struct GridOptions {
  int radial_points = 513;
  int angular_points = 33;
  double mesh_scale = 0.5;  // concentration length handed to graded_mesh
};

class AxisymGrid {
 public:
  static AxisymGrid make(int N, double alpha, const GridOptions& options = {});

  int N = 3;
  double alpha = 1.0;
  std::vector<double> r;       // 0 = r_0 < … < r_{nr−1} = 1
  std::vector<double> x;       // cos θ_j, decreasing, so θ_j increases in (0, π)
  std::vector<double> theta;
  std::vector<double> ang_weight;  // quadrature weights W_j, Σ W_j = |weight|
  Eigen::MatrixXd ang_modes;   // q_k(x_j), orthonormal in Σ_j W_j q_k q_l = δ_kl
  Eigen::MatrixXd ang_stiff;   // W^{1/2} Q diag(k(k+N−2)) Qᵀ W^{1/2}, Q_jk = √W_j q_k(x_j)
  Eigen::MatrixXd ang_diff;    // d/dx of the interpolating polynomial at the nodes
  RadialMatrices radial;

  int nr() const { return static_cast<int>(r.size()); }
  int nt() const { return static_cast<int>(x.size()); }
  /// Unknowns: the origin, then (i, j) for 1 ≤ i ≤ nr−2 in row-major order.
  int unknowns() const { return 1 + (nr() - 2) * nt(); }
  int index(int i, int j) const { return i == 0 ? 0 : 1 + (i - 1) * nt() + j; }

  /// Lumped mass Σ ∫ r^{N−1} φ_i · W_j, one entry per unknown.
  const Eigen::VectorXd& mass() const { return mass_; }
  /// Lumped weight ∫ r^{N−1+α} φ_i · W_j, one entry per unknown.
  const Eigen::VectorXd& weight() const { return weight_; }

  /// Full nr × nt field (boundary row included) from an unknown vector.
  Eigen::MatrixXd field(const Eigen::VectorXd& u) const;
  /// Unknown vector of a function of r alone, given at the radial nodes.
  Eigen::VectorXd embed_radial(const std::vector<double>& values) const;
  /// Σ_j W_j q_k(x_j) u(r_i, x_j) for every radial node.
  std::vector<double> mode_projection(const Eigen::VectorXd& u, int k) const;

 private:
  Eigen::VectorXd mass_, weight_;
};

/// M-weighted L² norm √(uᵀ diag(mass) u).
double weighted_norm(const AxisymGrid& grid, const Eigen::VectorXd& u);

struct AxisymState {
  double p = 0.0;
  Eigen::VectorXd values;
  double residual_norm = 0.0;
  double asymmetry = 0.0;   // weighted norm of the k = 1 projection
  bool positive = false;    // u > 0 at the origin and every interior node
  double sup_norm = 0.0;
  double c1_norm = 0.0;     // max|u| + max|∇u| over the grid
};

struct ResidualField {
  Eigen::VectorXd weak;     // Pᵀ[K u − B |u|^{p−1} u]
  Eigen::VectorXd strong;   // weak / lumped mass, approximates −Δu − |x|^α|u|^{p−1}u
  double norm = 0.0;        // ‖strong‖_M / ‖|x|^α|u|^p‖_M (absolute when u = 0)
};

ResidualField residual(const AxisymGrid& grid, double p, const Eigen::VectorXd& u);

/// ∂F/∂u (symmetric) and ∂F/∂p of the weak residual.
Eigen::SparseMatrix<double> jacobian(const AxisymGrid& grid, double p, const Eigen::VectorXd& u);
Eigen::VectorXd residual_dp(const AxisymGrid& grid, double p, const Eigen::VectorXd& u);

double asymmetry(const AxisymGrid& grid, const Eigen::VectorXd& u);

/// Fills residual, asymmetry, positivity and norms for a vector at p.
AxisymState make_state(const AxisymGrid& grid, double p, Eigen::VectorXd u);

/// Radial solution of the same discretization (1D Newton started from the
/// shooting profile), at the radial nodes.
std::vector<double> discrete_radial_solution(const AxisymGrid& grid, double p);

/// Smallest eigenvalue of the Jacobian restricted to the mode-k angular
/// sector, relative to the radial mass. Obtained by projecting the 2D
/// Jacobian; the off-tridiagonal leakage of the projection is returned.
struct SectorEigen {
  double value = 0.0;
  std::vector<double> vector;  // radial nodes, zero at both ends for k ≥ 1
  double leakage = 0.0;
};
SectorEigen sector_eigen(const AxisymGrid& grid, double p, const Eigen::VectorXd& u, int k = 1);

/// p where the cos θ sector eigenvalue at the discrete radial solution
/// crosses zero, searched near `p_guess` until the bracket is below `tol`.
double sector_crossing(const AxisymGrid& grid, double p_guess, double tol = 1e-12);

/// ψ_{1,1}(r) cos θ from a degeneracy point, interpolated to the grid and
/// normalized in the weighted L² norm.
Eigen::VectorXd kernel_direction(const DegeneracyPoint& dp, const AxisymGrid& grid);

/// The eigenvalues of (J, M) closest to 0, sorted by modulus, from a
/// shift-invert subspace iteration.
std::vector<double> smallest_eigenvalues(const AxisymGrid& grid, double p, const Eigen::VectorXd& u, int count = 3);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iter = 30;
};

struct NewtonResult {
  AxisymState state;
  std::vector<double> history;  // residual norm before each iteration and at the end
};

/// Plain Newton at fixed p. Raises no_convergence or jacobian_singular.
NewtonResult newton_solve(const AxisymGrid& grid, double p, const Eigen::VectorXd& guess,
                          const NewtonOptions& options = {});

enum class Termination { step_limit, fold_count_limit, residual_failure, returned_to_radial };
std::string_view to_string(Termination t);

struct BranchPoint {
  double s = 0.0;  // accumulated arclength
  double p = 0.0;
  AxisymState state;
  double arclength_defect = 0.0;  // |⟨t, X − X_prev⟩ − Δs| / Δs
  int newton_iterations = 0;
};

struct BranchOrigin {
  double p_bar = 0.0;           // from the 1D scan
  double p_bar_discrete = 0.0;  // cos θ sector crossing on this grid
  Eigen::VectorXd radial;       // discrete radial solution at p_bar_discrete
  Eigen::VectorXd kernel;       // weighted-L² normalized discrete kernel
};

BranchOrigin prepare_origin(const AxisymGrid& grid, const DegeneracyPoint& dp);

struct ContinuationOptions {
  double epsilon = 1e-2;   // branch-switch amplitude relative to ‖u_p̄‖∞
  double step = 0.05;      // initial arclength step
  double min_step = 1e-5;
  double max_step = 0.2;
  int max_steps = 40;
  int max_folds = 4;
  double tol = 1e-10;      // Newton tolerance on the residual norm
  double accept_tol = 1e-8;
  double radial_return_tol = 1e-6;  // relative asymmetry that counts as radial
};

struct Branch {
  BranchOrigin origin;
  double epsilon = 0.0;       // amplitude that succeeded
  std::vector<BranchPoint> points;
  Termination termination = Termination::step_limit;
  std::string detail;
  int folds = 0;
  double sup_norm_min = 0.0, sup_norm_max = 0.0;
  double c1_norm_min = 0.0, c1_norm_max = 0.0;
};

/// Raises immediate_failure when the branch switch fails for ε, ε/2, ε/4.
Branch continue_branch(const AxisymGrid& grid, const BranchOrigin& origin, const ContinuationOptions& options = {});

}  // namespace henon
