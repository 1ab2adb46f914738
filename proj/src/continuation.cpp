#include "henon/continuation.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/pencil.hpp"

namespace henon {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

double power_term(double u, double p) { return std::pow(std::abs(u), p - 1.0) * u; }
double power_slope(double u, double p) { return p * std::pow(std::abs(u), p - 1.0); }

}  // namespace

// -- grid ------------------------------------------------------------------------

AxisymGrid AxisymGrid::make(int N, double alpha, const GridOptions& options) {
  critical_exponent(N, alpha);
  if (options.radial_points < 4 || options.angular_points < 3)
    throw Error(ErrorCode::invalid_argument, "axisymmetric grid too small");
  AxisymGrid g;
  g.N = N;
  g.alpha = alpha;
  g.r = graded_mesh(options.radial_points, options.mesh_scale);
  g.radial = radial_matrices(N, alpha, g.r);

  // Golub–Welsch for the weight (1 − x²)^{λ − 1/2}, λ = (N − 2)/2
  const int nt = options.angular_points;
  const double lam = 0.5 * (N - 2);
  std::vector<double> b(nt, 0.0);
  for (int k = 1; k < nt; ++k) b[k] = std::sqrt(k * (k + 2.0 * lam - 1.0) / (4.0 * (k + lam) * (k + lam - 1.0)));
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(nt, nt);
  for (int k = 1; k < nt; ++k) jac(k, k - 1) = jac(k - 1, k) = b[k];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  const double mu0 = std::sqrt(std::numbers::pi) * std::tgamma(lam + 0.5) / std::tgamma(lam + 1.0);
  g.x.resize(nt);
  g.theta.resize(nt);
  g.ang_weight.resize(nt);
  for (int j = 0; j < nt; ++j) {
    const int src = nt - 1 - j;  // decreasing x
    // symmetric nodes are symmetrized exactly
    g.x[j] = 0.5 * (es.eigenvalues()(src) - es.eigenvalues()(nt - 1 - src));
    const double z0 = es.eigenvectors()(0, src), z1 = es.eigenvectors()(0, nt - 1 - src);
    g.ang_weight[j] = mu0 * 0.5 * (z0 * z0 + z1 * z1);
    g.theta[j] = std::acos(g.x[j]);
  }
  // orthonormal polynomials and their derivatives by the three-term recurrence
  g.ang_modes.resize(nt, nt);
  Eigen::MatrixXd dq(nt, nt);
  for (int j = 0; j < nt; ++j) {
    double qm = 0.0, q = 1.0 / std::sqrt(mu0), dqm = 0.0, dqk = 0.0;
    for (int k = 0; k < nt; ++k) {
      g.ang_modes(j, k) = q;
      dq(j, k) = dqk;
      if (k + 1 == nt) break;
      const double qn = (g.x[j] * q - b[k] * qm) / b[k + 1];
      const double dqn = (q + g.x[j] * dqk - b[k] * dqm) / b[k + 1];
      qm = q;
      q = qn;
      dqm = dqk;
      dqk = dqn;
    }
  }
  Eigen::VectorXd sw(nt), w(nt), mu(nt);
  for (int j = 0; j < nt; ++j) {
    w(j) = g.ang_weight[j];
    sw(j) = std::sqrt(g.ang_weight[j]);
  }
  for (int k = 0; k < nt; ++k) mu(k) = angular_eigenvalue(k, N);
  const Eigen::MatrixXd Q = sw.asDiagonal() * g.ang_modes;
  g.ang_stiff = sw.asDiagonal() * Q * mu.asDiagonal() * Q.transpose() * sw.asDiagonal();
  g.ang_stiff = 0.5 * (g.ang_stiff + g.ang_stiff.transpose());
  // coefficients a_k = Σ_j W_j q_k(x_j) u_j, derivative Σ_k a_k q_k'
  g.ang_diff = dq * g.ang_modes.transpose() * w.asDiagonal();

  const int n = g.unknowns();
  g.mass_.resize(n);
  g.weight_.resize(n);
  const double wsum = w.sum();
  g.mass_(0) = g.radial.mass[0] * wsum;
  g.weight_(0) = g.radial.weight[0] * wsum;
  for (int i = 1; i + 1 < g.nr(); ++i)
    for (int j = 0; j < nt; ++j) {
      g.mass_(g.index(i, j)) = g.radial.mass[i] * g.ang_weight[j];
      g.weight_(g.index(i, j)) = g.radial.weight[i] * g.ang_weight[j];
    }
  return g;
}

Eigen::MatrixXd AxisymGrid::field(const Eigen::VectorXd& u) const {
  if (u.size() != unknowns()) throw Error(ErrorCode::invalid_argument, "vector does not match the grid");
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(nr(), nt());
  f.row(0).setConstant(u(0));
  for (int i = 1; i + 1 < nr(); ++i)
    for (int j = 0; j < nt(); ++j) f(i, j) = u(index(i, j));
  return f;
}

Eigen::VectorXd AxisymGrid::embed_radial(const std::vector<double>& values) const {
  if (static_cast<int>(values.size()) != nr()) throw Error(ErrorCode::invalid_argument, "radial values do not match");
  Eigen::VectorXd u(unknowns());
  u(0) = values[0];
  for (int i = 1; i + 1 < nr(); ++i)
    for (int j = 0; j < nt(); ++j) u(index(i, j)) = values[i];
  return u;
}

std::vector<double> AxisymGrid::mode_projection(const Eigen::VectorXd& u, int k) const {
  if (k < 0 || k >= nt()) throw Error(ErrorCode::invalid_argument, "mode out of range");
  const Eigen::MatrixXd f = field(u);
  std::vector<double> a(nr(), 0.0);
  for (int i = 0; i < nr(); ++i)
    for (int j = 0; j < nt(); ++j) a[i] += ang_weight[j] * ang_modes(j, k) * f(i, j);
  return a;
}

double weighted_norm(const AxisymGrid& grid, const Eigen::VectorXd& u) {
  return std::sqrt(u.cwiseProduct(grid.mass()).dot(u));
}

// -- residual and Jacobian -----------------------------------------------------

ResidualField residual(const AxisymGrid& g, double p, const Eigen::VectorXd& u) {
  const Eigen::MatrixXd f = g.field(u);
  const auto& kr = g.radial;
  const int nr = g.nr(), nt = g.nt();
  ResidualField res;
  res.weak.resize(g.unknowns());
  Eigen::VectorXd source(g.unknowns());
  double wsum = 0.0;
  for (double w : g.ang_weight) wsum += w;
  // origin: Σ_j W_j (K00 u0 + K01 u_1j); the angular term vanishes on constants
  double acc = kr.stiff_diag[0] * f(0, 0) * wsum;
  for (int j = 0; j < nt; ++j) acc += kr.stiff_off[0] * g.ang_weight[j] * f(1, j);
  source(0) = kr.weight[0] * wsum * power_term(f(0, 0), p);
  res.weak(0) = acc - source(0);
  for (int i = 1; i + 1 < nr; ++i) {
    const Eigen::VectorXd ang = g.ang_stiff * f.row(i).transpose();
    for (int j = 0; j < nt; ++j) {
      const int id = g.index(i, j);
      const double rad = kr.stiff_off[i - 1] * f(i - 1, j) + kr.stiff_diag[i] * f(i, j) + kr.stiff_off[i] * f(i + 1, j);
      source(id) = kr.weight[i] * g.ang_weight[j] * power_term(f(i, j), p);
      res.weak(id) = g.ang_weight[j] * rad + kr.potential[i] * ang(j) - source(id);
    }
  }
  res.strong = res.weak.cwiseQuotient(g.mass());
  const double num = std::sqrt(res.weak.cwiseProduct(res.weak).cwiseQuotient(g.mass()).sum());
  const double den = std::sqrt(source.cwiseProduct(source).cwiseQuotient(g.mass()).sum());
  res.norm = den > 0.0 ? num / den : num;
  return res;
}

SpMat jacobian(const AxisymGrid& g, double p, const Eigen::VectorXd& u) {
  const Eigen::MatrixXd f = g.field(u);
  const auto& kr = g.radial;
  const int nr = g.nr(), nt = g.nt();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(g.unknowns()) * (nt + 3));
  double wsum = 0.0;
  for (double w : g.ang_weight) wsum += w;
  trip.emplace_back(0, 0, (kr.stiff_diag[0] - kr.weight[0] * power_slope(f(0, 0), p)) * wsum);
  for (int j = 0; j < nt; ++j) {
    const double c = kr.stiff_off[0] * g.ang_weight[j];
    trip.emplace_back(0, g.index(1, j), c);
    trip.emplace_back(g.index(1, j), 0, c);
  }
  for (int i = 1; i + 1 < nr; ++i)
    for (int j = 0; j < nt; ++j) {
      const int id = g.index(i, j);
      for (int jj = 0; jj < nt; ++jj) {
        double v = kr.potential[i] * g.ang_stiff(j, jj);
        if (jj == j) v += g.ang_weight[j] * (kr.stiff_diag[i] - kr.weight[i] * power_slope(f(i, j), p));
        trip.emplace_back(id, g.index(i, jj), v);
      }
      if (i >= 2) trip.emplace_back(id, g.index(i - 1, j), kr.stiff_off[i - 1] * g.ang_weight[j]);
      if (i + 2 < nr) trip.emplace_back(id, g.index(i + 1, j), kr.stiff_off[i] * g.ang_weight[j]);
    }
  SpMat J(g.unknowns(), g.unknowns());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

Eigen::VectorXd residual_dp(const AxisymGrid& g, double p, const Eigen::VectorXd& u) {
  Eigen::VectorXd d(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u(i));
    d(i) = a > 0.0 ? -g.weight()(i) * power_term(u(i), p) * std::log(a) : 0.0;
  }
  return d;
}

double asymmetry(const AxisymGrid& g, const Eigen::VectorXd& u) {
  const std::vector<double> a = g.mode_projection(u, 1);
  double s = 0.0;
  for (int i = 0; i < g.nr(); ++i) s += g.radial.mass[i] * a[i] * a[i];
  return std::sqrt(s);
}

AxisymState make_state(const AxisymGrid& g, double p, Eigen::VectorXd u) {
  AxisymState st;
  st.p = p;
  st.residual_norm = residual(g, p, u).norm;
  st.asymmetry = asymmetry(g, u);
  const Eigen::MatrixXd f = g.field(u);
  st.positive = true;
  for (int i = 0; i + 1 < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j)
      if (!(f(i, j) > 0.0)) st.positive = false;
  st.sup_norm = f.cwiseAbs().maxCoeff();
  double grad = 0.0;
  for (int i = 0; i + 1 < g.nr(); ++i) {
    const double h = g.r[i + 1] - g.r[i];
    for (int j = 0; j < g.nt(); ++j) grad = std::max(grad, std::abs(f(i + 1, j) - f(i, j)) / h);
  }
  for (int i = 1; i < g.nr(); ++i) {
    const Eigen::VectorXd dx = g.ang_diff * f.row(i).transpose();
    for (int j = 0; j < g.nt(); ++j)
      grad = std::max(grad, std::abs(std::sin(g.theta[j]) * dx(j)) / g.r[i]);
  }
  st.c1_norm = st.sup_norm + grad;
  st.values = std::move(u);
  return st;
}

// -- radial solution and the cos θ sector --------------------------------------

std::vector<double> discrete_radial_solution(const AxisymGrid& g, double p) {
  const RadialProfile prof = solve_radial(HenonParams::make(g.N, g.alpha, p));
  if (!std::isfinite(prof.sup_norm)) throw Error(ErrorCode::invalid_exponent, "sup norm not representable");
  const auto vals = prof.evaluate(g.r);
  const int n = g.nr() - 1;  // unknowns 0..nr−2
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = prof.sup_norm * vals.u_hat[i];
  const auto& kr = g.radial;
  double prev_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    std::vector<double> F(n), d(n), off(n - 1), ones(n, 1.0);
    for (int i = 0; i < n; ++i) {
      double ku = kr.stiff_diag[i] * u[i];
      if (i > 0) ku += kr.stiff_off[i - 1] * u[i - 1];
      if (i + 1 < n) ku += kr.stiff_off[i] * u[i + 1];
      F[i] = ku - kr.weight[i] * power_term(u[i], p);
      d[i] = kr.stiff_diag[i] - kr.weight[i] * power_slope(u[i], p);
      if (i + 1 < n) off[i] = kr.stiff_off[i];
    }
    const std::vector<double> du = TridiagonalPencil(d, off, ones).solve_shifted(0.0, F);
    double step = 0.0, size = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] -= du[i];
      step = std::max(step, std::abs(du[i]));
      size = std::max(size, std::abs(u[i]));
    }
    if (!std::isfinite(step)) break;
    // stop once the update hits roundoff or stops contracting quadratically
    if (step <= 1e-15 * size || (step <= 1e-12 * size && step > 0.1 * prev_step)) {
      u.push_back(0.0);
      return u;
    }
    prev_step = step;
  }
  throw Error(ErrorCode::no_convergence, "radial Newton on the grid did not converge");
}

SectorEigen sector_eigen(const AxisymGrid& g, double p, const Eigen::VectorXd& u, int k) {
  if (k < 0 || k >= g.nt()) throw Error(ErrorCode::invalid_argument, "mode out of range");
  const int first = k == 0 ? 0 : 1;
  const int m = g.nr() - 1 - first;
  std::vector<Triplet> trip;
  for (int i = first; i + 1 < g.nr(); ++i) {
    if (i == 0) {
      trip.emplace_back(0, 0, g.ang_modes(0, 0));
      continue;
    }
    for (int j = 0; j < g.nt(); ++j) trip.emplace_back(g.index(i, j), i - first, g.ang_modes(j, k));
  }
  SpMat V(g.unknowns(), m);
  V.setFromTriplets(trip.begin(), trip.end());
  const SpMat J = jacobian(g, p, u);
  const SpMat Js = SpMat(V.transpose() * J * V);
  const Eigen::VectorXd Ms = V.transpose() * g.mass().cwiseProduct(V * Eigen::VectorXd::Ones(m));
  std::vector<double> d(m), off(m - 1), mass(m);
  double big = 0.0, leak = 0.0;
  for (int c = 0; c < Js.outerSize(); ++c)
    for (SpMat::InnerIterator it(Js, c); it; ++it) {
      big = std::max(big, std::abs(it.value()));
      if (it.row() == it.col())
        d[it.row()] = it.value();
      else if (it.row() + 1 == it.col())
        off[it.row()] = it.value();
      else if (std::abs(it.row() - it.col()) > 1)
        leak = std::max(leak, std::abs(it.value()));
    }
  for (int i = 0; i < m; ++i) mass[i] = Ms(i);
  const TridiagonalPencil pencil(std::move(d), std::move(off), std::move(mass));
  SectorEigen out;
  out.value = pencil.eigenvalue(1);
  std::vector<double> vec = pencil.eigenvector(out.value);
  double amax = 0.0, sign = 1.0;
  for (double v : vec) amax = std::max(amax, std::abs(v));
  for (double v : vec)
    if (std::abs(v) > 1e-3 * amax) {
      sign = v > 0.0 ? 1.0 : -1.0;
      break;
    }
  out.vector.assign(g.nr(), 0.0);
  for (int i = 0; i < m; ++i) out.vector[i + first] = sign * vec[i];
  out.leakage = big > 0.0 ? leak / big : 0.0;
  return out;
}

namespace {

double sector_value(const AxisymGrid& g, double p) {
  return sector_eigen(g, p, g.embed_radial(discrete_radial_solution(g, p)), 1).value;
}

}  // namespace

double sector_crossing(const AxisymGrid& g, double p_guess, double tol) {
  const double pa = critical_exponent(g.N, g.alpha);
  double width = 1e-3;
  double a = p_guess - width, b = p_guess + width;
  double fa = sector_value(g, a), fb = sector_value(g, b);
  for (int it = 0; fa * fb > 0.0; ++it) {
    if (it > 12) throw Error(ErrorCode::no_convergence, "no sign change of the cos-sector eigenvalue near p_guess");
    width *= 2.0;
    a = std::max(p_guess - width, 0.5 * (1.0 + p_guess));
    b = std::min(p_guess + width, 0.5 * (pa + p_guess));
    fa = sector_value(g, a);
    fb = sector_value(g, b);
  }
  int side = 0;
  for (int it = 0; it < 100 && b - a > tol; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = sector_value(g, c);
    if (fc == 0.0) return c;
    if ((fc > 0.0) == (fa > 0.0)) {
      a = c;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = c;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (std::abs(fc) < 1e-14) return c;
  }
  return (a * fb - b * fa) / (fb - fa);
}

Eigen::VectorXd kernel_direction(const DegeneracyPoint& dp, const AxisymGrid& g) {
  if (dp.mesh.size() != dp.kernel.size() || dp.mesh.size() < 2)
    throw Error(ErrorCode::interpolation_failure, "degeneracy point carries no kernel");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(g.unknowns());
  for (int i = 1; i + 1 < g.nr(); ++i) {
    const double psi = interp_linear(dp.mesh, dp.kernel, g.r[i]);
    for (int j = 0; j < g.nt(); ++j) u(g.index(i, j)) = psi * g.x[j];
  }
  const double nrm = weighted_norm(g, u);
  if (!(nrm > 0.0)) throw Error(ErrorCode::interpolation_failure, "kernel vanishes on the grid");
  return u / nrm;
}

std::vector<double> smallest_eigenvalues(const AxisymGrid& g, double p, const Eigen::VectorXd& u, int count) {
  const SpMat J = jacobian(g, p, u);
  const int n = g.unknowns();
  const int block = count + 3;
  const double shift = -0.7316;
  SpMat A = J;
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) -= shift * g.mass()(i);
  Eigen::SparseLU<SpMat> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::jacobian_singular, "shifted Jacobian is singular");
  Eigen::MatrixXd X(n, block);
  for (int c = 0; c < block; ++c)
    for (int i = 0; i < n; ++i) X(i, c) = std::sin(0.37 * (i + 1) * (c + 1)) + 0.1 * std::cos(1.3 * i);
  Eigen::VectorXd vals;
  for (int it = 0; it < 200; ++it) {
    Eigen::MatrixXd Y(n, block);
    for (int c = 0; c < block; ++c) Y.col(c) = lu.solve(Eigen::VectorXd(g.mass().cwiseProduct(X.col(c))));
    const Eigen::MatrixXd Ar = Y.transpose() * (J * Y);
    const Eigen::MatrixXd Br = Y.transpose() * g.mass().asDiagonal() * Y;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(0.5 * (Ar + Ar.transpose()), 0.5 * (Br + Br.transpose()));
    const Eigen::VectorXd nv = ges.eigenvalues();
    X = Y * ges.eigenvectors();
    if (it > 5 && vals.size() == nv.size() &&
        ((nv - vals).cwiseAbs().array() <= 1e-13 * (1.0 + nv.cwiseAbs().array())).head(count).all()) {
      vals = nv;
      break;
    }
    vals = nv;
  }
  std::vector<double> out(vals.data(), vals.data() + vals.size());
  std::sort(out.begin(), out.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  out.resize(count);
  return out;
}

// -- Newton ----------------------------------------------------------------------

NewtonResult newton_solve(const AxisymGrid& g, double p, const Eigen::VectorXd& guess, const NewtonOptions& options) {
  if (!guess.allFinite()) throw Error(ErrorCode::invalid_argument, "non-finite Newton guess");
  Eigen::VectorXd u = guess;
  NewtonResult out;
  Eigen::SparseLU<SpMat> lu;
  for (int it = 0;; ++it) {
    const ResidualField res = residual(g, p, u);
    out.history.push_back(res.norm);
    if (res.norm < options.tol) break;
    if (it >= options.max_iter || !std::isfinite(res.norm))
      throw Error(ErrorCode::no_convergence, "Newton did not reach the tolerance");
    lu.compute(jacobian(g, p, u));
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::jacobian_singular, "singular Jacobian in Newton");
    u -= lu.solve(res.weak);
  }
  out.state = make_state(g, p, std::move(u));
  return out;
}

// -- continuation ----------------------------------------------------------------

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::step_limit: return "step-limit";
    case Termination::fold_count_limit: return "fold-count-limit";
    case Termination::residual_failure: return "residual-failure";
    case Termination::returned_to_radial: return "returned-to-radial";
  }
  return "unknown";
}

BranchOrigin prepare_origin(const AxisymGrid& g, const DegeneracyPoint& dp) {
  BranchOrigin o;
  o.p_bar = dp.p_bar;
  o.p_bar_discrete = sector_crossing(g, dp.p_bar);
  o.radial = g.embed_radial(discrete_radial_solution(g, o.p_bar_discrete));
  const SectorEigen se = sector_eigen(g, o.p_bar_discrete, o.radial, 1);
  o.kernel = Eigen::VectorXd::Zero(g.unknowns());
  for (int i = 1; i + 1 < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j) o.kernel(g.index(i, j)) = se.vector[i] * g.ang_modes(j, 1);
  o.kernel /= weighted_norm(g, o.kernel);
  return o;
}

namespace {

// Newton on F(u, p) = 0 plus one linear constraint cᵤ·u + c_p·p = target.
struct BorderedResult {
  bool ok = false;
  Eigen::VectorXd u;
  double p = 0.0;
  int iterations = 0;
  double residual = 0.0;
  double constraint = 0.0;
};

BorderedResult bordered_newton(const AxisymGrid& g, Eigen::VectorXd u, double p, const Eigen::VectorXd& cu, double cp,
                               double target, double tol, int max_iter) {
  const int n = g.unknowns();
  BorderedResult out;
  double last = std::numeric_limits<double>::infinity();
  for (int it = 0; it <= max_iter; ++it) {
    const ResidualField res = residual(g, p, u);
    const double con = cu.dot(u) + cp * p - target;
    out.iterations = it;
    out.residual = res.norm;
    out.constraint = con;
    if (!std::isfinite(res.norm) || !(p > 1.0)) return out;
    if (res.norm < tol && std::abs(con) <= 1e-12 * (std::abs(target) + 1.0)) {
      out.ok = true;
      out.u = std::move(u);
      out.p = p;
      return out;
    }
    if (it == max_iter || (it > 2 && res.norm > 10.0 * last)) return out;
    last = res.norm;
    const SpMat J = jacobian(g, p, u);
    const Eigen::VectorXd fp = residual_dp(g, p, u);
    std::vector<Triplet> trip;
    trip.reserve(J.nonZeros() + 2 * n + 1);
    for (int c = 0; c < J.outerSize(); ++c)
      for (SpMat::InnerIterator e(J, c); e; ++e) trip.emplace_back(e.row(), e.col(), e.value());
    for (int i = 0; i < n; ++i) {
      if (fp(i) != 0.0) trip.emplace_back(i, n, fp(i));
      if (cu(i) != 0.0) trip.emplace_back(n, i, cu(i));
    }
    trip.emplace_back(n, n, cp);
    SpMat A(n + 1, n + 1);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) return out;
    Eigen::VectorXd rhs(n + 1);
    rhs.head(n) = res.weak;
    rhs(n) = con;
    const Eigen::VectorXd d = lu.solve(rhs);
    if (!d.allFinite()) return out;
    u -= d.head(n);
    p -= d(n);
  }
  return out;
}

}  // namespace

Branch continue_branch(const AxisymGrid& g, const BranchOrigin& origin, const ContinuationOptions& opt) {
  Branch br;
  br.origin = origin;
  const Eigen::VectorXd& D = g.mass();
  const Eigen::VectorXd& u0 = origin.radial;
  const double sigma2 = u0.cwiseProduct(D).dot(u0);
  const double sup0 = u0.cwiseAbs().maxCoeff();

  // branch switch: ⟨φ, u − u₀⟩_M = ε ‖u₀‖∞, p free
  const Eigen::VectorXd cphi = D.cwiseProduct(origin.kernel);
  BorderedResult first;
  double eps = opt.epsilon;
  for (int attempt = 0; attempt < 3; ++attempt, eps *= 0.5) {
    const double amp = eps * sup0;
    first = bordered_newton(g, u0 + amp * origin.kernel, origin.p_bar_discrete, cphi, 0.0, cphi.dot(u0) + amp,
                            opt.tol, 30);
    if (first.ok) {
      const AxisymState st = make_state(g, first.p, first.u);
      if (st.positive && st.asymmetry > 0.0) break;
      first.ok = false;
    }
  }
  if (!first.ok) throw Error(ErrorCode::immediate_failure, "branch switch failed for three amplitudes");
  br.epsilon = eps;

  auto wdot = [&](const Eigen::VectorXd& a, double pa, const Eigen::VectorXd& b, double pb) {
    return a.cwiseProduct(D).dot(b) / sigma2 + pa * pb;
  };
  auto wdist = [&](const Eigen::VectorXd& a, double pa, const Eigen::VectorXd& b, double pb) {
    const Eigen::VectorXd du = a - b;
    return std::sqrt(wdot(du, pa - pb, du, pa - pb));
  };

  BranchPoint bp;
  bp.p = first.p;
  bp.state = make_state(g, first.p, first.u);
  bp.s = wdist(first.u, first.p, u0, origin.p_bar_discrete);
  bp.newton_iterations = first.iterations;
  br.points.push_back(bp);

  Eigen::VectorXd prev_u = u0, cur_u = first.u;
  double prev_p = origin.p_bar_discrete, cur_p = first.p;
  double ds = opt.step;
  int last_dir = 0;
  br.termination = Termination::step_limit;
  while (static_cast<int>(br.points.size()) < opt.max_steps) {
    const double chord = wdist(cur_u, cur_p, prev_u, prev_p);
    const Eigen::VectorXd tu = (cur_u - prev_u) / chord;
    const double tp = (cur_p - prev_p) / chord;
    const Eigen::VectorXd cu = D.cwiseProduct(tu) / sigma2;
    BorderedResult next;
    AxisymState st;
    bool accepted = false;
    std::string why;
    while (ds >= opt.min_step) {
      const double target = cu.dot(cur_u) + tp * cur_p + ds;
      next = bordered_newton(g, cur_u + ds * tu, cur_p + ds * tp, cu, tp, target, opt.tol, 8);
      if (next.ok) {
        st = make_state(g, next.p, next.u);
        if (st.positive && st.asymmetry > 0.0 && st.residual_norm < opt.accept_tol) {
          accepted = true;
          break;
        }
        why = st.positive ? "zero asymmetry" : "lost positivity";
      } else {
        why = "corrector did not converge";
      }
      ds *= 0.5;
    }
    if (!accepted) {
      br.termination = Termination::residual_failure;
      br.detail = why + " at the minimum step";
      break;
    }
    BranchPoint pt;
    pt.p = next.p;
    pt.newton_iterations = next.iterations;
    const double along = wdot(tu, tp, next.u - cur_u, next.p - cur_p);
    pt.arclength_defect = std::abs(along - ds) / ds;
    pt.s = br.points.back().s + ds;
    pt.state = std::move(st);
    br.points.push_back(std::move(pt));
    const int dir = next.p > cur_p ? 1 : -1;
    if (last_dir != 0 && dir != last_dir) ++br.folds;
    last_dir = dir;
    prev_u = std::move(cur_u);
    prev_p = cur_p;
    cur_u = std::move(next.u);
    cur_p = next.p;
    if (next.iterations <= 3) ds = std::min(1.5 * ds, opt.max_step);
    if (br.folds > opt.max_folds) {
      br.termination = Termination::fold_count_limit;
      break;
    }
    const BranchPoint& last = br.points.back();
    if (last.state.asymmetry < opt.radial_return_tol * weighted_norm(g, last.state.values)) {
      br.termination = Termination::returned_to_radial;
      br.detail = "p = " + std::to_string(last.p);
      break;
    }
  }
  br.sup_norm_min = br.sup_norm_max = br.points.front().state.sup_norm;
  br.c1_norm_min = br.c1_norm_max = br.points.front().state.c1_norm;
  for (const auto& pt : br.points) {
    br.sup_norm_min = std::min(br.sup_norm_min, pt.state.sup_norm);
    br.sup_norm_max = std::max(br.sup_norm_max, pt.state.sup_norm);
    br.c1_norm_min = std::min(br.c1_norm_min, pt.state.c1_norm);
    br.c1_norm_max = std::max(br.c1_norm_max, pt.state.c1_norm);
  }
  return br;
}

}  // namespace henon
