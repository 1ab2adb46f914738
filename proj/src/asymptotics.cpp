#include "henon/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/parallel.hpp"
#include "henon/spectral.hpp"

namespace henon {

namespace {

struct MeshEigen {
  double lambda = 0.0;
  std::vector<double> phi;
};

// First weighted eigenpair on a given mesh, φ(0) = 1.
MeshEigen first_eigen_on_mesh(int N, double alpha, std::vector<double> mesh) {
  SturmLiouvilleProblem sl;
  sl.N = N;
  sl.alpha = alpha;
  sl.mu = 0.0;
  sl.origin = OriginCondition::neumann;
  sl.rho.assign(mesh.size(), 1.0);
  sl.mesh = std::move(mesh);
  SturmLiouvilleSolution sol = solve_sturm_liouville(sl, 1);
  MeshEigen out{sol.eigenvalues[0], std::move(sol.eigenfunctions[0])};
  const double at0 = out.phi[0];
  for (double& v : out.phi) v /= at0;
  return out;
}

double mode_eigenvalue_on_mesh(int N, double alpha, int i, int k, std::vector<double> mesh) {
  SturmLiouvilleProblem sl;
  sl.N = N;
  sl.alpha = alpha;
  sl.mu = angular_eigenvalue(k, N);
  sl.origin = k == 0 ? OriginCondition::neumann : OriginCondition::dirichlet;
  sl.rho.assign(mesh.size(), 1.0);
  sl.mesh = std::move(mesh);
  return solve_sturm_liouville(sl, i).eigenvalues[i - 1];
}

const std::vector<ModeIndex> kRatioModes{{2, 0}, {1, 1}, {1, 2}};

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] < xs[i - 1])) return false;
  return true;
}

}  // namespace

WeightedEigenpair weighted_first_eigen(int N, double alpha, double R, int mesh_points) {
  if (!(R > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
  critical_exponent(N, alpha);  // validates (N, α)
  auto scaled = [R](std::vector<double> m) {
    for (double& r : m) r *= R;
    m.back() = R;
    return m;
  };
  MeshEigen coarse = first_eigen_on_mesh(N, alpha, scaled(graded_mesh(mesh_points, 0.5)));
  MeshEigen fine = first_eigen_on_mesh(N, alpha, scaled(graded_mesh(2 * mesh_points - 1, 0.5)));
  WeightedEigenpair out;
  out.N = N;
  out.alpha = alpha;
  out.R = R;
  out.lambda_1_unextrapolated = coarse.lambda;
  out.lambda_1 = (4.0 * fine.lambda - coarse.lambda) / 3.0;
  out.mesh = scaled(graded_mesh(mesh_points, 0.5));
  out.phi_1 = std::move(coarse.phi);
  return out;
}

double weighted_mode_eigenvalue(int N, double alpha, int i, int k, int mesh_points) {
  if (i < 1 || k < 0) throw Error(ErrorCode::invalid_argument, "mode index out of range");
  const double coarse = mode_eigenvalue_on_mesh(N, alpha, i, k, graded_mesh(mesh_points, 0.5));
  const double fine = mode_eigenvalue_on_mesh(N, alpha, i, k, graded_mesh(2 * mesh_points - 1, 0.5));
  return (4.0 * fine - coarse) / 3.0;
}

double limit_profile(int N, double alpha, double x) {
  const HenonParams hp = HenonParams::make(N, alpha, 2.0);
  return std::pow(1.0 + hp.C_alpha * std::pow(x, 2.0 + alpha), -(N - 2.0) / (2.0 + alpha));
}

PToOneReport verify_p_to_1(int N, double alpha, const std::vector<double>& p_list, const RadialOptions& options) {
  if (p_list.size() < 2) throw Error(ErrorCode::invalid_argument, "p_list needs at least two exponents");
  PToOneReport rep;
  rep.N = N;
  rep.alpha = alpha;
  rep.lambda_1 = weighted_first_eigen(N, alpha, 1.0, options.mesh_points).lambda_1;
  rep.modes = kRatioModes;
  for (const ModeIndex& m : rep.modes)
    rep.limit_ratios.push_back(weighted_mode_eigenvalue(N, alpha, m.i, m.k, options.mesh_points) / rep.lambda_1);
  rep.rows.resize(p_list.size());
  parallel_for(p_list.size(), [&](std::size_t i) {
    const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, p_list[i]), options);
    const MeshEigen phi = first_eigen_on_mesh(N, alpha, prof.mesh);
    PToOneRow& row = rep.rows[i];
    row.p = p_list[i];
    row.sup_pow = prof.weight_scale();
    row.deviation = std::abs(row.sup_pow - rep.lambda_1) / rep.lambda_1;
    for (std::size_t j = 0; j < prof.size(); ++j)
      row.sup_distance = std::max(row.sup_distance, std::abs(prof.u_hat[j] - phi.phi[j]));
    row.morse_index = morse_index(prof).morse_index;
    row.log_sup_norm = prof.log_sup_norm;
    for (const ModeIndex& m : rep.modes)
      row.lambdas.push_back(solve_mode_spectrum(make_mode_problem(prof, m.k), m.i).eigenvalues[m.i - 1]);
  });
  std::vector<double> dev, dist;
  for (const auto& r : rep.rows) {
    dev.push_back(r.deviation);
    dist.push_back(r.sup_distance);
  }
  rep.deviation_decreasing = strictly_decreasing(dev);
  rep.distance_decreasing = strictly_decreasing(dist);
  rep.non_convergent = !rep.deviation_decreasing;
  // sup_pow is analytic in p − 1; drop the linear term using the last two rows
  const PToOneRow& a = rep.rows[rep.rows.size() - 2];
  const PToOneRow& b = rep.rows.back();
  const double ha = a.p - 1.0, hb = b.p - 1.0;
  rep.extrapolated = (ha * b.sup_pow - hb * a.sup_pow) / (ha - hb);
  rep.extrapolated_error = std::abs(rep.extrapolated - rep.lambda_1) / rep.lambda_1;
  return rep;
}

RescaledProfile rescale_profile(const RadialProfile& profile, double window, int window_points) {
  if (!(window > 0.0) || window_points < 2) throw Error(ErrorCode::invalid_argument, "bad comparison window");
  const int N = profile.params.N;
  const double alpha = profile.params.alpha;
  RescaledProfile out;
  out.p = profile.params.p;
  out.mu_p = profile.R0;
  out.window = window;
  out.x.resize(profile.size());
  out.u_tilde = profile.u_hat;
  double excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < profile.size(); ++i) {
    out.x[i] = profile.mesh[i] * out.mu_p;
    excess = std::max(excess, out.u_tilde[i] - limit_profile(N, alpha, out.x[i]));
  }
  out.x.back() = out.mu_p;

  std::vector<double> xs, inside;
  for (int i = 0; i < window_points; ++i) {
    const double x = window * i / (window_points - 1);
    xs.push_back(x);
    if (x < out.mu_p) inside.push_back(x);
  }
  std::vector<double> vals(xs.size(), 0.0);
  if (profile.normalized && !inside.empty()) {
    const auto s = profile.normalized->sample(inside);
    std::copy(s.v.begin(), s.v.end(), vals.begin());
  } else {
    for (std::size_t i = 0; i < inside.size(); ++i)
      vals[i] = interp_linear(out.x, out.u_tilde, inside[i]);
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double U = limit_profile(N, alpha, xs[i]);
    out.sup_distance = std::max(out.sup_distance, std::abs(vals[i] - U));
    excess = std::max(excess, vals[i] - U);
  }
  out.max_excess = excess;
  out.bounded_by_U = excess <= kBoundTol;
  return out;
}

double emden_fowler_t(int N, double alpha, double x) {
  const double n2 = N - 2.0;
  return std::pow(n2, 2.0 * n2 / (2.0 + alpha)) * std::pow(x, -n2);
}

double emden_fowler_bound(int N, double alpha, double t) {
  const double kappa = HenonParams::make(N, alpha, 2.0).kappa;
  return std::pow(1.0 + 1.0 / ((kappa - 1.0) * std::pow(t, kappa - 2.0)), -1.0 / (kappa - 2.0));
}

EmdenFowlerSeries emden_fowler(const RescaledProfile& rescaled, const HenonParams& params) {
  const int N = params.N;
  const double alpha = params.alpha;
  EmdenFowlerSeries out;
  out.kappa = params.kappa;
  out.c = std::pow(N - 2.0, 2.0 * (N - 2.0) / (2.0 + alpha));
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rescaled.x.size(); ++i) {
    const double x = rescaled.x[i];
    if (!(x > 0.0)) continue;
    const double t = emden_fowler_t(N, alpha, x);
    const double b = emden_fowler_bound(N, alpha, t);
    out.t.push_back(t);
    out.y.push_back(rescaled.u_tilde[i]);
    out.bound.push_back(b);
    worst = std::max(worst, rescaled.u_tilde[i] - b);
  }
  out.max_violation = worst;
  out.bounded = worst <= kBoundTol;
  out.y_at_largest_t = out.y.empty() ? 0.0 : out.y.front();
  return out;
}

double pullback_identity_error(int N, double alpha, const std::vector<double>& radii) {
  double err = 0.0;
  for (double x : radii) {
    const double U = limit_profile(N, alpha, x);
    const double b = emden_fowler_bound(N, alpha, emden_fowler_t(N, alpha, x));
    err = std::max(err, std::abs(b - U) / U);
  }
  return err;
}

BlowupReport blowup_table(int N, double alpha, const std::vector<double>& p_list, const RadialOptions& options) {
  BlowupReport rep;
  rep.rows.resize(p_list.size());
  parallel_for(p_list.size(), [&](std::size_t i) {
    const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, p_list[i]), options);
    BlowupRow& row = rep.rows[i];
    row.p = p_list[i];
    row.log_sup_norm = prof.log_sup_norm;
    row.sup_norm = prof.sup_norm;
    row.R0 = prof.R0;
    const double predicted = (2.0 + alpha) / (p_list[i] - 1.0) * std::log(prof.R0);
    row.scaling_error = std::abs(row.log_sup_norm - predicted) / std::abs(row.log_sup_norm);
  });
  const std::size_t tail = std::min<std::size_t>(3, rep.rows.size());
  rep.tail_increasing = true;
  for (std::size_t i = rep.rows.size() - tail + 1; i < rep.rows.size(); ++i)
    if (!(rep.rows[i].log_sup_norm > rep.rows[i - 1].log_sup_norm)) rep.tail_increasing = false;
  return rep;
}

PToCriticalReport verify_p_to_critical(int N, double alpha, const std::vector<double>& p_list,
                                       const RadialOptions& options) {
  PToCriticalReport rep;
  rep.profiles.resize(p_list.size());
  parallel_for(p_list.size(), [&](std::size_t i) {
    rep.profiles[i] = rescale_profile(solve_radial(HenonParams::make(N, alpha, p_list[i]), options));
  });
  rep.all_bounded = std::all_of(rep.profiles.begin(), rep.profiles.end(),
                                [](const RescaledProfile& r) { return r.bounded_by_U; });
  std::vector<double> dist;
  for (const auto& r : rep.profiles) dist.push_back(r.sup_distance);
  rep.distance_decreasing = strictly_decreasing(dist);
  return rep;
}

}  // namespace henon
