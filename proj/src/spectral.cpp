#include "henon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/ode.hpp"

namespace henon {

double angular_eigenvalue(int k, int N) { return static_cast<double>(k) * (k + N - 2); }

long long multiplicity(int k, int N) {
  if (k < 0 || N < 2) throw Error(ErrorCode::invalid_argument, "multiplicity needs k >= 0, N >= 2");
  if (k == 0) return 1;
  if (k == 1) return N;
  // dim H_k(S^{N−1}) = C(k+N−1, N−1) − C(k+N−3, N−1)
  auto binom = [](long long n, long long r) -> long long {
    if (r < 0 || n < r) return 0;
    long long out = 1;
    for (long long j = 1; j <= r; ++j) out = out * (n - r + j) / j;
    return out;
  };
  return binom(k + N - 1, N - 1) - binom(k + N - 3, N - 1);
}

RadialMatrices radial_matrices(int N, double alpha, std::span<const double> mesh) {
  const std::size_t n = mesh.size();
  if (n < 3) throw Error(ErrorCode::invalid_argument, "radial mesh needs at least three nodes");
  static const GaussRule gauss = gauss_legendre(4);
  RadialMatrices m;
  m.stiff_diag.assign(n, 0.0);
  m.stiff_off.assign(n - 1, 0.0);
  m.potential.assign(n, 0.0);
  m.weight.assign(n, 0.0);
  m.mass.assign(n, 0.0);
  const double e_pot = N - 3.0, e_wt = N - 1.0 + alpha, e_mass = N - 1.0;
  for (std::size_t e = 0; e + 1 < n; ++e) {
    const double r0 = mesh[e], r1 = mesh[e + 1];
    const double h = r1 - r0;
    if (!(h > 0.0)) throw Error(ErrorCode::invalid_argument, "mesh must be strictly increasing");
    const double mid = 0.5 * (r0 + r1), half = 0.5 * h;
    double stiff = 0.0;
    for (std::size_t g = 0; g < gauss.nodes.size(); ++g) {
      const double r = mid + half * gauss.nodes[g];
      const double wq = half * gauss.weights[g];
      const double phi0 = (r1 - r) / h, phi1 = (r - r0) / h;
      const double pot = std::pow(r, e_pot), wt = std::pow(r, e_wt), ms = std::pow(r, e_mass);
      stiff += wq * ms;
      m.potential[e] += wq * pot * phi0;
      m.potential[e + 1] += wq * pot * phi1;
      m.weight[e] += wq * wt * phi0;
      m.weight[e + 1] += wq * wt * phi1;
      m.mass[e] += wq * ms * phi0;
      m.mass[e + 1] += wq * ms * phi1;
    }
    stiff /= h * h;
    m.stiff_diag[e] += stiff;
    m.stiff_diag[e + 1] += stiff;
    m.stiff_off[e] = -stiff;
  }
  return m;
}

DiscretePencil assemble(const SturmLiouvilleProblem& prob) {
  const std::size_t n = prob.mesh.size();
  if (n < 3 || prob.rho.size() != n) throw Error(ErrorCode::invalid_argument, "bad Sturm-Liouville mesh");
  const RadialMatrices rm = radial_matrices(prob.N, prob.alpha, prob.mesh);
  const std::size_t first = prob.origin == OriginCondition::neumann ? 0 : 1;
  const std::size_t last = n - 2;  // ψ = 0 at the outer node
  std::vector<double> d, o, m;
  for (std::size_t i = first; i <= last; ++i) {
    d.push_back(rm.stiff_diag[i] + prob.mu * rm.potential[i]);
    m.push_back(prob.rho[i] * rm.weight[i]);
    if (i < last) o.push_back(rm.stiff_off[i]);
  }
  return {TridiagonalPencil(std::move(d), std::move(o), std::move(m)), first};
}

int count_sign_changes(const std::vector<double>& psi) {
  double amax = 0.0;
  for (double v : psi) amax = std::max(amax, std::abs(v));
  const double floor = 1e-10 * amax;
  int changes = 0, last_sign = 0;
  for (double v : psi) {
    if (std::abs(v) <= floor) continue;
    const int s = v > 0.0 ? 1 : -1;
    if (last_sign != 0 && s != last_sign) ++changes;
    last_sign = s;
  }
  return changes;
}

SturmLiouvilleSolution solve_sturm_liouville(const SturmLiouvilleProblem& problem, int num_eigs) {
  if (num_eigs < 1) throw Error(ErrorCode::invalid_argument, "num_eigs must be >= 1");
  const DiscretePencil dp = assemble(problem);
  const TridiagonalPencil& pen = dp.pencil;
  if (static_cast<std::size_t>(num_eigs) > pen.size())
    throw Error(ErrorCode::invalid_argument, "more eigenvalues requested than unknowns");
  const auto mass = pen.mass();
  SturmLiouvilleSolution out;
  std::vector<std::vector<double>> reduced;
  for (int i = 1; i <= num_eigs; ++i) {
    const double lambda = pen.eigenvalue(i);
    std::vector<double> x = pen.eigenvector(lambda);
    // eigenvalues are simple; this only removes roundoff
    for (const auto& y : reduced) {
      double dot = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) dot += mass[j] * x[j] * y[j];
      for (std::size_t j = 0; j < x.size(); ++j) x[j] -= dot * y[j];
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) norm += mass[j] * x[j] * x[j];
    norm = std::sqrt(norm);
    double amax = 0.0;
    for (double v : x) amax = std::max(amax, std::abs(v));
    double sign = 1.0;
    for (double v : x)
      if (std::abs(v) > 1e-3 * amax) {
        sign = v > 0.0 ? 1.0 : -1.0;
        break;
      }
    for (double& v : x) v *= sign / norm;

    const std::vector<double> res = pen.apply(x, lambda);
    const std::vector<double> ax = pen.apply(x, 0.0);
    double rmax = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      rmax = std::max(rmax, std::abs(res[j]));
      scale = std::max(scale, std::abs(ax[j]) + std::abs(lambda * mass[j] * x[j]));
    }
    std::vector<double> full(problem.mesh.size(), 0.0);
    std::copy(x.begin(), x.end(), full.begin() + static_cast<std::ptrdiff_t>(dp.first_node));
    out.eigenvalues.push_back(lambda);
    out.eigenfunctions.push_back(std::move(full));
    out.residuals.push_back(scale > 0.0 ? rmax / scale : rmax);
    reduced.push_back(std::move(x));
  }
  return out;
}

ModeProblem make_mode_problem(const RadialProfile& profile, int k) {
  if (k < 0) throw Error(ErrorCode::invalid_argument, "mode index must be >= 0");
  ModeProblem mp;
  mp.profile = profile;
  mp.k = k;
  mp.mu_k = angular_eigenvalue(k, profile.params.N);
  mp.origin = k == 0 ? OriginCondition::neumann : OriginCondition::dirichlet;
  return mp;
}

SturmLiouvilleProblem to_sturm_liouville(const ModeProblem& problem) {
  const RadialProfile& prof = problem.profile;
  SturmLiouvilleProblem sl;
  sl.N = prof.params.N;
  sl.alpha = prof.params.alpha;
  sl.mu = problem.mu_k;
  sl.origin = problem.origin;
  sl.mesh = prof.mesh;
  sl.rho.resize(prof.size());
  const double scale = prof.params.p * prof.weight_scale();
  for (std::size_t i = 0; i < prof.size(); ++i)
    sl.rho[i] = scale * std::pow(std::max(prof.u_hat[i], 0.0), prof.params.p - 1.0);
  // the outer node carries no unknown; keep the weight positive for assembly
  return sl;
}

namespace {

bool residuals_ok(const SturmLiouvilleSolution& sol, double tol) {
  return std::all_of(sol.residuals.begin(), sol.residuals.end(), [tol](double r) { return r <= tol; });
}

}  // namespace

ModeSpectrum solve_mode_spectrum(const ModeProblem& problem, int num_eigs, const SpectrumOptions& options) {
  ModeSpectrum out;
  out.p = problem.profile.params.p;
  out.k = problem.k;
  out.mu_k = problem.mu_k;
  ModeProblem base = problem;
  SturmLiouvilleSolution coarse = solve_sturm_liouville(to_sturm_liouville(base), num_eigs);
  if (!residuals_ok(coarse, options.residual_tol)) {
    base.profile = problem.profile.refined();
    coarse = solve_sturm_liouville(to_sturm_liouville(base), num_eigs);
    if (!residuals_ok(coarse, options.residual_tol))
      throw Error(ErrorCode::discretization_failure, "eigenpair residual above tolerance after refinement");
  }
  out.mesh = base.profile.mesh;
  out.unextrapolated = coarse.eigenvalues;
  out.eigenvalues = coarse.eigenvalues;
  out.eigenfunctions = std::move(coarse.eigenfunctions);
  out.residuals = std::move(coarse.residuals);
  for (const auto& psi : out.eigenfunctions) out.zero_counts.push_back(count_sign_changes(psi));
  if (options.extrapolate) {
    ModeProblem fine = base;
    fine.profile = base.profile.refined();
    const DiscretePencil fp = assemble(to_sturm_liouville(fine));
    for (int i = 0; i < num_eigs; ++i) {
      const double lf = fp.pencil.eigenvalue(i + 1);
      out.eigenvalues[i] = (4.0 * lf - coarse.eigenvalues[i]) / 3.0;
    }
  }
  return out;
}

// -- Prüfer -------------------------------------------------------------------

namespace {

using ode::State;

struct PruferRhs {
  double n2;        // N − 2
  double m;         // 2 + α
  double p;         // profile exponent (ignored without profile)
  double mu;
  double lambda_w;  // spectral parameter times the constant weight factor
  bool with_profile;
  State<3> operator()(double s, const State<3>& y) const {
    const double xm = std::exp(m * s);
    double vpm1 = 1.0;
    State<3> d{0.0, 0.0, 0.0};
    if (with_profile) {
      const double av = std::abs(y[0]);
      vpm1 = av > 0.0 ? std::pow(av, p - 1.0) : 0.0;
      d[0] = y[1];
      d[1] = -n2 * y[1] - xm * vpm1 * y[0];
    }
    const double c = mu - lambda_w * xm * vpm1;
    const double st = std::sin(y[2]), ct = std::cos(y[2]);
    d[2] = ct * ct + n2 * st * ct - c * st * st;
    return d;
  }
};

double run_prufer(const PruferRhs& rhs, int k, int N, double alpha, double x_end) {
  const double x0 = std::min(kSeriesStart, 1e-6 * x_end);
  const double m = 2.0 + alpha;
  const double xm = std::pow(x0, m);
  const double na = N + alpha;
  State<3> y0{1.0, 0.0, 0.0};
  if (rhs.with_profile) {
    y0[0] = 1.0 - xm / (m * na);
    y0[1] = -xm / na;
  }
  // regular solution ψ ~ x^k: η/ψ = x ψ'/ψ
  const double ratio = k == 0 ? -rhs.lambda_w * xm / na : static_cast<double>(k);
  y0[2] = std::atan2(1.0, ratio);
  ode::Tolerance<3> tol{1e-11, {1e-17, 0.0, 1e-12}};
  ode::AdaptiveStepper<3, PruferRhs> stepper(rhs, std::log(x0), y0, tol, 1e-2);
  const double s_end = std::log(x_end);
  while (stepper.t() < s_end) {
    stepper.step(s_end);
    if (stepper.accepted() > 5'000'000) throw Error(ErrorCode::integration_failure, "Prufer integration stalled");
  }
  return stepper.y()[2];
}

template <class AngleFn>
double eigenvalue_from_angle(AngleFn angle, int i) {
  if (i < 1) throw Error(ErrorCode::invalid_argument, "eigenvalue index must be >= 1");
  const double target = i * std::numbers::pi;
  double lo = 0.0, hi = 1.0;
  double fhi = angle(hi) - target;
  for (int it = 0; fhi <= 0.0; ++it) {
    if (it > 200) throw Error(ErrorCode::integration_failure, "cannot bracket eigenvalue");
    lo = hi;
    hi *= 2.0;
    fhi = angle(hi) - target;
  }
  double flo = angle(lo) - target;
  // Illinois regula falsi on the monotone angle
  int side = 0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double x = (lo * fhi - hi * flo) / (fhi - flo);
    const double fx = angle(x) - target;
    if (fx == 0.0) return x;
    if (fx > 0.0) {
      hi = x;
      fhi = fx;
      if (side == 1) flo *= 0.5;
      side = 1;
    } else {
      lo = x;
      flo = fx;
      if (side == -1) fhi *= 0.5;
      side = -1;
    }
    if (std::abs(fx) < 1e-13) return x;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double prufer_angle(const ModeProblem& problem, double lambda) {
  const HenonParams& hp = problem.profile.params;
  PruferRhs rhs{hp.N - 2.0, 2.0 + hp.alpha, hp.p, problem.mu_k, lambda * hp.p, true};
  return run_prufer(rhs, problem.k, hp.N, hp.alpha, problem.profile.R0);
}

int prufer_count(const ModeProblem& problem, double threshold) {
  if (threshold <= 0.0) return 0;
  return static_cast<int>(std::floor(prufer_angle(problem, threshold) / std::numbers::pi));
}

double prufer_eigenvalue(const ModeProblem& problem, int i) {
  return eigenvalue_from_angle([&](double l) { return prufer_angle(problem, l); }, i);
}

double prufer_weighted_angle(int N, double alpha, double R, double lambda) {
  PruferRhs rhs{N - 2.0, 2.0 + alpha, 1.0, 0.0, lambda, false};
  return run_prufer(rhs, 0, N, alpha, R);
}

double prufer_weighted_eigenvalue(int N, double alpha, double R, int i) {
  return eigenvalue_from_angle([&](double l) { return prufer_weighted_angle(N, alpha, R, l); }, i);
}

// -- Morse index --------------------------------------------------------------

MorseReport morse_index(const RadialProfile& profile, int k_max, const SpectrumOptions& options) {
  if (k_max < 2) throw Error(ErrorCode::invalid_argument, "k_max must be >= 2");
  const int N = profile.params.N;
  MorseReport rep;
  rep.p = profile.params.p;
  for (int k = 0; k <= k_max; ++k) {
    const ModeProblem mp = make_mode_problem(profile, k);
    int num = k <= 1 ? 2 : 1;
    ModeSpectrum ms = solve_mode_spectrum(mp, num, options);
    while (ms.eigenvalues.back() < 1.0) {
      num *= 2;
      ms = solve_mode_spectrum(mp, num, options);
    }
    int below = 0;
    for (double l : ms.eigenvalues) below += l < 1.0 ? 1 : 0;
    rep.lambda_1k.push_back(ms.eigenvalues.front());
    rep.negative_counts.push_back(below);
    rep.morse_index += static_cast<int>(multiplicity(k, N)) * below;
  }
  rep.lambda_11 = rep.lambda_1k[1];
  rep.morse_index_shortcut = rep.lambda_11 >= 1.0 ? 1 : N + 1;
  rep.degenerate = std::abs(rep.lambda_11 - 1.0) < kDegeneracyTol;
  if (!(rep.lambda_1k.back() > 1.0))
    throw Error(ErrorCode::truncation_uncertified,
                "Lambda_{1,k_max} <= 1; raise k_max (k_max=" + std::to_string(k_max) + ")");
  return rep;
}

}  // namespace henon
