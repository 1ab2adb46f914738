#include "henon/radial.hpp"

#include <algorithm>
#include <cmath>

#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/ode.hpp"

namespace henon {
namespace {

using ode::State;

// State (v, w, E) in s = log x with w = x v'(x) and
// E = p x^{2−N} ∫₀^x t^{N+α} v^{p−1}(−v') dt, so that 1 − g = E / ((N+α)(−w)).
struct NormalizedRhs {
  double n2;  // N − 2
  double m;   // 2 + α
  double p;
  State<3> operator()(double s, const State<3>& y) const {
    const double xm = std::exp(m * s);
    const double av = std::abs(y[0]);
    const double vpm1 = av > 0.0 ? std::pow(av, p - 1.0) : 0.0;
    return {y[1], -n2 * y[1] - xm * vpm1 * y[0], -n2 * y[2] - p * xm * vpm1 * y[1]};
  }
};

State<3> series_start(const HenonParams& hp, double x) {
  const double m = 2.0 + hp.alpha;
  const double xm = std::pow(x, m);
  const double na = hp.N + hp.alpha;
  return {1.0 - xm / (m * na), -xm / na, hp.p * xm * xm / (na * (hp.N + 2.0 + 2.0 * hp.alpha))};
}

ode::Tolerance<3> ivp_tolerance(double tol) {
  // w and E keep one sign up to the first zero, so they are controlled purely
  // relatively; v needs an absolute floor because it crosses zero.
  return {tol, {tol * 1e-6, 0.0, 0.0}};
}

using Stepper = ode::AdaptiveStepper<3, NormalizedRhs>;

Stepper make_stepper(const HenonParams& hp, double r_start, double tol) {
  NormalizedRhs rhs{hp.N - 2.0, 2.0 + hp.alpha, hp.p};
  return Stepper(rhs, std::log(r_start), series_start(hp, r_start), ivp_tolerance(tol), 1e-2);
}

// Locates v = 0 inside the step taken from `prev` to `next` (v changes sign).
// Cubic Hermite root first, then secant iterations on the exact RK step map.
double refine_zero(const Stepper& prev, const Stepper& next, State<3>& y_zero) {
  const double sa = prev.t(), sb = next.t();
  const double h = sb - sa;
  const double va = prev.y()[0], wa = prev.y()[1];
  const double vb = next.y()[0], wb = next.y()[1];
  auto hermite = [&](double tau) {
    const double t2 = tau * tau, t3 = t2 * tau;
    return (2 * t3 - 3 * t2 + 1) * va + (t3 - 2 * t2 + tau) * h * wa + (-2 * t3 + 3 * t2) * vb +
           (t3 - t2) * h * wb;
  };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (hermite(mid) > 0.0 ? lo : hi) = mid;
  }
  double x0 = 0.5 * (lo + hi) * h;
  double f0 = prev.probe(x0)[0];
  double x1 = x0 * (1.0 + 1e-6);
  double f1 = prev.probe(x1)[0];
  for (int it = 0; it < 20 && f1 != 0.0 && f1 != f0; ++it) {
    const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
    x0 = x1;
    f0 = f1;
    x1 = std::clamp(x2, 0.0, h);
    f1 = prev.probe(x1)[0];
    if (std::abs(x1 - x0) <= 1e-15 * std::max(1.0, std::abs(sa))) break;
  }
  y_zero = prev.probe(x1);
  return sa + x1;
}

}  // namespace

NormalizedProfile integrate_normalized(const HenonParams& params, double r_max, double tol) {
  if (!(params.p > 1.0)) throw Error(ErrorCode::invalid_exponent, "p must exceed 1");
  if (!(r_max > kSeriesStart)) throw Error(ErrorCode::invalid_argument, "r_max must exceed the series start");
  if (!(tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");

  NormalizedProfile out;
  out.params = params;
  out.r_start = kSeriesStart;
  out.tol = tol;

  Stepper stepper = make_stepper(params, out.r_start, tol);
  auto record = [&](double s, const State<3>& y) {
    const double x = std::exp(s);
    out.mesh.push_back(x);
    out.v.push_back(y[0]);
    out.v_prime.push_back(y[1] / x);
  };
  record(stepper.t(), stepper.y());

  const double s_end = std::log(r_max);
  const std::size_t max_steps = 2'000'000;
  while (stepper.t() < s_end) {
    if (stepper.accepted() > max_steps)
      throw Error(ErrorCode::step_failure, "normalized IVP exceeded the step budget");
    const Stepper prev = stepper;
    stepper.step(s_end);
    const State<3>& y = stepper.y();
    if (!std::isfinite(y[0]) || !std::isfinite(y[1]))
      throw Error(ErrorCode::step_failure, "normalized IVP produced a non-finite value");
    if (y[0] <= 0.0) {
      State<3> yz;
      const double sz = refine_zero(prev, stepper, yz);
      const double xz = std::exp(sz);
      out.first_zero = xz;
      out.v_prime_at_zero = yz[1] / xz;
      out.mesh.push_back(xz);
      out.v.push_back(0.0);
      out.v_prime.push_back(out.v_prime_at_zero);
      return out;
    }
    // A tangential touch cannot happen analytically; treat it as a zero.
    if (y[1] >= 0.0 && y[0] < tol) {
      const double xz = std::exp(stepper.t());
      out.first_zero = xz;
      out.v_prime_at_zero = y[1] / xz;
      out.mesh.push_back(xz);
      out.v.push_back(0.0);
      out.v_prime.push_back(out.v_prime_at_zero);
      return out;
    }
    record(stepper.t(), y);
  }
  return out;
}

NormalizedProfile::Samples NormalizedProfile::sample(std::span<const double> xs) const {
  Samples out;
  out.v.resize(xs.size());
  out.w.resize(xs.size());
  out.defect.resize(xs.size());
  const double x_last = first_zero ? *first_zero : mesh.back();
  if (!std::is_sorted(xs.begin(), xs.end()))
    throw Error(ErrorCode::invalid_argument, "sample radii must be sorted");
  if (!xs.empty() && (xs.front() < 0.0 || xs.back() > x_last * (1.0 + 1e-13)))
    throw Error(ErrorCode::invalid_argument, "sample radius outside the integrated range");

  Stepper stepper = make_stepper(params, r_start, tol);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    if (x < r_start) {
      const State<3> y = series_start(params, x);
      out.v[i] = y[0];
      out.w[i] = y[1];
      out.defect[i] = y[2];
      continue;
    }
    const bool at_zero = first_zero && x >= *first_zero * (1.0 - 1e-14);
    const double s = at_zero ? std::log(*first_zero) : std::log(x);
    while (stepper.t() < s) stepper.step(s);
    const State<3>& y = stepper.y();
    out.v[i] = at_zero ? 0.0 : y[0];
    out.w[i] = at_zero ? v_prime_at_zero * *first_zero : y[1];
    out.defect[i] = y[2];
  }
  return out;
}

double RadialProfile::weight_scale() const { return std::pow(R0, 2.0 + params.alpha); }

namespace {
std::vector<double> scaled(const std::vector<double>& col, double factor) {
  std::vector<double> out(col.size());
  for (std::size_t i = 0; i < col.size(); ++i) out[i] = col[i] * factor;
  return out;
}
}  // namespace

std::vector<double> RadialProfile::u() const { return scaled(u_hat, sup_norm); }
std::vector<double> RadialProfile::u_prime() const { return scaled(u_hat_prime, sup_norm); }
std::vector<double> RadialProfile::w() const { return scaled(w_hat, sup_norm); }
std::vector<double> RadialProfile::z() const { return scaled(z_hat, sup_norm); }

RadialProfile::Values RadialProfile::evaluate(std::span<const double> radii) const {
  std::vector<double> xs(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) xs[i] = std::min(radii[i], 1.0) * R0;
  const NormalizedProfile::Samples s = normalized->sample(xs);
  Values out;
  out.u_hat = s.v;
  out.u_hat_prime.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.u_hat_prime[i] = xs[i] > 0.0 ? R0 * s.w[i] / xs[i] : 0.0;
  return out;
}

namespace {

RadialProfile build_profile(const HenonParams& hp, std::shared_ptr<const NormalizedProfile> np,
                            std::span<const double> mesh) {
  RadialProfile prof;
  prof.params = hp;
  prof.normalized = np;
  prof.R0 = *np->first_zero;
  prof.log_sup_norm = (2.0 + hp.alpha) / (hp.p - 1.0) * std::log(prof.R0);
  prof.sup_norm = std::exp(prof.log_sup_norm);
  prof.mesh.assign(mesh.begin(), mesh.end());
  prof.warnings = hp.warnings();

  std::vector<double> xs(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) xs[i] = prof.R0 * mesh[i];
  xs.back() = prof.R0;
  const NormalizedProfile::Samples s = np->sample(xs);
  const std::size_t n = mesh.size();
  prof.u_hat = s.v;
  prof.u_hat_prime.resize(n);
  prof.one_minus_g.resize(n);
  const double na = hp.N + hp.alpha;
  for (std::size_t i = 0; i < n; ++i) {
    prof.u_hat_prime[i] = xs[i] > 0.0 ? prof.R0 * s.w[i] / xs[i] : 0.0;
    prof.one_minus_g[i] = xs[i] > 0.0 ? s.defect[i] / (na * -s.w[i]) : 0.0;
  }
  return prof;
}

}  // namespace

RadialProfile derived_functions(RadialProfile prof) {
  const std::size_t n = prof.size();
  const HenonParams& hp = prof.params;
  const double na = hp.N + hp.alpha;
  prof.w_hat.resize(n);
  prof.z_hat.resize(n);
  prof.g.resize(n);
  if (prof.one_minus_g.size() != n) prof.one_minus_g.assign(n, std::nan(""));
  for (std::size_t i = 0; i < n; ++i) {
    const double r = prof.mesh[i];
    prof.w_hat[i] = -prof.u_hat_prime[i];
    prof.z_hat[i] = r * prof.u_hat_prime[i] + 2.0 / (hp.p - 1.0) * prof.u_hat[i];
    if (i > 0 && !(prof.w_hat[i] > 0.0))
      throw Error(ErrorCode::degenerate_profile, "-u' vanishes at r=" + std::to_string(r));
    if (i == 0) {
      prof.g[i] = 1.0;  // limit value
      prof.one_minus_g[i] = 0.0;
      continue;
    }
    // g written in the normalized variable x = R0 r
    const double x = prof.R0 * r;
    const double w_x = prof.w_hat[i] / prof.R0;  // −v'(x)
    const double direct = std::pow(x, 1.0 + hp.alpha) * std::pow(std::max(prof.u_hat[i], 0.0), hp.p) / (na * w_x);
    if (direct < 0.5 || !std::isfinite(prof.one_minus_g[i])) {
      prof.g[i] = direct;
      prof.one_minus_g[i] = 1.0 - direct;
    } else {
      prof.g[i] = 1.0 - prof.one_minus_g[i];
    }
  }
  prof.g.back() = 0.0;
  prof.one_minus_g.back() = 1.0;
  return prof;
}

double radial_residual(const RadialProfile& prof) {
  const HenonParams& hp = prof.params;
  const double a = hp.N - 1.0 + hp.alpha;
  const std::size_t n = prof.size();
  // integrand f(x) = x^{N−1+α} v^p and flux F(x) = x^{N−1} v'(x), x = R0 r
  std::vector<double> f(n), df(n), F(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = prof.R0 * prof.mesh[i];
    const double v = std::max(prof.u_hat[i], 0.0);
    const double vp = prof.u_hat_prime[i] / prof.R0;
    const double vpow = std::pow(v, hp.p - 1.0);
    f[i] = std::pow(x, a) * vpow * v;
    df[i] = (x > 0.0 ? a * std::pow(x, a - 1.0) * vpow * v : 0.0) + hp.p * std::pow(x, a) * vpow * vp;
    F[i] = std::pow(x, hp.N - 1.0) * vp;
  }
  // integrated (flux) form: x^{N−1}v'(x) + ∫₀^x t^{N−1+α}v^p dt = 0, which
  // avoids dividing roundoff by tiny cell widths near r = 1
  double worst = 0.0;
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = prof.R0 * (prof.mesh[i + 1] - prof.mesh[i]);
    cumulative += 0.5 * h * (f[i] + f[i + 1]) + h * h / 12.0 * (df[i] - df[i + 1]);
    worst = std::max(worst, std::abs(F[i + 1] + cumulative));
  }
  return worst * std::pow(prof.R0, -hp.N - hp.alpha);
}

RadialProfile solve_radial(const HenonParams& params, const RadialOptions& options) {
  if (!(params.p > 1.0)) throw Error(ErrorCode::invalid_exponent, "p must exceed 1");
  auto np = std::make_shared<const NormalizedProfile>(integrate_normalized(params, options.r_max, options.tol));
  if (!np->first_zero)
    throw Error(ErrorCode::no_zero_found,
                "normalized solution stays positive up to r_max (p >= p_alpha or horizon too small)");
  const double R0 = *np->first_zero;
  const std::vector<double> mesh = graded_mesh(options.mesh_points, std::clamp(1.0 / R0, 1e-14, 0.5));
  RadialProfile prof = derived_functions(build_profile(params, np, mesh));
  prof.mesh_scale = std::clamp(1.0 / R0, 1e-14, 0.5);
  prof.residual = radial_residual(prof);
  if (!(prof.residual <= options.residual_tol))
    throw Error(ErrorCode::step_failure,
                "radial residual " + std::to_string(prof.residual) + " exceeds tolerance");
  return prof;
}

RadialProfile RadialProfile::resample(std::span<const double> new_mesh) const {
  RadialProfile prof = derived_functions(build_profile(params, normalized, new_mesh));
  prof.residual = radial_residual(prof);
  return prof;
}

RadialProfile RadialProfile::refined() const {
  if (mesh_scale > 0.0) {
    RadialProfile prof = resample(graded_mesh(2 * static_cast<int>(size()) - 1, mesh_scale));
    prof.mesh_scale = mesh_scale;
    return prof;
  }
  return resample(refine_mesh(mesh));
}

}  // namespace henon
