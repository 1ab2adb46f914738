// Radial solutions: independent integrator and finite-volume oracles plus the
// profile invariants.

#include <cmath>
#include <vector>

#include "doctest.h"
#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/ode.hpp"
#include "henon/radial.hpp"

using namespace henon;

namespace {

// First zero of v'' + (N−1)/x v' + x^α v^p = 0, v(0) = 1, by fixed-step RK4
// in x from a series start, with secant iterations on the step map.
double rk4_first_zero(int N, double alpha, double p, double h) {
  auto rhs = [=](double x, const ode::State<2>& y) {
    const double vp = y[0] > 0.0 ? std::pow(y[0], p) : 0.0;
    return ode::State<2>{y[1], -(N - 1.0) / x * y[1] - std::pow(x, alpha) * vp};
  };
  const double x0 = 1e-3, m = 2.0 + alpha;
  ode::State<2> y{1.0 - std::pow(x0, m) / (m * (N + alpha)), -std::pow(x0, m - 1.0) / (N + alpha)};
  double x = x0;
  for (;;) {
    const ode::State<2> next = ode::rk4_step<2>(rhs, x, y, h);
    if (next[0] <= 0.0) {
      double a = 0.0, fa = y[0], b = h, fb = next[0];
      for (int it = 0; it < 60 && std::abs(b - a) > 1e-15; ++it) {
        const double c = b - fb * (b - a) / (fb - fa);
        a = b, fa = fb;
        b = c, fb = ode::rk4_step<2>(rhs, x, y, c)[0];
      }
      return x + b;
    }
    y = next;
    x += h;
    if (x > 100.0) return std::nan("");
  }
}

// u(0) of the finite-volume discretization of −(r²u')' = r³u² on a uniform
// mesh with n cells, solved by Newton from `guess`.
double finite_volume_sup(int n, const RadialProfile& guess_profile) {
  const double h = 1.0 / n;
  std::vector<double> r(n + 1), u(n + 1);
  for (int i = 0; i <= n; ++i) r[i] = i * h;
  const auto g = guess_profile.evaluate(r);
  for (int i = 0; i <= n; ++i) u[i] = g.u_hat[i] * guess_profile.sup_norm;
  auto face = [&](int i) { return (r[i] + 0.5 * h) * (r[i] + 0.5 * h) / h; };  // face between i and i+1
  auto cell = [&](int i) { return i == 0 ? std::pow(0.5 * h, 4) / 4.0 : r[i] * r[i] * r[i] * h; };
  for (int it = 0; it < 50; ++it) {
    std::vector<double> F(n), a(n, 0.0), b(n), c(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double up = u[i + 1];
      double flux = face(i) * (u[i] - up);
      double diag = face(i);
      if (i > 0) {
        flux += face(i - 1) * (u[i] - u[i - 1]);
        diag += face(i - 1);
        a[i] = -face(i - 1);
      }
      F[i] = flux - cell(i) * u[i] * u[i];
      b[i] = diag - 2.0 * cell(i) * u[i];
      if (i + 1 < n) c[i] = -face(i);
    }
    // Thomas algorithm
    for (int i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      F[i] -= w * F[i - 1];
    }
    std::vector<double> d(n);
    d[n - 1] = F[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) d[i] = (F[i] - c[i] * d[i + 1]) / b[i];
    double step = 0.0;
    for (int i = 0; i < n; ++i) {
      u[i] -= d[i];
      step = std::max(step, std::abs(d[i]));
    }
    if (step < 1e-13 * u[0]) return u[0];
  }
  return std::nan("");
}

}  // namespace

TEST_CASE("series start slope") {
  const auto np = integrate_normalized(HenonParams::make(3, 1.0, 2.0), 10.0, 1e-10);
  CHECK(np.v_prime.front() / (np.mesh.front() * np.mesh.front()) == doctest::Approx(-0.25).epsilon(1e-8));
}

TEST_CASE("normalized profile is decreasing and positive before its zero") {
  const auto np = integrate_normalized(HenonParams::make(3, 1.0, 3.0), 100.0, 1e-10);
  REQUIRE(np.first_zero.has_value());
  for (std::size_t i = 1; i < np.mesh.size(); ++i) {
    CHECK(np.mesh[i] > np.mesh[i - 1]);
    CHECK(np.v[i] <= np.v[i - 1]);
    CHECK(np.v_prime[i] < 0.0);
    if (np.mesh[i] < *np.first_zero) CHECK(np.v[i] > 0.0);
  }
}

TEST_CASE("first zero agrees with a fixed-step RK4 integrator") {
  const auto np = integrate_normalized(HenonParams::make(3, 1.0, 2.0), 100.0, 1e-12);
  REQUIRE(np.first_zero.has_value());
  const double oracle = rk4_first_zero(3, 1.0, 2.0, 1e-4);
  CHECK(std::abs(*np.first_zero - oracle) < 1e-8 * oracle);
}

TEST_CASE("no zero at or above the critical exponent") {
  for (double p : {7.0, 7.5, 9.0}) {
    const auto np = integrate_normalized(HenonParams::make(3, 1.0, p), 1e3, 1e-10);
    CHECK_FALSE(np.first_zero.has_value());
  }
  try {
    solve_radial(HenonParams::make(3, 1.0, 7.5));
    FAIL("expected no_zero_found");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_zero_found);
  }
}

TEST_CASE("exponent at most one is rejected") {
  for (double p : {1.0, 0.5}) {
    try {
      solve_radial(HenonParams::make(3, 1.0, p));
      FAIL("expected invalid_exponent");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_exponent);
    }
  }
}

TEST_CASE("sup norm is the scaling of the first zero and matches a finite-volume solve") {
  const HenonParams hp = HenonParams::make(3, 1.0, 2.0);
  const RadialProfile prof = solve_radial(hp);
  const auto np = integrate_normalized(hp, 100.0, 1e-10);
  CHECK(prof.sup_norm == doctest::Approx(std::pow(*np.first_zero, 3.0)).epsilon(1e-9));
  CHECK(prof.R0 == doctest::Approx(*np.first_zero).epsilon(1e-9));
  // second-order discrete solutions on three nested meshes
  const double s1 = finite_volume_sup(1000, prof), s2 = finite_volume_sup(2000, prof),
               s3 = finite_volume_sup(4000, prof);
  REQUIRE(std::isfinite(s1 + s2 + s3));
  const double order = std::log2(std::abs(s1 - s2) / std::abs(s2 - s3));
  CHECK(order > 1.9);
  const double extrapolated = (4.0 * s3 - s2) / 3.0;
  CHECK(std::abs(extrapolated - prof.sup_norm) < 1e-6 * prof.sup_norm);
}

TEST_CASE("profile invariants") {
  for (double p : {1.05, 2.0, 4.0, 6.5}) {
    CAPTURE(p);
    const RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, p));
    const std::size_t n = prof.size();
    REQUIRE(n == 2001);
    CHECK(prof.mesh.front() == 0.0);
    CHECK(prof.mesh.back() == 1.0);
    CHECK(prof.u_hat.front() == doctest::Approx(1.0));
    CHECK(prof.u_hat.back() == 0.0);
    CHECK(prof.u_hat_prime.front() == 0.0);
    CHECK(prof.u_hat_prime.back() < 0.0);
    CHECK(prof.residual <= 1e-8);
    double gmax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i) {
      CHECK(prof.u_hat_prime[i] < 0.0);
      CHECK(prof.u_hat[i] < prof.u_hat[i - 1]);
      CHECK(prof.w_hat[i] > 0.0);
      if (i + 1 < n) {
        CHECK(prof.u_hat[i] > 0.0);
        CHECK(prof.g[i] > 0.0);
        CHECK(prof.g[i] < 1.0);
        if (prof.g[i] > gmax) gmax = prof.g[i], imax = i;
      }
    }
    CHECK(imax == 1);
    CHECK(prof.g[1] >= 1.0 - 1e-3);
    CHECK(prof.g.back() == 0.0);
    CHECK(prof.z_hat.front() == doctest::Approx(2.0 / (p - 1.0)));
    CHECK(prof.z_hat.back() == doctest::Approx(prof.u_hat_prime.back()));
    CHECK(prof.z_hat.back() < 0.0);
    int changes = 0;
    for (std::size_t i = 1; i < n; ++i) changes += (prof.z_hat[i] < 0.0) != (prof.z_hat[i - 1] < 0.0);
    CHECK(changes >= 1);
  }
}

TEST_CASE("unnormalized columns") {
  const RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, 3.0));
  const auto u = prof.u(), up = prof.u_prime(), w = prof.w(), z = prof.z();
  CHECK(u.front() == doctest::Approx(prof.sup_norm));
  CHECK(prof.sup_norm == doctest::Approx(std::pow(prof.R0, 3.0 / 2.0)));
  CHECK(prof.weight_scale() == doctest::Approx(std::pow(prof.R0, 3.0)));
  for (std::size_t i = 0; i < prof.size(); i += 97) {
    CHECK(w[i] == doctest::Approx(-up[i]));
    CHECK(z[i] == doctest::Approx(prof.mesh[i] * up[i] + u[i]));
  }
}

TEST_CASE("scaling collapse across integration horizons") {
  const HenonParams hp = HenonParams::make(3, 1.0, 2.5);
  RadialOptions a, b;
  a.r_max = 1e14;
  b.r_max = 50.0;
  const RadialProfile pa = solve_radial(hp, a), pb = solve_radial(hp, b);
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(std::abs(pa.u_hat[i] - pb.u_hat[i]) <= 10 * a.tol);
  CHECK(pa.sup_norm == doctest::Approx(pb.sup_norm).epsilon(10 * a.tol));
}

TEST_CASE("sup norm grows without bound towards the critical exponent") {
  // the sup norm also diverges as p → 1 and is smallest near p = 5, so the
  // growth is only monotone on the tail
  double prev = 0.0;
  for (double p : {6.0, 6.5, 6.9, 6.99, 6.999}) {
    const double s = solve_radial(HenonParams::make(3, 1.0, p)).sup_norm;
    CHECK(s > prev);
    prev = s;
  }
  CHECK(prev > 100.0);
}

TEST_CASE("resampling re-integrates instead of interpolating") {
  const RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, 2.0));
  const RadialProfile fine = prof.refined();
  REQUIRE(fine.size() == 2 * prof.size() - 1);
  for (std::size_t i = 0; i < prof.size(); ++i) {
    CHECK(fine.mesh[2 * i] == doctest::Approx(prof.mesh[i]).epsilon(1e-14));
    CHECK(std::abs(fine.u_hat[2 * i] - prof.u_hat[i]) < 1e-9);
  }
  const std::vector<double> radii{0.0, 0.25, 0.5, 0.75, 1.0};
  const auto v = prof.evaluate(radii);
  CHECK(v.u_hat.front() == doctest::Approx(1.0));
  CHECK(v.u_hat.back() == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 1; i < 5; ++i) CHECK(v.u_hat_prime[i] < 0.0);
}

TEST_CASE("other dimensions and weights") {
  for (auto [N, a] : {std::pair{4, 0.5}, std::pair{5, 2.0}, std::pair{3, 0.1}}) {
    CAPTURE(N);
    const double pa = critical_exponent(N, a);
    const RadialProfile prof = solve_radial(HenonParams::make(N, a, 0.5 * (1.0 + pa)));
    CHECK(prof.residual <= 1e-8);
    CHECK(prof.sup_norm == doctest::Approx(std::pow(prof.R0, (2.0 + a) / (prof.params.p - 1.0))));
  }
}
