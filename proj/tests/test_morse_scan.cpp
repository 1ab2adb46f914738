// Scan over p, degeneracy points and the radial quadratic form.

#include <cmath>

#include "doctest.h"
#include "henon/error.hpp"
#include "henon/morse_scan.hpp"

using namespace henon;

namespace {
// p̄ for N = 3, α = 1 from the first 101-point scan, kept as a regression
// baseline (the value is not known in closed form)
constexpr double kPBarBaseline = 2.048607777354;
}  // namespace

TEST_CASE("scan grid must lie inside (1, p_alpha)") {
  CHECK_THROWS_AS(scan(3, 1.0, {2.0, 7.5}), Error);
  CHECK_THROWS_AS(scan(3, 1.0, {1.0, 2.0}), Error);
}

TEST_CASE("default grid") {
  const auto g = default_grid(3, 1.0);
  REQUIRE(g.size() == 101);
  CHECK(g.front() == doctest::Approx(1.01));
  CHECK(g.back() == doctest::Approx(6.99));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  // geometric in the distance to p_α, so densest at the top
  CHECK(g[100] - g[99] < g[1] - g[0]);
  const double q1 = (7.0 - g[1]) / (7.0 - g[0]), q2 = (7.0 - g[51]) / (7.0 - g[50]);
  CHECK(q1 == doctest::Approx(q2).epsilon(1e-12));
}

TEST_CASE("coarse scan: endpoint indices, dichotomy and one changing point") {
  ScanOptions opt;
  const ScanResult s = scan(3, 1.0, default_grid(3, 1.0, 15), opt);
  REQUIRE(s.rows.size() == 15);
  CHECK(s.failures.empty());
  CHECK(s.rows.front().morse_index == 1);
  CHECK(s.rows.back().morse_index == 4);
  CHECK(s.rows.front().lambda_11 > 1.0);
  CHECK(s.rows.back().lambda_11 < 1.0);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const ScanRow& r = s.rows[i];
    if (i) CHECK(r.p > s.rows[i - 1].p);
    CHECK((r.morse_index == 1 || r.morse_index == 4));
    CHECK(r.morse_index == r.morse_index_shortcut);
    CHECK(r.log_sup_norm == doctest::Approx(std::log(r.sup_norm)));
  }

  const DegeneracyReport rep = find_degeneracy_points(s);
  CHECK(rep.parity_odd);
  CHECK(rep.changing_count == 1);
  CHECK_FALSE(rep.grid_refined);
  REQUIRE(rep.points.size() == 1);
  const DegeneracyPoint& d = rep.points[0];
  CHECK(d.changing);
  CHECK(d.morse_below == 1);
  CHECK(d.morse_above == 4);
  CHECK((d.lambda_lo - 1.0) * (d.lambda_hi - 1.0) < 0.0);
  CHECK(d.p_lo < d.p_bar);
  CHECK(d.p_bar < d.p_hi);
  CHECK(d.defect < kDegeneracyTol);
  CHECK(std::abs(d.p_bar - kPBarBaseline) < 1e-6);
  // kernel: positive inside, zero at both ends
  REQUIRE(d.kernel.size() == d.mesh.size());
  CHECK(d.kernel.front() == 0.0);
  CHECK(d.kernel.back() == 0.0);
  for (std::size_t i = 1; i + 1 < d.kernel.size(); ++i) CHECK(d.kernel[i] > 0.0);
  CHECK(std::abs(lambda_11(3, 1.0, d.p_bar) - 1.0) < kDegeneracyTol);
}

TEST_CASE("lambda_11 is continuous along the grid") {
  const auto g = default_grid(3, 1.0, 11);
  for (std::size_t i = 0; i + 1 < g.size(); i += 3) {
    const double a = lambda_11(3, 1.0, g[i]), b = lambda_11(3, 1.0, g[i + 1]);
    const double mid = lambda_11(3, 1.0, 0.5 * (g[i] + g[i + 1]));
    CHECK(std::min(a, b) - 0.5 * std::abs(b - a) <= mid);
    CHECK(mid <= std::max(a, b) + 0.5 * std::abs(b - a));
  }
}

TEST_CASE("window without a crossing has no changing point") {
  const ScanResult s = scan(3, 1.0, {1.5, 1.7, 1.9});
  const DegeneracyReport rep = find_degeneracy_points(s);
  CHECK(rep.points.empty());
  CHECK(rep.changing_count == 0);
  CHECK_FALSE(rep.parity_odd);
}

TEST_CASE("scan records failures and keeps going") {
  // R₀ is 3.21 at p = 2 and 4.04 at p = 3, so a horizon of 3.5 loses p = 3
  ScanOptions opt;
  opt.radial.r_max = 3.5;
  const ScanResult s = scan(3, 1.0, {2.0, 3.0}, opt);
  CHECK(s.rows.size() == 1);
  REQUIRE(s.failures.size() == 1);
  CHECK(s.failures[0].p == 3.0);
  CHECK(s.failures[0].error.find("no-zero-found") != std::string::npos);
}

TEST_CASE("test functions") {
  const TestFunction f = cosine_series({1.0, -0.5, 0.25});
  const std::vector<double> rs{0.0, 0.3, 0.7, 1.0};
  const TestValues v = f(rs);
  CHECK(v.dv[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(v.v[3] == doctest::Approx(0.0).epsilon(1e-14));
  const double h = 1e-6;
  for (double r : {0.3, 0.7}) {
    const std::vector<double> pts{r - h, r, r + h};
    const TestValues w = f(pts);
    CHECK(w.dv[1] == doctest::Approx((w.v[2] - w.v[0]) / (2 * h)).epsilon(1e-7));
  }
  const auto a = random_test_functions(42, 3), b = random_test_functions(42, 3), c = random_test_functions(43, 3);
  CHECK(a[2](rs).v == b[2](rs).v);
  CHECK(a[2](rs).v != c[2](rs).v);
  const TestFunction pl = piecewise_linear({0.0, 0.5, 1.0}, {2.0, 1.0, 0.0});
  const std::vector<double> q{0.25, 0.75};
  const TestValues pv = pl(q);
  CHECK(pv.v[0] == doctest::Approx(1.5));
  CHECK(pv.dv[1] == doctest::Approx(-2.0));
}

TEST_CASE("quadratic form: equality case and nonnegativity") {
  for (double p : {2.0, 5.0}) {
    CAPTURE(p);
    const RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, p));
    const QuadformValue eq = quadform_R4(prof, profile_function(prof));
    CHECK(std::abs(eq.value) <= kQuadratureTol * eq.scale);
    CHECK(eq.value == doctest::Approx(eq.t1 - eq.t2 + eq.t3));
    for (const TestFunction& v : random_test_functions(20240607, 25)) {
      const QuadformValue q = quadform_R4(prof, v);
      CHECK(q.value >= -1e-8 * q.scale);
      // quadrature has converged
      CHECK(quadform_R4(prof, v, 12).value == doctest::Approx(q.value).epsilon(1e-9));
    }
  }
}

TEST_CASE("quadratic form at the second radial eigenfunction") {
  // ψ_{2,0} is orthogonal to u_p, so the value is (Λ_{2,0} − 1) times the
  // normalization p∫r^{N−1+α}u^{p−1}ψ² = 1
  const RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, 2.0));
  SpectrumOptions raw;
  raw.extrapolate = false;
  const ModeSpectrum ms = solve_mode_spectrum(make_mode_problem(prof, 0), 2, raw);
  const QuadformValue q = quadform_R4(prof, piecewise_linear(ms.mesh, ms.eigenfunctions[1]));
  const double expected = ms.eigenvalues[1] - 1.0;
  CHECK(expected > 0.0);
  CHECK(std::abs(q.value - expected) < 1e-4 * expected);
  CHECK(std::abs(q.t3) < 1e-4 * q.scale);
  CHECK(q.t2 == doctest::Approx(1.0).epsilon(1e-4));
}
