// Endpoint behaviour: the weighted eigenpair as p → 1, the limit profile U
// as p → p_α, the Emden–Fowler change of variables and the blow-up table.

#include <cmath>
#include <random>

#include "doctest.h"
#include "henon/asymptotics.hpp"
#include "henon/spectral.hpp"

using namespace henon;

namespace {
double U_formula(int N, double a, double x) {
  const double C = 1.0 / ((N - 2.0) * (N + a));
  return std::pow(1.0 + C * std::pow(x, 2.0 + a), -(N - 2.0) / (2.0 + a));
}
}  // namespace

TEST_CASE("first weighted eigenvalue by two methods") {
  const WeightedEigenpair e = weighted_first_eigen(3, 1.0, 1.0);
  const double shooting = prufer_weighted_eigenvalue(3, 1.0, 1.0, 1);
  CHECK(std::abs(e.lambda_1 - shooting) < 1e-8 * shooting);
  CHECK(e.lambda_1 > 0.0);
  // no weight (α → 0) and N = 3 gives π²; the weight r pushes it up
  CHECK(e.lambda_1 > M_PI * M_PI);
  CHECK(e.phi_1.front() == doctest::Approx(1.0));
  CHECK(e.phi_1.back() == 0.0);
  for (std::size_t i = 0; i + 1 < e.phi_1.size(); ++i) CHECK(e.phi_1[i] > 0.0);
  CHECK(std::abs(e.lambda_1 - e.lambda_1_unextrapolated) < 1e-4 * e.lambda_1);
}

TEST_CASE("eigenvalue scaling on balls of radius R") {
  const double l1 = weighted_first_eigen(3, 1.0, 1.0).lambda_1;
  for (double R : {0.5, 2.0, 4.0}) {
    const double lR = weighted_first_eigen(3, 1.0, R).lambda_1;
    CHECK(std::abs(lR * std::pow(R, 3.0) - l1) < 1e-6 * l1);
  }
  const double l2 = weighted_first_eigen(4, 0.5, 1.0).lambda_1;
  CHECK(weighted_first_eigen(4, 0.5, 2.0).lambda_1 == doctest::Approx(l2 / std::pow(2.0, 2.5)).epsilon(1e-6));
}

TEST_CASE("limit profile") {
  CHECK(limit_profile(3, 1.0, 0.0) == 1.0);
  double prev = 1.0;
  for (double x = 0.1; x < 50.0; x *= 1.3) {
    const double u = limit_profile(3, 1.0, x);
    CHECK(u > 0.0);
    CHECK(u < prev);
    CHECK(u == doctest::Approx(U_formula(3, 1.0, x)).epsilon(1e-14));
    prev = u;
  }
  CHECK(limit_profile(5, 0.5, 2.0) == doctest::Approx(U_formula(5, 0.5, 2.0)).epsilon(1e-14));
}

TEST_CASE("Emden-Fowler bound pulls back to the limit profile") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> radii(100);
  for (double& r : radii) r = std::exp(std::log(1e-3) + U(rng) * std::log(1e6));
  for (auto [N, a] : {std::pair{3, 1.0}, std::pair{4, 0.5}, std::pair{6, 3.0}})
    CHECK(pullback_identity_error(N, a, radii) < 1e-12);
  // explicit form for N = 3, α = 1: t = 1/x and the bound is (1 + 1/(4t³))^{−1/3}
  for (double x : {0.2, 1.0, 7.0}) {
    const double t = emden_fowler_t(3, 1.0, x);
    CHECK(t == doctest::Approx(1.0 / x));
    CHECK(emden_fowler_bound(3, 1.0, t) == doctest::Approx(std::cbrt(1.0 / (1.0 + 1.0 / (4 * t * t * t)))));
  }
}

TEST_CASE("rescaled profiles stay below U and approach it") {
  double prev = 1e300;
  for (double p : {6.0, 6.5, 6.9}) {
    CAPTURE(p);
    const HenonParams hp = HenonParams::make(3, 1.0, p);
    const RadialProfile prof = solve_radial(hp);
    const RescaledProfile rs = rescale_profile(prof);
    CHECK(rs.mu_p == doctest::Approx(prof.R0));
    CHECK(rs.u_tilde.front() == doctest::Approx(1.0));
    CHECK(rs.u_tilde.back() == 0.0);
    CHECK(rs.x.back() == doctest::Approx(rs.mu_p));
    CHECK(rs.bounded_by_U);
    CHECK(rs.max_excess <= kBoundTol);
    for (std::size_t i = 0; i < rs.x.size(); ++i) CHECK(rs.u_tilde[i] <= U_formula(3, 1.0, rs.x[i]) + 1e-8);
    CHECK(rs.sup_distance < prev);
    prev = rs.sup_distance;
    const EmdenFowlerSeries ef = emden_fowler(rs, hp);
    CHECK(ef.kappa == doctest::Approx(5.0));
    CHECK(ef.bounded);
    CHECK(ef.y_at_largest_t > 0.99);
    for (std::size_t i = 1; i < ef.t.size(); ++i) CHECK(ef.t[i] < ef.t[i - 1]);
  }
}

TEST_CASE("p to 1: sup norm power approaches the eigenvalue") {
  const PToOneReport r = verify_p_to_1(3, 1.0, {1.5, 1.1, 1.01, 1.001});
  REQUIRE(r.rows.size() == 4);
  CHECK(r.lambda_1 == doctest::Approx(weighted_first_eigen(3, 1.0, 1.0).lambda_1));
  CHECK(r.rows.back().deviation < 0.05);
  CHECK(r.deviation_decreasing);
  CHECK(r.distance_decreasing);
  CHECK_FALSE(r.non_convergent);
  CHECK(r.extrapolated_error < 0.01);
  CHECK(r.rows.back().morse_index == 1);
  for (const auto& row : r.rows) CHECK(row.sup_pow == doctest::Approx(std::exp((row.p - 1.0) * row.log_sup_norm)));
}

TEST_CASE("blow-up table") {
  const BlowupReport b = blowup_table(3, 1.0, {2.0, 6.0, 6.5, 6.9});
  REQUIRE(b.rows.size() == 4);
  CHECK(b.tail_increasing);
  CHECK(b.rows[3].sup_norm > b.rows[2].sup_norm);
  CHECK(b.rows[2].sup_norm > b.rows[1].sup_norm);
  for (const auto& row : b.rows) {
    CHECK(std::isfinite(row.sup_norm));
    CHECK(row.scaling_error < 1e-12);
    CHECK(row.sup_norm == doctest::Approx(std::pow(row.R0, 3.0 / (row.p - 1.0))).epsilon(1e-12));
  }
}

TEST_CASE("sup norm stays bounded on a compact range of exponents") {
  double mx = 0.0;
  for (double p = 1.5; p <= 6.0; p += 0.5) mx = std::max(mx, solve_radial(HenonParams::make(3, 1.0, p)).sup_norm);
  CHECK(std::isfinite(mx));
  CHECK(mx < 1e6);
}

TEST_CASE("linearized eigenvalues approach ratios of weighted eigenvalues") {
  const PToOneReport r = verify_p_to_1(3, 1.0, {1.1, 1.01, 1.001});
  REQUIRE(r.modes.size() == 3);
  REQUIRE(r.limit_ratios.size() == 3);
  CHECK(r.limit_ratios[0] > 1.0);
  // Λ_{2,0} > 1 and Λ_{1,2} > 1 stay true in the limit
  CHECK(r.limit_ratios[2] > 1.0);
  for (std::size_t m = 0; m < r.modes.size(); ++m) {
    CAPTURE(m);
    // no rate is known; the distance to the limit only has to shrink
    const double d0 = std::abs(r.rows[0].lambdas[m] - r.limit_ratios[m]);
    const double d2 = std::abs(r.rows[2].lambdas[m] - r.limit_ratios[m]);
    CHECK(d2 < d0);
    CHECK(d2 < 0.05 * r.limit_ratios[m]);
  }
}

TEST_CASE("weighted mode eigenvalues against Prüfer shooting") {
  CHECK(weighted_mode_eigenvalue(3, 1.0, 1, 0) == doctest::Approx(prufer_weighted_eigenvalue(3, 1.0, 1.0, 1)).epsilon(1e-8));
  CHECK(weighted_mode_eigenvalue(3, 1.0, 2, 0) == doctest::Approx(prufer_weighted_eigenvalue(3, 1.0, 1.0, 2)).epsilon(1e-8));
  CHECK(weighted_mode_eigenvalue(3, 1.0, 1, 1) > weighted_mode_eigenvalue(3, 1.0, 1, 0));
}
