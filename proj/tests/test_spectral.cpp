// Mode spectra: exact eigenpair, Prüfer cross-checks, Sturm–Liouville
// structure and the Morse count.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/spectral.hpp"

using namespace henon;

namespace {

const RadialProfile& profile_at(double p) {
  static std::map<double, RadialProfile> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.emplace(p, solve_radial(HenonParams::make(3, 1.0, p))).first;
  return it->second;
}

// Lumped weights Σ ρ r^{N−1+α} φ_i of a mode spectrum's own mesh.
std::vector<double> spectrum_weights(const ModeSpectrum& ms, const RadialProfile& prof) {
  const RadialProfile on_mesh = ms.mesh.size() == prof.size() ? prof : prof.resample(ms.mesh);
  const SturmLiouvilleProblem sl = to_sturm_liouville(make_mode_problem(on_mesh, ms.k));
  const RadialMatrices rm = radial_matrices(sl.N, sl.alpha, sl.mesh);
  std::vector<double> w(sl.mesh.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = rm.weight[i] * sl.rho[i];
  return w;
}

double dot(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
  return s;
}

// Dimension of the harmonic homogeneous polynomials of degree k in N
// variables: the kernel of Δ from degree k to degree k−2, by explicit
// enumeration of monomials.
long long harmonic_dimension(int k, int N) {
  std::vector<std::vector<int>> mono_k, mono_k2;
  std::vector<int> e(N, 0);
  auto enumerate = [&](auto&& self, int var, int left, std::vector<std::vector<int>>& out) -> void {
    if (var == N - 1) {
      e[var] = left;
      out.push_back(e);
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[var] = d;
      self(self, var + 1, left - d, out);
    }
  };
  enumerate(enumerate, 0, k, mono_k);
  if (k < 2) return static_cast<long long>(mono_k.size());
  enumerate(enumerate, 0, k - 2, mono_k2);
  std::map<std::vector<int>, int> row;
  for (std::size_t i = 0; i < mono_k2.size(); ++i) row[mono_k2[i]] = static_cast<int>(i);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(mono_k2.size(), mono_k.size());
  for (std::size_t j = 0; j < mono_k.size(); ++j)
    for (int v = 0; v < N; ++v) {
      const int d = mono_k[j][v];
      if (d < 2) continue;
      auto m = mono_k[j];
      m[v] -= 2;
      L(row[m], j) += d * (d - 1.0);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(L);
  return static_cast<long long>(mono_k.size()) - lu.rank();
}

}  // namespace

TEST_CASE("angular eigenvalues") {
  CHECK(angular_eigenvalue(0, 3) == 0.0);
  CHECK(angular_eigenvalue(0, 7) == 0.0);
  CHECK(angular_eigenvalue(1, 3) == 2.0);
  CHECK(angular_eigenvalue(2, 3) == 6.0);
  for (int N = 3; N <= 6; ++N) {
    CHECK(angular_eigenvalue(1, N) == N - 1.0);
    CHECK(angular_eigenvalue(2, N) == 2.0 * N);
    for (int k = 0; k < 6; ++k) CHECK(angular_eigenvalue(k + 1, N) > angular_eigenvalue(k, N));
  }
}

TEST_CASE("multiplicities against a brute-force harmonic count") {
  CHECK(multiplicity(0, 5) == 1);
  CHECK(multiplicity(1, 3) == 3);
  CHECK(multiplicity(2, 3) == 5);
  CHECK(harmonic_dimension(2, 3) == 5);
  for (int N = 3; N <= 6; ++N)
    for (int k = 0; k <= 5; ++k) {
      CAPTURE(N);
      CAPTURE(k);
      CHECK(multiplicity(k, N) == harmonic_dimension(k, N));
    }
}

TEST_CASE("mode problem setup") {
  const RadialProfile& prof = profile_at(2.0);
  const ModeProblem m0 = make_mode_problem(prof, 0), m1 = make_mode_problem(prof, 1);
  CHECK(m0.mu_k == 0.0);
  CHECK(m0.origin == OriginCondition::neumann);
  CHECK(m1.mu_k == 2.0);
  CHECK(m1.origin == OriginCondition::dirichlet);
}

TEST_CASE("exact eigenpair of the radial mode") {
  for (double p : {1.5, 2.0, 3.0, 5.0, 6.5}) {
    CAPTURE(p);
    const RadialProfile& prof = profile_at(p);
    const ModeSpectrum ms = solve_mode_spectrum(make_mode_problem(prof, 0), 2);
    CHECK(std::abs(p * ms.eigenvalues[0] - 1.0) < 1e-6);
    CHECK(ms.eigenvalues[1] > 1.0);
    // alignment of ψ_{1,0} with u_p in the weighted inner product
    const auto w = spectrum_weights(ms, prof);
    const RadialProfile on_mesh = ms.mesh.size() == prof.size() ? prof : prof.resample(ms.mesh);
    const double c = dot(w, ms.eigenfunctions[0], on_mesh.u_hat) /
                     std::sqrt(dot(w, on_mesh.u_hat, on_mesh.u_hat) * dot(w, ms.eigenfunctions[0], ms.eigenfunctions[0]));
    CHECK(std::sqrt(std::max(0.0, 1.0 - c * c)) < 1e-5);
    CHECK(c > 0.0);
  }
}

TEST_CASE("eigenfunction normalization, orthogonality and oscillation") {
  const RadialProfile& prof = profile_at(3.0);
  for (int k : {0, 1, 2}) {
    CAPTURE(k);
    const ModeSpectrum ms = solve_mode_spectrum(make_mode_problem(prof, k), 5);
    const auto w = spectrum_weights(ms, prof);
    for (int i = 0; i < 5; ++i) {
      CHECK(dot(w, ms.eigenfunctions[i], ms.eigenfunctions[i]) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(ms.zero_counts[i] == i);
      CHECK(count_sign_changes(ms.eigenfunctions[i]) == i);
      CHECK(ms.eigenfunctions[i].back() == 0.0);
      if (k > 0) CHECK(ms.eigenfunctions[i].front() == 0.0);
      for (int j = 0; j < i; ++j) CHECK(std::abs(dot(w, ms.eigenfunctions[i], ms.eigenfunctions[j])) < 1e-8);
      if (i > 0) CHECK(ms.eigenvalues[i] > ms.eigenvalues[i - 1]);
      CHECK(ms.residuals[i] <= 1e-8);
    }
    // first lobe positive
    for (const auto& psi : ms.eigenfunctions) {
      double mx = 0.0;
      for (double v : psi) mx = std::max(mx, std::abs(v));
      for (double v : psi)
        if (std::abs(v) > 1e-3 * mx) {
          CHECK(v > 0.0);
          break;
        }
    }
  }
}

TEST_CASE("Prüfer shooting agrees with the discrete eigenvalues") {
  for (double p : {2.0, 5.0}) {
    const RadialProfile& prof = profile_at(p);
    for (int k : {0, 1, 2}) {
      CAPTURE(p);
      CAPTURE(k);
      const ModeProblem mp = make_mode_problem(prof, k);
      const ModeSpectrum ms = solve_mode_spectrum(mp, 3);
      for (int i = 1; i <= 3; ++i)
        CHECK(prufer_eigenvalue(mp, i) == doctest::Approx(ms.eigenvalues[i - 1]).epsilon(1e-7));
    }
  }
}

TEST_CASE("Prüfer counts at known thresholds") {
  for (double p : {1.5, 3.0, 6.5}) {
    const ModeProblem m0 = make_mode_problem(profile_at(p), 0);
    CHECK(prufer_count(m0, 1.0 / p - 1e-4) == 0);
    CHECK(prufer_count(m0, 1.0 / p + 1e-4) == 1);
    CHECK(prufer_count(make_mode_problem(profile_at(p), 2), 1.0) == 0);
  }
}

TEST_CASE("Prüfer counts agree with discrete counts at random thresholds") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const RadialProfile& prof = profile_at(2.5);
  std::vector<ModeSpectrum> spectra;
  for (int k = 0; k < 3; ++k) spectra.push_back(solve_mode_spectrum(make_mode_problem(prof, k), 8));
  for (int t = 0; t < 20; ++t) {
    const int k = static_cast<int>(3 * U(rng));
    const double threshold = 0.1 + 12.0 * U(rng);
    const auto& ev = spectra[k].eigenvalues;
    REQUIRE(ev.back() > threshold);
    int discrete = 0;
    for (double l : ev) discrete += l < threshold;
    CAPTURE(k);
    CAPTURE(threshold);
    CHECK(prufer_count(make_mode_problem(prof, k), threshold) == discrete);
  }
}

TEST_CASE("spectral inequalities and mode monotonicity") {
  for (double p : {1.5, 2.0, 3.0, 5.0, 6.5}) {
    CAPTURE(p);
    const RadialProfile& prof = profile_at(p);
    double prev = -1.0;
    for (int k = 0; k <= 4; ++k) {
      const ModeSpectrum ms = solve_mode_spectrum(make_mode_problem(prof, k), 2);
      CHECK(ms.eigenvalues[0] > prev);
      prev = ms.eigenvalues[0];
      if (k == 0) CHECK(ms.eigenvalues[1] > 1.0);
      if (k == 1) CHECK(ms.eigenvalues[1] > 1.0);
      if (k == 2) CHECK(ms.eigenvalues[0] > 1.0);
    }
  }
}

TEST_CASE("eigenvalues converge at second order under mesh halving") {
  const RadialProfile& prof = profile_at(3.0);
  SpectrumOptions raw;
  raw.extrapolate = false;
  const RadialProfile p1 = prof.resample(graded_mesh(251, prof.mesh_scale));
  const RadialProfile p2 = p1.refined(), p3 = p2.refined();
  for (int k : {0, 1}) {
    const auto a = solve_mode_spectrum(make_mode_problem(p1, k), 3, raw).eigenvalues;
    const auto b = solve_mode_spectrum(make_mode_problem(p2, k), 3, raw).eigenvalues;
    const auto c = solve_mode_spectrum(make_mode_problem(p3, k), 3, raw).eigenvalues;
    for (int i = 0; i < 3; ++i) {
      CAPTURE(k);
      CAPTURE(i);
      const double order = std::log2(std::abs(a[i] - b[i]) / std::abs(b[i] - c[i]));
      CHECK(order > 1.9);
    }
  }
}

TEST_CASE("generic Sturm-Liouville problem: Bessel zeros") {
  // −(r²ψ')' = Λ r² ψ on (0, 1) with ρ r^{α} = 1 reduces to sin(√Λ r)/r,
  // eigenvalues (iπ)²
  SturmLiouvilleProblem sl;
  sl.N = 3;
  sl.alpha = 1e-300;
  sl.mu = 0.0;
  sl.origin = OriginCondition::neumann;
  sl.mesh = graded_mesh(2001, 0.5);
  sl.rho.assign(sl.mesh.size(), 1.0);
  const auto sol = solve_sturm_liouville(sl, 3);
  for (int i = 0; i < 3; ++i) {
    const double exact = std::pow((i + 1) * M_PI, 2);
    CHECK(sol.eigenvalues[i] == doctest::Approx(exact).epsilon(1e-5));
  }
}

TEST_CASE("Morse index at the endpoints and the two-value dichotomy") {
  const MorseReport lo = morse_index(solve_radial(HenonParams::make(3, 1.0, 1.05)));
  CHECK(lo.morse_index == 1);
  CHECK(lo.lambda_11 > 1.0);
  const MorseReport hi = morse_index(solve_radial(HenonParams::make(3, 1.0, 6.9)));
  CHECK(hi.morse_index == 4);
  CHECK(hi.lambda_11 < 1.0);
  for (const MorseReport& m : {lo, hi}) {
    CHECK(m.morse_index == m.morse_index_shortcut);
    CHECK_FALSE(m.degenerate);
    CHECK(m.lambda_1k.size() == 3);
    CHECK(m.lambda_1k[2] > 1.0);
    CHECK(m.negative_counts[0] == 1);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(1.05, 6.95);
  for (int t = 0; t < 8; ++t) {
    const double p = U(rng);
    const MorseReport m = morse_index(solve_radial(HenonParams::make(3, 1.0, p)));
    CAPTURE(p);
    if (!m.degenerate) CHECK(m.morse_index == m.morse_index_shortcut);
  }
}

TEST_CASE("Morse truncation needs k_max >= 2") {
  try {
    morse_index(profile_at(2.0), 1);
    FAIL("expected invalid_argument");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_argument);
  }
}
