#include "henon/morse_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "henon/error.hpp"
#include "henon/mesh.hpp"
#include "henon/parallel.hpp"

namespace henon {

std::vector<double> default_grid(int N, double alpha, int points, double delta) {
  const double pa = critical_exponent(N, alpha);
  if (points < 2 || !(delta > 0.0) || 1.0 + delta >= pa - delta)
    throw Error(ErrorCode::invalid_argument, "bad scan grid");
  const double top = std::log(pa - 1.0 - delta), bottom = std::log(delta);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = pa - std::exp(top + (bottom - top) * i / (points - 1));
  grid.front() = 1.0 + delta;
  grid.back() = pa - delta;
  return grid;
}

ScanResult scan(int N, double alpha, std::vector<double> grid, const ScanOptions& options) {
  const double pa = critical_exponent(N, alpha);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty() || grid.front() <= 1.0 || grid.back() >= pa)
    throw Error(ErrorCode::invalid_exponent, "scan grid must lie in (1, p_alpha)");
  ScanResult res;
  res.N = N;
  res.alpha = alpha;
  res.k_max = options.k_max;
  res.p_lo = grid.front();
  res.p_hi = grid.back();
  std::ostringstream spec;
  spec.precision(17);
  spec << grid.size() << " points in [" << grid.front() << ", " << grid.back() << "]";
  res.grid_spec = spec.str();

  std::vector<ScanRow> rows(grid.size());
  std::vector<std::string> errors(grid.size());
  parallel_for(
      grid.size(),
      [&](std::size_t i) {
        try {
          const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, grid[i]), options.radial);
          const MorseReport rep = morse_index(prof, options.k_max, options.spectrum);
          rows[i] = {grid[i], rep.lambda_11, rep.morse_index, rep.morse_index_shortcut, rep.degenerate,
                     prof.sup_norm, prof.log_sup_norm};
        } catch (const Error& e) {
          errors[i] = std::string(to_string(e.code())) + ": " + e.what();
        }
      },
      options.workers);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (errors[i].empty())
      res.rows.push_back(rows[i]);
    else
      res.failures.push_back({grid[i], errors[i]});
  }
  return res;
}

namespace {

ModeSpectrum mode1(int N, double alpha, double p, const ScanOptions& options) {
  const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, p), options.radial);
  return solve_mode_spectrum(make_mode_problem(prof, 1), 1, options.spectrum);
}

}  // namespace

double lambda_11(int N, double alpha, double p, const ScanOptions& options) {
  return mode1(N, alpha, p, options).eigenvalues[0];
}

namespace {

DegeneracyPoint refine_bracket(const ScanResult& scan, std::size_t i, double tol, const ScanOptions& options) {
  const ScanRow& lo = scan.rows[i];
  const ScanRow& hi = scan.rows[i + 1];
  DegeneracyPoint dp;
  dp.p_lo = lo.p;
  dp.p_hi = hi.p;
  dp.lambda_lo = lo.lambda_11;
  dp.lambda_hi = hi.lambda_11;
  dp.morse_below = lo.morse_index;
  dp.morse_above = hi.morse_index;
  dp.changing = lo.morse_index != hi.morse_index;

  double a = lo.p, b = hi.p;
  double fa = lo.lambda_11 - 1.0, fb = hi.lambda_11 - 1.0;
  double best = std::abs(fa) < std::abs(fb) ? a : b;
  double fbest = std::min(std::abs(fa), std::abs(fb));
  int it = 0;
  while (fbest >= tol && b - a > 1e-15 * b && it < 200) {
    const double m = 0.5 * (a + b);
    const double fm = lambda_11(scan.N, scan.alpha, m, options) - 1.0;
    ++it;
    if (std::abs(fm) < fbest) {
      best = m;
      fbest = std::abs(fm);
    }
    if ((fm < 0.0) == (fa < 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  // one secant polish on the final bracket
  if (fb != fa) {
    const double s = a - fa * (b - a) / (fb - fa);
    if (s > a && s < b) {
      const double fs = lambda_11(scan.N, scan.alpha, s, options) - 1.0;
      ++it;
      if (std::abs(fs) < fbest) {
        best = s;
        fbest = std::abs(fs);
      }
    }
  }
  dp.p_bar = best;
  dp.defect = fbest;
  dp.iterations = it;
  const ModeSpectrum ms = mode1(scan.N, scan.alpha, best, options);
  dp.mesh = ms.mesh;
  dp.kernel = ms.eigenfunctions[0];
  return dp;
}

std::vector<double> tangency_candidates(const ScanResult& scan, double tol) {
  std::vector<double> out;
  const auto& r = scan.rows;
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    const double d = std::abs(r[i].lambda_11 - 1.0);
    const bool local_min = d <= std::abs(r[i - 1].lambda_11 - 1.0) && d <= std::abs(r[i + 1].lambda_11 - 1.0);
    const bool no_change = (r[i - 1].lambda_11 - 1.0) * (r[i + 1].lambda_11 - 1.0) > 0.0 &&
                           (r[i].lambda_11 - 1.0) * (r[i + 1].lambda_11 - 1.0) > 0.0;
    if (local_min && no_change && d < std::sqrt(tol)) out.push_back(r[i].p);
  }
  return out;
}

ScanResult refine_grid(const ScanResult& coarse, const ScanOptions& options) {
  std::vector<double> grid;
  for (std::size_t i = 0; i < coarse.rows.size(); ++i) {
    grid.push_back(coarse.rows[i].p);
    if (i + 1 < coarse.rows.size()) grid.push_back(0.5 * (coarse.rows[i].p + coarse.rows[i + 1].p));
  }
  ScanOptions o = options;
  o.k_max = coarse.k_max;
  return scan(coarse.N, coarse.alpha, grid, o);
}

}  // namespace

DegeneracyReport find_degeneracy_points(const ScanResult& input, double tol, const ScanOptions& options) {
  if (input.rows.size() < 2) throw Error(ErrorCode::invalid_argument, "scan needs at least two rows");
  DegeneracyReport rep;
  rep.scan = input;
  const bool parity_enforced = input.alpha <= 1.0;
  for (int attempt = 0; attempt < 2; ++attempt) {
    const ScanResult& s = rep.scan;
    std::vector<std::size_t> brackets;
    for (std::size_t i = 0; i + 1 < s.rows.size(); ++i)
      if ((s.rows[i].lambda_11 - 1.0) * (s.rows[i + 1].lambda_11 - 1.0) <= 0.0) brackets.push_back(i);
    rep.points.assign(brackets.size(), {});
    parallel_for(
        brackets.size(), [&](std::size_t j) { rep.points[j] = refine_bracket(s, brackets[j], tol, options); },
        options.workers);
    rep.possible_tangencies = tangency_candidates(s, tol);
    rep.changing_count = static_cast<int>(
        std::count_if(rep.points.begin(), rep.points.end(), [](const DegeneracyPoint& d) { return d.changing; }));
    rep.parity_odd = rep.changing_count % 2 == 1;
    // the index moves between two values only, so the parity of the changes
    // is fixed by the indices at the ends of the window (odd over (1, p_α))
    const bool expect_odd = s.rows.front().morse_index != s.rows.back().morse_index;
    if (rep.parity_odd == expect_odd || !parity_enforced) return rep;
    if (attempt == 0) {
      rep.scan = refine_grid(s, options);
      rep.grid_refined = true;
    }
  }
  throw Error(ErrorCode::parity_violation,
              "number of Morse index changing points (" + std::to_string(rep.changing_count) +
                  ") disagrees with the end indices after grid refinement");
}

// -- quadratic form ------------------------------------------------------------

TestFunction cosine_series(std::vector<double> c) {
  return [c = std::move(c)](std::span<const double> rs) {
    TestValues out{std::vector<double>(rs.size(), 0.0), std::vector<double>(rs.size(), 0.0)};
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t m = 0; m < c.size(); ++m) {
        const double w = (static_cast<double>(m) + 0.5) * std::numbers::pi;
        out.v[i] += c[m] * std::cos(w * rs[i]);
        out.dv[i] -= c[m] * w * std::sin(w * rs[i]);
      }
    return out;
  };
}

TestFunction piecewise_linear(std::vector<double> mesh, std::vector<double> values) {
  if (mesh.size() != values.size() || mesh.size() < 2)
    throw Error(ErrorCode::invalid_argument, "piecewise_linear needs matching mesh and values");
  return [mesh = std::move(mesh), values = std::move(values)](std::span<const double> rs) {
    TestValues out{std::vector<double>(rs.size()), std::vector<double>(rs.size())};
    for (std::size_t i = 0; i < rs.size(); ++i) {
      const auto it = std::upper_bound(mesh.begin(), mesh.end(), rs[i]);
      std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - mesh.begin() - 1, 0));
      j = std::min(j, mesh.size() - 2);
      const double h = mesh[j + 1] - mesh[j];
      const double slope = (values[j + 1] - values[j]) / h;
      out.v[i] = values[j] + slope * (rs[i] - mesh[j]);
      out.dv[i] = slope;
    }
    return out;
  };
}

TestFunction profile_function(const RadialProfile& profile) {
  return [profile](std::span<const double> rs) {
    RadialProfile::Values vals = profile.evaluate(rs);
    return TestValues{std::move(vals.u_hat), std::move(vals.u_hat_prime)};
  };
}

std::vector<TestFunction> random_test_functions(std::uint64_t seed, int count, int modes) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<TestFunction> out;
  for (int i = 0; i < count; ++i) {
    std::vector<double> c(modes);
    for (int m = 0; m < modes; ++m) c[m] = normal(gen) / (m + 1);
    out.push_back(cosine_series(std::move(c)));
  }
  return out;
}

QuadformValue quadform_R4(const RadialProfile& profile, const TestFunction& v, int gauss_points) {
  const GaussRule rule = gauss_legendre(gauss_points);
  const auto& mesh = profile.mesh;
  std::vector<double> rs, ws;
  rs.reserve((mesh.size() - 1) * rule.nodes.size());
  for (std::size_t e = 0; e + 1 < mesh.size(); ++e) {
    const double mid = 0.5 * (mesh[e] + mesh[e + 1]), half = 0.5 * (mesh[e + 1] - mesh[e]);
    for (std::size_t g = 0; g < rule.nodes.size(); ++g) {
      rs.push_back(mid + half * rule.nodes[g]);
      ws.push_back(half * rule.weights[g]);
    }
  }
  const RadialProfile::Values u = profile.evaluate(rs);
  const TestValues tv = v(rs);
  if (tv.v.size() != rs.size() || tv.dv.size() != rs.size())
    throw Error(ErrorCode::quadrature_failure, "test function returned the wrong number of values");
  const int N = profile.params.N;
  const double alpha = profile.params.alpha, p = profile.params.p;
  double s1 = 0.0, s2 = 0.0, sp = 0.0, spp = 0.0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double r = rs[i];
    const double wr = ws[i] * std::pow(r, N - 1.0);
    const double wa = ws[i] * std::pow(r, N - 1.0 + alpha);
    const double uh = std::max(u.u_hat[i], 0.0);
    const double upm1 = std::pow(uh, p - 1.0);
    s1 += wr * tv.dv[i] * tv.dv[i];
    s2 += wa * upm1 * tv.v[i] * tv.v[i];
    sp += wa * upm1 * uh * tv.v[i];
    spp += wa * upm1 * uh * uh;
  }
  if (!std::isfinite(s1 + s2 + sp + spp) || !(spp > 0.0))
    throw Error(ErrorCode::quadrature_failure, "non-finite quadrature sum");
  const double a = profile.weight_scale();
  QuadformValue q;
  q.t1 = s1;
  q.t2 = p * a * s2;
  q.t3 = (p - 1.0) * a * sp * sp / spp;
  q.value = q.t1 - q.t2 + q.t3;
  q.scale = q.t1 + q.t2;
  return q;
}

}  // namespace henon
