#include "henon/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "henon/error.hpp"
#include "henon/spectral.hpp"

namespace henon {

bool AcceptanceRun::all_passed() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

struct Detail {
  std::ostringstream os;
  bool ok = true;
  Detail() { os.precision(6); }
  void precision(int n) { os.precision(n); }
  template <class T>
  Detail& operator<<(const T& v) {
    os << v;
    return *this;
  }
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      os << " [FAILED: " << what << "]";
    }
  }
};

template <class Body>
CheckResult run_check(const std::string& id, const std::string& description, Body&& body) {
  CheckResult res{id, description, false, "", 0.0};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    Detail d;
    body(d);
    res.passed = d.ok;
    res.detail = d.os.str();
  } catch (const Error& e) {
    res.detail = std::string(to_string(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    res.detail = e.what();
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// sin of the angle between a and b in Σ m_i a_i b_i
double weighted_sine(std::span<const double> m, const std::vector<double>& a, const std::vector<double>& b,
                     std::size_t offset) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double x = a[i + offset], y = b[i + offset];
    ab += m[i] * x * y;
    aa += m[i] * x * x;
    bb += m[i] * y * y;
  }
  const double c = ab / std::sqrt(aa * bb);
  return std::sqrt(std::max(0.0, 1.0 - c * c));
}

const DegeneracyPoint* jump_point(const DegeneracyReport& rep, int N) {
  for (const auto& d : rep.points)
    if (d.changing && d.morse_below == 1 && d.morse_above == N + 1) return &d;
  return nullptr;
}

}  // namespace

AcceptanceRun run_acceptance(const AcceptanceOptions& opt, const CheckCallback& on_check) {
  AcceptanceRun run;
  const int N = opt.N;
  const double alpha = opt.alpha;
  ScanOptions scan_opt;
  scan_opt.workers = opt.workers;
  auto record = [&](CheckResult c) {
    run.checks.push_back(std::move(c));
    if (on_check) on_check(run.checks.back());
  };

  record(run_check("exact_eigenvalue_oracle", "Lambda_{1,0} = 1/p and psi_{1,0} parallel to u_p", [&](Detail& d) {
    for (double p : kOracleSamples) {
      const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, p));
      const ModeProblem mp = make_mode_problem(prof, 0);
      const ModeSpectrum ms = solve_mode_spectrum(mp, 2);
      ModeProblem on_mesh = mp;
      if (ms.mesh.size() != prof.size()) on_mesh.profile = prof.refined();
      const DiscretePencil dp = assemble(to_sturm_liouville(on_mesh));
      const double rel = std::abs(p * ms.eigenvalues[0] - 1.0);
      const double sine = weighted_sine(dp.pencil.mass(), ms.eigenfunctions[0], on_mesh.profile.u_hat, dp.first_node);
      d << "p=" << p << ": |p*L10-1|=" << rel << " sin=" << sine << "; ";
      d.require(rel <= 1e-6, "eigenvalue at p=" + std::to_string(p));
      d.require(sine <= 1e-5, "alignment at p=" + std::to_string(p));
    }
  }));

  record(run_check("inequality_suite", "L20>1, L12>1, L21>1, L1k increasing (k<=4), 0<g<1 peaked at r_min",
                   [&](Detail& d) {
                     for (double p : kOracleSamples) {
                       const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, p));
                       const ModeSpectrum m0 = solve_mode_spectrum(make_mode_problem(prof, 0), 2);
                       const ModeSpectrum m1 = solve_mode_spectrum(make_mode_problem(prof, 1), 2);
                       std::vector<double> l1k;
                       for (int k = 0; k <= 4; ++k)
                         l1k.push_back(k == 0   ? m0.eigenvalues[0]
                                       : k == 1 ? m1.eigenvalues[0]
                                                : solve_mode_spectrum(make_mode_problem(prof, k), 1).eigenvalues[0]);
                       const bool increasing = std::is_sorted(l1k.begin(), l1k.end(), std::less_equal<>()) &&
                                               std::adjacent_find(l1k.begin(), l1k.end()) == l1k.end();
                       bool g_in = true;
                       std::size_t arg = 1;
                       for (std::size_t i = 1; i + 1 < prof.size(); ++i) {
                         g_in = g_in && prof.g[i] > 0.0 && prof.g[i] < 1.0;
                         if (prof.g[i] > prof.g[arg]) arg = i;
                       }
                       d << "p=" << p << ": L20=" << m0.eigenvalues[1] << " L12=" << l1k[2] << " L21="
                         << m1.eigenvalues[1] << " g(r1)=" << prof.g[1] << "; ";
                       const std::string at = " at p=" + std::to_string(p);
                       d.require(m0.eigenvalues[1] > 1.0, "L20" + at);
                       d.require(l1k[2] > 1.0, "L12" + at);
                       d.require(m1.eigenvalues[1] > 1.0, "L21" + at);
                       d.require(increasing, "L1k monotone" + at);
                       d.require(g_in, "g in (0,1)" + at);
                       d.require(arg == 1, "g maximal at the smallest radius" + at);
                     }
                   }));

  record(run_check("morse_dichotomy", "Morse index 1 at p=1.05, N+1 at p=6.9, full count = shortcut on the scan",
                   [&](Detail& d) {
                     const int lo = morse_index(solve_radial(HenonParams::make(N, alpha, 1.05))).morse_index;
                     const int hi = morse_index(solve_radial(HenonParams::make(N, alpha, 6.9))).morse_index;
                     run.scan = scan(N, alpha, default_grid(N, alpha, opt.scan_points), scan_opt);
                     int mismatch = 0;
                     for (const auto& r : run.scan->rows) mismatch += r.morse_index != r.morse_index_shortcut;
                     d << "m(1.05)=" << lo << " m(6.9)=" << hi << " rows=" << run.scan->rows.size()
                       << " failures=" << run.scan->failures.size() << " mismatches=" << mismatch;
                     d.require(lo == 1, "index at p=1.05");
                     d.require(hi == N + 1, "index at p=6.9");
                     d.require(static_cast<int>(run.scan->rows.size()) == opt.scan_points, "every scan row solved");
                     d.require(mismatch == 0, "full count equals shortcut");
                   }));

  record(run_check("degeneracy_detection", "odd number of changing points, a 1->N+1 jump, p_bar stable to 1e-4",
                   [&](Detail& d) {
                     if (!run.scan) throw Error(ErrorCode::invalid_argument, "scan unavailable");
                     run.degeneracy = find_degeneracy_points(*run.scan, opt.refine_tol, scan_opt);
                     const ScanResult fine = scan(N, alpha, default_grid(N, alpha, opt.scan_points_fine), scan_opt);
                     run.degeneracy_fine = find_degeneracy_points(fine, opt.refine_tol, scan_opt);
                     const DegeneracyPoint* a = jump_point(*run.degeneracy, N);
                     const DegeneracyPoint* b = jump_point(*run.degeneracy_fine, N);
                     d.precision(12);
                     d << "changing=" << run.degeneracy->changing_count << " (fine " << run.degeneracy_fine->changing_count
                       << ")";
                     d.require(run.degeneracy->parity_odd, "odd count");
                     d.require(a != nullptr && b != nullptr, "1->N+1 jump found on both grids");
                     if (a && b) {
                       d << " p_bar=" << a->p_bar << " p_bar_fine=" << b->p_bar << " diff=" << std::abs(a->p_bar - b->p_bar);
                       d.require(std::abs(a->p_bar - b->p_bar) <= 1e-4, "p_bar stable");
                     }
                   }));

  record(run_check("p_to_1_asymptotics", "sup^{p-1} -> lambda_1 monotonically, within 1% after extrapolation; "
                                         "lambda_R R^{2+alpha} constant to 1e-6",
                   [&](Detail& d) {
                     run.p_to_1 = verify_p_to_1(N, alpha, {1.5, 1.1, 1.01, 1.001});
                     std::vector<double> scaled;
                     for (double R : {0.5, 1.0, 2.0, 4.0})
                       scaled.push_back(weighted_first_eigen(N, alpha, R).lambda_1 * std::pow(R, 2.0 + alpha));
                     const auto [mn, mx] = std::minmax_element(scaled.begin(), scaled.end());
                     const double spread = (*mx - *mn) / *mn;
                     d.precision(10);
                     d << "lambda_1=" << run.p_to_1->lambda_1 << " extrapolated=" << run.p_to_1->extrapolated
                       << " rel.err=" << run.p_to_1->extrapolated_error << " scaling spread=" << spread;
                     d.require(run.p_to_1->deviation_decreasing, "deviations decrease");
                     d.require(run.p_to_1->extrapolated_error <= 0.01, "extrapolation within 1%");
                     d.require(spread <= 1e-6, "scaling law");
                   }));

  record(run_check("p_to_critical_asymptotics", "u_tilde <= U + 1e-8, distance to U decreasing, Emden-Fowler identity "
                                                "to 1e-12, kappa and C_alpha",
                   [&](Detail& d) {
                     const std::vector<double> ps{6.0, 6.5, 6.9};
                     run.p_to_critical = verify_p_to_critical(N, alpha, ps);
                     run.blowup = blowup_table(N, alpha, ps);
                     std::mt19937_64 gen(opt.seed);
                     std::uniform_real_distribution<double> logr(std::log(1e-3), std::log(1e3));
                     std::vector<double> radii(100);
                     for (double& r : radii) r = std::exp(logr(gen));
                     const double pull = pullback_identity_error(N, alpha, radii);
                     const HenonParams hp = HenonParams::make(N, alpha, ps.front());
                     bool ef_ok = true;
                     for (const auto& rp : run.p_to_critical->profiles) ef_ok = ef_ok && emden_fowler(rp, hp).bounded;
                     for (const auto& rp : run.p_to_critical->profiles)
                       d << "p=" << rp.p << ": excess=" << rp.max_excess << " dist=" << rp.sup_distance << "; ";
                     d << "pullback=" << pull << " kappa=" << hp.kappa << " C_alpha=" << hp.C_alpha;
                     d.require(run.p_to_critical->all_bounded, "u_tilde <= U");
                     d.require(run.p_to_critical->distance_decreasing, "distance decreasing");
                     d.require(ef_ok, "Emden-Fowler bound");
                     d.require(pull <= 1e-12, "pullback identity");
                     if (N == 3 && alpha == 1.0) {
                       d.require(hp.kappa == 5.0, "kappa = 5");
                       d.require(hp.C_alpha == 0.25, "C_alpha = 1/4");
                     }
                   }));

  record(run_check("quadform_R4", "R4 form >= -1e-8 scale on seeded random functions, zero at v = u_p",
                   [&](Detail& d) {
                     const auto family = random_test_functions(opt.seed, opt.random_functions);
                     for (double p : {2.0, 5.0}) {
                       const RadialProfile prof = solve_radial(HenonParams::make(N, alpha, p));
                       double worst = std::numeric_limits<double>::infinity();
                       for (const auto& f : family) {
                         const QuadformValue q = quadform_R4(prof, f);
                         worst = std::min(worst, q.value / q.scale);
                       }
                       const QuadformValue eq = quadform_R4(prof, profile_function(prof));
                       d << "p=" << p << ": min value/scale=" << worst << " equality=" << eq.value / eq.scale << "; ";
                       d.require(worst >= -1e-8, "nonnegativity at p=" + std::to_string(p));
                       d.require(std::abs(eq.value) <= kQuadratureTol * eq.scale, "equality at p=" + std::to_string(p));
                     }
                   }));

  record(run_check("continuation", ">=20 positive, asymmetric branch points with residual < 1e-8; cos-sector "
                                   "crossing within 1e-4 of p_bar",
                   [&](Detail& d) {
                     if (!run.degeneracy) throw Error(ErrorCode::invalid_argument, "degeneracy points unavailable");
                     const DegeneracyPoint* dp = jump_point(*run.degeneracy, N);
                     if (!dp) throw Error(ErrorCode::invalid_argument, "no 1->N+1 degeneracy point");
                     GridOptions go = opt.grid;
                     go.mesh_scale = std::clamp(1.0 / solve_radial(HenonParams::make(N, alpha, dp->p_bar)).R0, 1e-3, 0.5);
                     run.grid = AxisymGrid::make(N, alpha, go);
                     const BranchOrigin origin = prepare_origin(*run.grid, *dp);
                     run.branch = continue_branch(*run.grid, origin, opt.continuation);
                     const auto& pts = run.branch->points;
                     const bool all_ok = std::all_of(pts.begin(), pts.end(), [](const BranchPoint& b) {
                       return b.state.residual_norm < 1e-8 && b.state.positive && b.state.asymmetry > 0.0;
                     });
                     const double gap = std::abs(origin.p_bar_discrete - origin.p_bar);
                     d.precision(10);
                     d << "points=" << pts.size() << " termination=" << to_string(run.branch->termination)
                       << " p range=[" << pts.front().p << ", " << pts.back().p << "] sector crossing="
                       << origin.p_bar_discrete << " gap=" << gap;
                     d.require(pts.size() >= 20, "at least 20 points");
                     d.require(all_ok, "residual, positivity, asymmetry");
                     d.require(gap <= 1e-4, "sector crossing matches p_bar");
                   }));
  return run;
}

}  // namespace henon
