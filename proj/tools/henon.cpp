// Command-line front end: solve, spectrum, scan, asymptotics, continue,
// reproduce. Exit codes: 0 ok, 1 usage, 2 numerical failure, 3 acceptance
// failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "henon/acceptance.hpp"
#include "henon/error.hpp"
#include "henon/io.hpp"

namespace fs = std::filesystem;
using namespace henon;

namespace {

enum Exit { kOk = 0, kUsage = 1, kNumerical = 2, kAcceptance = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  int N = 3;
  double alpha = 1.0;
  std::string out;
  unsigned workers = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--N", c.N, "space dimension (>= 3)");
  app->add_option("--alpha", c.alpha, "weight exponent (> 0)");
  app->add_option("--out", c.out, std::string("output directory (default $") + kOutputDirEnv + " or ./out)");
  app->add_option("--workers", c.workers, "worker threads (0: all cores)");
}

void validate_instance(const Common& c) {
  if (c.N < 3) throw UsageError("--N must be >= 3");
  if (!(c.alpha > 0.0)) throw UsageError("--alpha must be > 0");
}

void validate_p(const Common& c, double p) {
  const double pa = critical_exponent(c.N, c.alpha);
  if (!(p > 1.0 && p < pa)) throw UsageError("--p must lie in (1, " + format_number(pa) + ")");
}

fs::path prepare_dir(const Common& c) {
  const fs::path dir = resolve_output_dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create " + dir.string() + ": " + ec.message());
  return dir;
}

void note(const std::string& msg) { std::cerr << msg << '\n'; }

// -- solve -----------------------------------------------------------------------

struct SolveArgs {
  Common c;
  double p = 2.0;
  int mesh_points = 2001;
  double tol = 1e-10;
  std::string stem = "profile";
};

int run_solve(const SolveArgs& a) {
  validate_instance(a.c);
  validate_p(a.c, a.p);
  if (a.mesh_points < 3) throw UsageError("--mesh-points must be >= 3");
  if (!(a.tol > 0.0)) throw UsageError("--tol must be > 0");
  const fs::path dir = prepare_dir(a.c);
  RadialOptions ro;
  ro.mesh_points = a.mesh_points;
  ro.tol = a.tol;
  const RadialProfile prof = solve_radial(HenonParams::make(a.c.N, a.c.alpha, a.p), ro);
  for (const auto& w : prof.warnings) note("warning: " + w);
  write_profile_csv(dir / (a.stem + ".csv"), prof);
  write_json(dir / (a.stem + ".json"), profile_header(prof));
  note("sup_norm = " + format_number(prof.sup_norm) + ", residual = " + format_number(prof.residual));
  return kOk;
}

// -- spectrum --------------------------------------------------------------------

struct SpectrumArgs {
  Common c;
  double p = 2.0;
  std::vector<int> modes{0, 1, 2};
  int num = 3;
  int k_max = 2;
  bool eigenfunctions = false;
};

int run_spectrum(const SpectrumArgs& a) {
  validate_instance(a.c);
  validate_p(a.c, a.p);
  if (a.num < 1) throw UsageError("--num must be >= 1");
  for (int k : a.modes)
    if (k < 0) throw UsageError("--k values must be >= 0");
  if (a.k_max < 2) throw UsageError("--k-max must be >= 2");
  const fs::path dir = prepare_dir(a.c);
  const RadialProfile prof = solve_radial(HenonParams::make(a.c.N, a.c.alpha, a.p));
  Json doc;
  doc["params"] = to_json(prof.params);
  doc["modes"] = Json::array();
  for (int k : a.modes) {
    const ModeSpectrum ms = solve_mode_spectrum(make_mode_problem(prof, k), a.num);
    doc["modes"].push_back(to_json(ms));
    if (a.eigenfunctions) write_eigenfunctions_csv(dir / ("eigenfunctions_k" + std::to_string(k) + ".csv"), ms);
  }
  doc["morse"] = to_json(morse_index(prof, a.k_max));
  write_json(dir / "spectrum.json", doc);
  note("morse_index = " + doc["morse"]["morse_index"].dump());
  return kOk;
}

// -- scan ------------------------------------------------------------------------

struct ScanArgs {
  Common c;
  int grid = 101;
  double delta = 1e-2;
  double refine = kDegeneracyTol;
  int k_max = 2;
};

void write_degeneracy(const fs::path& dir, const DegeneracyReport& rep) {
  fs::create_directories(dir / "kernels");
  for (std::size_t i = 0; i < rep.points.size(); ++i)
    write_kernel_csv(dir / "kernels" / ("kernel_" + std::to_string(i) + ".csv"), rep.points[i]);
  write_json(dir / "degen.json", to_json(rep, "kernels"));
}

int run_scan(const ScanArgs& a) {
  validate_instance(a.c);
  if (a.grid < 2) throw UsageError("--grid must be >= 2");
  if (!(a.delta > 0.0)) throw UsageError("--delta must be > 0");
  if (!(a.refine > 0.0)) throw UsageError("--refine must be > 0");
  if (a.k_max < 2) throw UsageError("--k-max must be >= 2");
  const double pa = critical_exponent(a.c.N, a.c.alpha);
  if (1.0 + a.delta >= pa - a.delta) throw UsageError("--delta leaves an empty scan interval");
  const fs::path dir = prepare_dir(a.c);
  ScanOptions so;
  so.k_max = a.k_max;
  so.workers = a.c.workers;
  const ScanResult s = scan(a.c.N, a.c.alpha, default_grid(a.c.N, a.c.alpha, a.grid, a.delta), so);
  write_scan_csv(dir / "scan.csv", s);
  write_json(dir / "scan.json", to_json(s));
  note("scan: " + std::to_string(s.rows.size()) + " rows, " + std::to_string(s.failures.size()) + " failures");
  const DegeneracyReport rep = find_degeneracy_points(s, a.refine, so);
  write_degeneracy(dir, rep);
  for (const auto& d : rep.points)
    note("degeneracy p = " + format_number(d.p_bar) + (d.changing ? " (index changes)" : ""));
  return kOk;
}

// -- asymptotics -----------------------------------------------------------------

struct AsymArgs {
  Common c;
  std::vector<double> low{1.5, 1.1, 1.01, 1.001};
  std::vector<double> high;  // default p_α − {1, 0.5, 0.1, 0.02}
  double window = 5.0;
};

int run_asymptotics(const AsymArgs& a) {
  validate_instance(a.c);
  const double pa = critical_exponent(a.c.N, a.c.alpha);
  std::vector<double> high = a.high;
  if (high.empty()) high = {pa - 1.0, pa - 0.5, pa - 0.1, pa - 0.02};
  for (double p : a.low) validate_p(a.c, p);
  for (double p : high) validate_p(a.c, p);
  if (a.low.size() < 2) throw UsageError("--p-low needs at least two exponents");
  const fs::path dir = prepare_dir(a.c);
  const PToOneReport low = verify_p_to_1(a.c.N, a.c.alpha, a.low);
  const PToCriticalReport crit = verify_p_to_critical(a.c.N, a.c.alpha, high);
  const BlowupReport blow = blowup_table(a.c.N, a.c.alpha, high);
  write_p_to_1_csv(dir / "p_to_1.csv", low);
  write_p_to_critical_csv(dir / "p_to_critical.csv", crit);
  bool ef = true;
  for (std::size_t i = 0; i < crit.profiles.size(); ++i) {
    const HenonParams hp = HenonParams::make(a.c.N, a.c.alpha, crit.profiles[i].p);
    write_rescaled_csv(dir / ("rescaled_" + std::to_string(i) + ".csv"), crit.profiles[i], hp);
    ef = ef && emden_fowler(crit.profiles[i], hp).bounded;
  }
  const WeightedEigenpair eig = weighted_first_eigen(a.c.N, a.c.alpha, 1.0);
  {
    CsvWriter csv(dir / "phi_1.csv", {"r", "phi_1"});
    for (std::size_t i = 0; i < eig.mesh.size(); ++i) csv.row({eig.mesh[i], eig.phi_1[i]});
    csv.close();
  }
  Json doc;
  doc["p_to_1"] = to_json(low);
  doc["p_to_critical"] = to_json(crit);
  doc["blowup"] = to_json(blow);
  doc["checks"] = {{"deviation_decreasing", low.deviation_decreasing},
                   {"extrapolation_within_1pct", low.extrapolated_error <= 0.01},
                   {"bounded_by_U", crit.all_bounded},
                   {"distance_to_U_decreasing", crit.distance_decreasing},
                   {"emden_fowler_bound", ef},
                   {"blowup_tail_increasing", blow.tail_increasing}};
  write_json(dir / "asymptotics.json", doc);
  return kOk;
}

// -- continue --------------------------------------------------------------------

struct ContinueArgs {
  Common c;
  std::string from;
  std::size_t which = 0;
  double eps = 1e-2;
  double step = 0.05;
  int steps = 200;
  int nr = 513;
  int nt = 33;
  int snapshot_every = 10;
};

void write_branch(const fs::path& dir, const AxisymGrid& grid, const Branch& br, int every) {
  write_json(dir / "branch.json", to_json(br, grid));
  write_branch_csv(dir / "branch.csv", br);
  fs::create_directories(dir / "fields");
  char name[32];
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    if (every <= 0 || (i % every != 0 && i + 1 != br.points.size())) continue;
    std::snprintf(name, sizeof name, "point_%04zu.csv", i);
    write_field_csv(dir / "fields" / name, grid, br.points[i].state);
  }
}

int run_continue(const ContinueArgs& a) {
  if (a.from.empty()) throw UsageError("--from-degeneracy is required");
  if (!(a.eps > 0.0) || !(a.step > 0.0) || a.steps < 1) throw UsageError("--eps, --step, --steps must be positive");
  if (a.nr < 4 || a.nt < 3) throw UsageError("grid too small");
  const Json doc = read_json(a.from);
  Common c = a.c;
  c.N = doc.value("N", c.N);
  c.alpha = doc.value("alpha", c.alpha);
  validate_instance(c);
  const DegeneracyPoint dp = read_degeneracy_point(a.from, a.which);
  if (dp.kernel.empty()) throw UsageError("degeneracy file carries no kernel");
  const fs::path dir = prepare_dir(c);
  GridOptions go;
  go.radial_points = a.nr;
  go.angular_points = a.nt;
  go.mesh_scale = std::clamp(1.0 / solve_radial(HenonParams::make(c.N, c.alpha, dp.p_bar)).R0, 1e-3, 0.5);
  const AxisymGrid grid = AxisymGrid::make(c.N, c.alpha, go);
  const BranchOrigin origin = prepare_origin(grid, dp);
  note("cos-sector crossing at p = " + format_number(origin.p_bar_discrete));
  ContinuationOptions co;
  co.epsilon = a.eps;
  co.step = a.step;
  co.max_steps = a.steps;
  const Branch br = continue_branch(grid, origin, co);
  write_branch(dir, grid, br, a.snapshot_every);
  note("branch: " + std::to_string(br.points.size()) + " points, " + std::string(to_string(br.termination)));
  return kOk;
}

// -- reproduce -------------------------------------------------------------------

struct ReproduceArgs {
  Common c;
  std::uint64_t seed = 20240607;
  int steps = 40;
};

int run_reproduce(const ReproduceArgs& a) {
  validate_instance(a.c);
  const fs::path dir = prepare_dir(a.c);
  AcceptanceOptions opt;
  opt.N = a.c.N;
  opt.alpha = a.c.alpha;
  opt.seed = a.seed;
  opt.workers = a.c.workers;
  opt.continuation.max_steps = a.steps;
  const AcceptanceRun run = run_acceptance(opt, [](const CheckResult& r) {
    std::fprintf(stderr, "%s %s (%.1f s): %s\n", r.passed ? "PASS" : "FAIL", r.id.c_str(), r.seconds,
                 r.detail.c_str());
  });
  if (run.scan) {
    write_scan_csv(dir / "scan.csv", *run.scan);
    write_json(dir / "scan.json", to_json(*run.scan));
  }
  if (run.degeneracy) write_degeneracy(dir, *run.degeneracy);
  if (run.p_to_1) write_p_to_1_csv(dir / "p_to_1.csv", *run.p_to_1);
  if (run.p_to_critical) {
    write_p_to_critical_csv(dir / "p_to_critical.csv", *run.p_to_critical);
    const auto& profiles = run.p_to_critical->profiles;
    for (std::size_t i = 0; i < profiles.size(); ++i)
      write_rescaled_csv(dir / ("rescaled_" + std::to_string(i) + ".csv"), profiles[i],
                         HenonParams::make(a.c.N, a.c.alpha, profiles[i].p));
  }
  if (run.branch && run.grid) write_branch(dir, *run.grid, *run.branch, 10);
  // timings are left out so that reruns give identical files
  Json checks = Json::array();
  for (const auto& r : run.checks)
    checks.push_back({{"id", r.id}, {"description", r.description}, {"passed", r.passed}, {"detail", r.detail}});
  write_json(dir / "summary.json", {{"N", a.c.N}, {"alpha", a.c.alpha}, {"seed", a.seed},
                                    {"all_passed", run.all_passed()}, {"checks", checks}});
  return run.all_passed() ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial solutions, spectra, Morse index and symmetry-breaking branches of -Lu = |x|^a u^p in the unit ball"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "radial solution u_p");
  add_common(s, solve.c);
  s->add_option("--p", solve.p, "exponent in (1, p_alpha)")->required();
  s->add_option("--mesh-points", solve.mesh_points, "output mesh size");
  s->add_option("--tol", solve.tol, "integrator tolerance");
  s->add_option("--stem", solve.stem, "output file stem");

  SpectrumArgs spec;
  auto* sp = app.add_subcommand("spectrum", "mode spectra and Morse index at one p");
  add_common(sp, spec.c);
  sp->add_option("--p", spec.p, "exponent in (1, p_alpha)")->required();
  sp->add_option("--k", spec.modes, "angular modes");
  sp->add_option("--num", spec.num, "eigenvalues per mode");
  sp->add_option("--k-max", spec.k_max, "Morse count truncation");
  sp->add_flag("--eigenfunctions", spec.eigenfunctions, "also write eigenfunction CSVs");

  ScanArgs sc;
  auto* scn = app.add_subcommand("scan", "Lambda_11 and Morse index across (1, p_alpha), degeneracy points");
  add_common(scn, sc.c);
  scn->add_option("--grid", sc.grid, "number of scan points");
  scn->add_option("--delta", sc.delta, "distance of the grid from 1 and p_alpha");
  scn->add_option("--refine", sc.refine, "|Lambda_11 - 1| tolerance for the refined roots");
  scn->add_option("--k-max", sc.k_max, "Morse count truncation");

  AsymArgs as;
  auto* asy = app.add_subcommand("asymptotics", "endpoint behaviour as p -> 1 and p -> p_alpha");
  add_common(asy, as.c);
  asy->add_option("--p-low", as.low, "exponents decreasing to 1");
  asy->add_option("--p-high", as.high, "exponents increasing to p_alpha");

  ContinueArgs co;
  auto* cnt = app.add_subcommand("continue", "nonradial branch from a degeneracy point");
  add_common(cnt, co.c);
  cnt->add_option("--from-degeneracy", co.from, "degen.json written by scan")->required();
  cnt->add_option("--which", co.which, "index of the degeneracy point");
  cnt->add_option("--eps", co.eps, "branch-switch amplitude relative to the sup norm");
  cnt->add_option("--step", co.step, "initial arclength step");
  cnt->add_option("--steps", co.steps, "maximum number of branch points");
  cnt->add_option("--nr", co.nr, "radial grid points");
  cnt->add_option("--nt", co.nt, "angular grid points");
  cnt->add_option("--snapshot-every", co.snapshot_every, "field snapshot stride (0: none)");

  ReproduceArgs rp;
  auto* rep = app.add_subcommand("reproduce", "full acceptance suite and report bundle");
  add_common(rep, rp.c);
  rep->add_option("--seed", rp.seed, "seed for the random test functions");
  rep->add_option("--steps", rp.steps, "maximum number of branch points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  std::string command;
  Common* common = nullptr;
  for (auto* sub : app.get_subcommands()) command = sub->get_name();
  if (command == "solve") common = &solve.c;
  if (command == "spectrum") common = &spec.c;
  if (command == "scan") common = &sc.c;
  if (command == "asymptotics") common = &as.c;
  if (command == "continue") common = &co.c;
  if (command == "reproduce") common = &rp.c;

  try {
    if (command == "solve") return run_solve(solve);
    if (command == "spectrum") return run_spectrum(spec);
    if (command == "scan") return run_scan(sc);
    if (command == "asymptotics") return run_asymptotics(as);
    if (command == "continue") return run_continue(co);
    if (command == "reproduce") return run_reproduce(rp);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
    try {
      const fs::path dir = resolve_output_dir(common ? common->out : "");
      fs::create_directories(dir);
      write_json(dir / "error.json", {{"command", command}, {"code", std::string(to_string(e.code()))},
                                      {"message", e.what()}});
    } catch (...) {
    }
    return kNumerical;
  }
  return kUsage;
}
