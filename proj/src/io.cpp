#include "henon/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "henon/error.hpp"

namespace henon {

namespace fs = std::filesystem;

fs::path resolve_output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "out";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const fs::path& path, const std::vector<std::string>& columns,
                     const std::vector<std::string>& comments)
    : out_(path), width_(columns.size()) {
  if (!out_) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  out_ << "# schema_version: " << kSchemaVersion << '\n';
  for (const auto& c : comments) out_ << "# " << c << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw Error(ErrorCode::io_error, "CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << '\n';
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw Error(ErrorCode::io_error, "failed writing CSV");
}

void write_json(const fs::path& path, const Json& doc) {
  Json full;
  full["schema_version"] = kSchemaVersion;
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "schema_version") full[it.key()] = it.value();
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  out << full.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::io_error, "failed writing " + path.string());
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error, path.string() + ": " + e.what());
  }
}

namespace {

// JSON has no infinity; keep the value readable and explicit.
Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

Json to_json(const HenonParams& hp) {
  return {{"N", hp.N}, {"alpha", hp.alpha}, {"p", hp.p}, {"p_alpha", hp.p_alpha},
          {"kappa", hp.kappa}, {"C_alpha", hp.C_alpha}};
}

Json profile_header(const RadialProfile& prof) {
  Json j;
  j["params"] = to_json(prof.params);
  j["sup_norm"] = number(prof.sup_norm);
  j["log_sup_norm"] = prof.log_sup_norm;
  j["first_zero_R0"] = prof.R0;
  j["residual"] = prof.residual;
  j["mesh_size"] = prof.size();
  j["warnings"] = prof.warnings;
  return j;
}

void write_profile_csv(const fs::path& path, const RadialProfile& prof) {
  CsvWriter csv(path, {"r", "u", "u_prime", "w", "z", "g", "u_hat"});
  const auto u = prof.u(), up = prof.u_prime(), w = prof.w(), z = prof.z();
  for (std::size_t i = 0; i < prof.size(); ++i)
    csv.row({prof.mesh[i], u[i], up[i], w[i], z[i], prof.g[i], prof.u_hat[i]});
  csv.close();
}

Json to_json(const ModeSpectrum& ms) {
  return {{"p", ms.p},
          {"k", ms.k},
          {"mu_k", ms.mu_k},
          {"eigenvalues", ms.eigenvalues},
          {"unextrapolated", ms.unextrapolated},
          {"residuals", ms.residuals},
          {"zero_counts", ms.zero_counts}};
}

void write_eigenfunctions_csv(const fs::path& path, const ModeSpectrum& ms) {
  std::vector<std::string> cols{"r"};
  for (std::size_t i = 0; i < ms.eigenfunctions.size(); ++i) cols.push_back("psi_" + std::to_string(i + 1));
  CsvWriter csv(path, cols, {"k: " + std::to_string(ms.k)});
  for (std::size_t n = 0; n < ms.mesh.size(); ++n) {
    std::vector<double> row{ms.mesh[n]};
    for (const auto& psi : ms.eigenfunctions) row.push_back(psi[n]);
    csv.row(row);
  }
  csv.close();
}

Json to_json(const MorseReport& r) {
  return {{"p", r.p},
          {"lambda_11", r.lambda_11},
          {"morse_index", r.morse_index},
          {"morse_index_shortcut", r.morse_index_shortcut},
          {"degenerate", r.degenerate},
          {"lambda_1k", r.lambda_1k},
          {"negative_counts", r.negative_counts}};
}

void write_scan_csv(const fs::path& path, const ScanResult& s) {
  CsvWriter csv(path, {"p", "lambda11", "morse_index", "morse_index_shortcut", "sup_norm", "log_sup_norm"});
  for (const auto& r : s.rows)
    csv.row({r.p, r.lambda_11, double(r.morse_index), double(r.morse_index_shortcut), r.sup_norm, r.log_sup_norm});
  csv.close();
}

Json to_json(const ScanResult& s) {
  Json fails = Json::array();
  for (const auto& f : s.failures) fails.push_back({{"p", f.p}, {"error", f.error}});
  return {{"N", s.N},        {"alpha", s.alpha}, {"k_max", s.k_max},       {"p_lo", s.p_lo},
          {"p_hi", s.p_hi},  {"grid", s.grid_spec}, {"rows", s.rows.size()}, {"failures", fails}};
}

Json to_json(const DegeneracyReport& rep, const std::string& kernel_dir) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& d = rep.points[i];
    Json j{{"p_bar", d.p_bar},
           {"bracket", {d.p_lo, d.p_hi}},
           {"lambda_11_bracket", {d.lambda_lo, d.lambda_hi}},
           {"defect", d.defect},
           {"changing", d.changing},
           {"morse_index_below", d.morse_below},
           {"morse_index_above", d.morse_above},
           {"iterations", d.iterations}};
    if (!kernel_dir.empty()) j["kernel_csv"] = kernel_dir + "/kernel_" + std::to_string(i) + ".csv";
    pts.push_back(j);
  }
  return {{"N", rep.scan.N},
          {"alpha", rep.scan.alpha},
          {"points", pts},
          {"changing_count", rep.changing_count},
          {"parity_odd", rep.parity_odd},
          {"grid_refined", rep.grid_refined},
          {"possible_tangencies", rep.possible_tangencies}};
}

void write_kernel_csv(const fs::path& path, const DegeneracyPoint& d) {
  CsvWriter csv(path, {"r", "psi_11"}, {"p_bar: " + format_number(d.p_bar)});
  for (std::size_t i = 0; i < d.mesh.size(); ++i) csv.row({d.mesh[i], d.kernel[i]});
  csv.close();
}

namespace {

std::vector<std::vector<double>> read_csv_columns(const fs::path& path, std::size_t ncols) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::vector<std::vector<double>> cols(ncols);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    for (std::size_t c = 0; c < ncols; ++c) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::io_error, "short CSV row in " + path.string());
      cols[c].push_back(std::stod(cell));
    }
  }
  return cols;
}

}  // namespace

DegeneracyPoint read_degeneracy_point(const fs::path& json_path, std::size_t which) {
  const Json doc = read_json(json_path);
  if (!doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion)
    throw Error(ErrorCode::io_error, "schema version mismatch in " + json_path.string());
  const auto& pts = doc.at("points");
  if (which >= pts.size()) throw Error(ErrorCode::invalid_argument, "no such degeneracy point");
  const auto& j = pts[which];
  DegeneracyPoint d;
  d.p_bar = j.at("p_bar");
  d.p_lo = j.at("bracket")[0];
  d.p_hi = j.at("bracket")[1];
  d.lambda_lo = j.at("lambda_11_bracket")[0];
  d.lambda_hi = j.at("lambda_11_bracket")[1];
  d.defect = j.at("defect");
  d.changing = j.at("changing");
  d.morse_below = j.at("morse_index_below");
  d.morse_above = j.at("morse_index_above");
  if (j.contains("kernel_csv")) {
    fs::path k = j.at("kernel_csv").get<std::string>();
    if (k.is_relative()) k = json_path.parent_path() / k;
    auto cols = read_csv_columns(k, 2);
    d.mesh = std::move(cols[0]);
    d.kernel = std::move(cols[1]);
  }
  return d;
}

Json to_json(const PToOneReport& r) {
  Json ratios = Json::array();
  for (std::size_t m = 0; m < r.modes.size(); ++m) {
    Json at_p = Json::array();
    for (const auto& w : r.rows) at_p.push_back({{"p", w.p}, {"Lambda", w.lambdas.at(m)}});
    ratios.push_back({{"i", r.modes[m].i}, {"k", r.modes[m].k}, {"limit", r.limit_ratios[m]}, {"values", at_p}});
  }
  return {{"N", r.N},
          {"alpha", r.alpha},
          {"lambda_1", r.lambda_1},
          {"extrapolated", r.extrapolated},
          {"extrapolated_error", r.extrapolated_error},
          {"deviation_decreasing", r.deviation_decreasing},
          {"distance_decreasing", r.distance_decreasing},
          {"non_convergent", r.non_convergent},
          {"eigenvalue_ratios", ratios}};
}

void write_p_to_1_csv(const fs::path& path, const PToOneReport& r) {
  std::vector<std::string> cols{"p", "sup_pow", "deviation", "sup_distance", "morse_index", "log_sup_norm"};
  std::vector<std::string> notes;
  for (std::size_t m = 0; m < r.modes.size(); ++m) {
    const std::string name = "Lambda_" + std::to_string(r.modes[m].i) + std::to_string(r.modes[m].k);
    cols.push_back(name);
    notes.push_back(name + " limit: " + format_number(r.limit_ratios[m]));
  }
  CsvWriter csv(path, cols, notes);
  for (const auto& w : r.rows) {
    std::vector<double> v{w.p, w.sup_pow, w.deviation, w.sup_distance, double(w.morse_index), w.log_sup_norm};
    v.insert(v.end(), w.lambdas.begin(), w.lambdas.end());
    csv.row(v);
  }
  csv.close();
}

Json to_json(const PToCriticalReport& r) {
  Json rows = Json::array();
  for (const auto& p : r.profiles)
    rows.push_back({{"p", p.p},
                    {"mu_p", p.mu_p},
                    {"max_excess", p.max_excess},
                    {"bounded_by_U", p.bounded_by_U},
                    {"window", p.window},
                    {"sup_distance", p.sup_distance}});
  return {{"profiles", rows}, {"all_bounded", r.all_bounded}, {"distance_decreasing", r.distance_decreasing}};
}

void write_p_to_critical_csv(const fs::path& path, const PToCriticalReport& r) {
  CsvWriter csv(path, {"p", "mu_p", "max_excess", "sup_distance"});
  for (const auto& p : r.profiles) csv.row({p.p, p.mu_p, p.max_excess, p.sup_distance});
  csv.close();
}

void write_rescaled_csv(const fs::path& path, const RescaledProfile& rp, const HenonParams& hp) {
  CsvWriter csv(path, {"x", "u_tilde", "U"}, {"p: " + format_number(rp.p), "mu_p: " + format_number(rp.mu_p)});
  for (std::size_t i = 0; i < rp.x.size(); ++i)
    csv.row({rp.x[i], rp.u_tilde[i], limit_profile(hp.N, hp.alpha, rp.x[i])});
  csv.close();
}

Json to_json(const BlowupReport& r) {
  Json rows = Json::array();
  for (const auto& w : r.rows)
    rows.push_back({{"p", w.p},
                    {"sup_norm", number(w.sup_norm)},
                    {"log_sup_norm", w.log_sup_norm},
                    {"R0", w.R0},
                    {"scaling_error", w.scaling_error}});
  return {{"rows", rows}, {"tail_increasing", r.tail_increasing}};
}

Json to_json(const Branch& br, const AxisymGrid& g) {
  Json pts = Json::array();
  for (const auto& p : br.points)
    pts.push_back({{"s", p.s},
                   {"p", p.p},
                   {"asymmetry", p.state.asymmetry},
                   {"sup_norm", p.state.sup_norm},
                   {"c1_norm", p.state.c1_norm},
                   {"residual", p.state.residual_norm},
                   {"positive", p.state.positive},
                   {"arclength_defect", p.arclength_defect},
                   {"newton_iterations", p.newton_iterations}});
  return {{"grid", {{"N", g.N}, {"alpha", g.alpha}, {"radial_points", g.nr()}, {"angular_points", g.nt()}}},
          {"origin", {{"p_bar", br.origin.p_bar}, {"p_bar_discrete", br.origin.p_bar_discrete}}},
          {"epsilon", br.epsilon},
          {"termination", std::string(to_string(br.termination))},
          {"detail", br.detail},
          {"folds", br.folds},
          {"sup_norm_range", {br.sup_norm_min, br.sup_norm_max}},
          {"c1_norm_range", {br.c1_norm_min, br.c1_norm_max}},
          {"points", pts}};
}

void write_branch_csv(const fs::path& path, const Branch& br) {
  CsvWriter csv(path, {"s", "p", "asymmetry", "sup_norm", "c1_norm", "residual"});
  for (const auto& p : br.points)
    csv.row({p.s, p.p, p.state.asymmetry, p.state.sup_norm, p.state.c1_norm, p.state.residual_norm});
  csv.close();
}

void write_field_csv(const fs::path& path, const AxisymGrid& g, const AxisymState& st) {
  CsvWriter csv(path, {"r", "theta", "u"},
                {"radial_points: " + std::to_string(g.nr()), "angular_points: " + std::to_string(g.nt()),
                 "N: " + std::to_string(g.N), "alpha: " + format_number(g.alpha), "p: " + format_number(st.p)});
  const Eigen::MatrixXd f = g.field(st.values);
  for (int i = 0; i < g.nr(); ++i)
    for (int j = 0; j < g.nt(); ++j) csv.row({g.r[i], g.theta[j], f(i, j)});
  csv.close();
}

}  // namespace henon
