// Python access to the radial solver, mode spectra, scans, asymptotics and the
// quadratic form. Vectors come back as NumPy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "henon/acceptance.hpp"
#include "henon/asymptotics.hpp"
#include "henon/error.hpp"
#include "henon/io.hpp"
#include "henon/morse_scan.hpp"

namespace py = pybind11;
using namespace henon;

namespace {

py::array_t<double> arr(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

using Release = py::call_guard<py::gil_scoped_release>;

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Positive solutions of -Lu = |x|^alpha u^p in the unit ball: radial profiles, spectra, Morse index.";

  static py::exception<Error> henon_error(m, "HenonError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string code(to_string(e.code()));
      const py::object type = py::reinterpret_borrow<py::object>(henon_error);
      py::object inst = type(code + ": " + e.what());
      inst.attr("code") = code;
      PyErr_SetObject(henon_error.ptr(), inst.ptr());
    }
  });

  m.attr("schema_version") = kSchemaVersion;
  m.def("critical_exponent", &critical_exponent, py::arg("N"), py::arg("alpha"));

  py::class_<HenonParams>(m, "HenonParams")
      .def(py::init(&HenonParams::make), py::arg("N"), py::arg("alpha"), py::arg("p"))
      .def_readonly("N", &HenonParams::N)
      .def_readonly("alpha", &HenonParams::alpha)
      .def_readonly("p", &HenonParams::p)
      .def_readonly("p_alpha", &HenonParams::p_alpha)
      .def_readonly("kappa", &HenonParams::kappa)
      .def_readonly("C_alpha", &HenonParams::C_alpha)
      .def("subcritical", &HenonParams::subcritical)
      .def("warnings", &HenonParams::warnings);

  py::class_<RadialProfile>(m, "RadialProfile")
      .def_readonly("params", &RadialProfile::params)
      .def_property_readonly("mesh", [](const RadialProfile& p) { return arr(p.mesh); })
      .def_property_readonly("u_hat", [](const RadialProfile& p) { return arr(p.u_hat); })
      .def_property_readonly("u", [](const RadialProfile& p) { return arr(p.u()); })
      .def_property_readonly("u_prime", [](const RadialProfile& p) { return arr(p.u_prime()); })
      .def_property_readonly("w", [](const RadialProfile& p) { return arr(p.w()); })
      .def_property_readonly("z", [](const RadialProfile& p) { return arr(p.z()); })
      .def_property_readonly("g", [](const RadialProfile& p) { return arr(p.g); })
      .def_readonly("R0", &RadialProfile::R0)
      .def_readonly("sup_norm", &RadialProfile::sup_norm)
      .def_readonly("log_sup_norm", &RadialProfile::log_sup_norm)
      .def_readonly("residual", &RadialProfile::residual)
      .def_readonly("warnings", &RadialProfile::warnings);

  m.def(
      "solve_radial",
      [](int N, double alpha, double p, int mesh_points, double tol) {
        RadialOptions o;
        o.mesh_points = mesh_points;
        o.tol = tol;
        return solve_radial(HenonParams::make(N, alpha, p), o);
      },
      py::arg("N"), py::arg("alpha"), py::arg("p"), py::arg("mesh_points") = 2001, py::arg("tol") = 1e-10,
      Release());

  py::class_<ModeSpectrum>(m, "ModeSpectrum")
      .def_readonly("p", &ModeSpectrum::p)
      .def_readonly("k", &ModeSpectrum::k)
      .def_readonly("mu_k", &ModeSpectrum::mu_k)
      .def_property_readonly("eigenvalues", [](const ModeSpectrum& s) { return arr(s.eigenvalues); })
      .def_property_readonly("mesh", [](const ModeSpectrum& s) { return arr(s.mesh); })
      .def_property_readonly("eigenfunctions",
                             [](const ModeSpectrum& s) {
                               py::list out;
                               for (const auto& e : s.eigenfunctions) out.append(arr(e));
                               return out;
                             })
      .def_property_readonly("residuals", [](const ModeSpectrum& s) { return arr(s.residuals); })
      .def_readonly("zero_counts", &ModeSpectrum::zero_counts);

  m.def(
      "mode_spectrum",
      [](const RadialProfile& prof, int k, int num) { return solve_mode_spectrum(make_mode_problem(prof, k), num); },
      py::arg("profile"), py::arg("k"), py::arg("num") = 3, Release());
  m.def(
      "prufer_eigenvalue",
      [](const RadialProfile& prof, int k, int i) { return prufer_eigenvalue(make_mode_problem(prof, k), i); },
      py::arg("profile"), py::arg("k"), py::arg("i") = 1, Release());
  m.def("angular_eigenvalue", &angular_eigenvalue, py::arg("k"), py::arg("N"));
  m.def("multiplicity", &multiplicity, py::arg("k"), py::arg("N"));

  py::class_<MorseReport>(m, "MorseReport")
      .def_readonly("p", &MorseReport::p)
      .def_readonly("lambda_11", &MorseReport::lambda_11)
      .def_readonly("morse_index", &MorseReport::morse_index)
      .def_readonly("morse_index_shortcut", &MorseReport::morse_index_shortcut)
      .def_readonly("degenerate", &MorseReport::degenerate)
      .def_readonly("lambda_1k", &MorseReport::lambda_1k)
      .def_readonly("negative_counts", &MorseReport::negative_counts);
  m.def(
      "morse_index", [](const RadialProfile& prof, int k_max) { return morse_index(prof, k_max); },
      py::arg("profile"), py::arg("k_max") = 2, Release());

  m.def("default_grid", &default_grid, py::arg("N"), py::arg("alpha"), py::arg("points") = 101,
        py::arg("delta") = 1e-2);

  py::class_<ScanRow>(m, "ScanRow")
      .def_readonly("p", &ScanRow::p)
      .def_readonly("lambda_11", &ScanRow::lambda_11)
      .def_readonly("morse_index", &ScanRow::morse_index)
      .def_readonly("morse_index_shortcut", &ScanRow::morse_index_shortcut)
      .def_readonly("sup_norm", &ScanRow::sup_norm);
  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("rows", &ScanResult::rows)
      .def_property_readonly("failures", [](const ScanResult& s) {
        py::list out;
        for (const auto& f : s.failures) out.append(py::make_tuple(f.p, f.error));
        return out;
      });
  m.def(
      "scan",
      [](int N, double alpha, std::vector<double> grid, unsigned workers) {
        ScanOptions o;
        o.workers = workers;
        return scan(N, alpha, std::move(grid), o);
      },
      py::arg("N"), py::arg("alpha"), py::arg("grid"), py::arg("workers") = 0, Release());

  py::class_<DegeneracyPoint>(m, "DegeneracyPoint")
      .def_readonly("p_bar", &DegeneracyPoint::p_bar)
      .def_readonly("p_lo", &DegeneracyPoint::p_lo)
      .def_readonly("p_hi", &DegeneracyPoint::p_hi)
      .def_readonly("defect", &DegeneracyPoint::defect)
      .def_readonly("changing", &DegeneracyPoint::changing)
      .def_readonly("morse_below", &DegeneracyPoint::morse_below)
      .def_readonly("morse_above", &DegeneracyPoint::morse_above)
      .def_property_readonly("mesh", [](const DegeneracyPoint& d) { return arr(d.mesh); })
      .def_property_readonly("kernel", [](const DegeneracyPoint& d) { return arr(d.kernel); });
  py::class_<DegeneracyReport>(m, "DegeneracyReport")
      .def_readonly("points", &DegeneracyReport::points)
      .def_readonly("changing_count", &DegeneracyReport::changing_count)
      .def_readonly("parity_odd", &DegeneracyReport::parity_odd)
      .def_readonly("possible_tangencies", &DegeneracyReport::possible_tangencies);
  m.def(
      "find_degeneracy_points",
      [](const ScanResult& s, double tol) { return find_degeneracy_points(s, tol); }, py::arg("scan"),
      py::arg("tol") = kDegeneracyTol, Release());

  py::class_<QuadformValue>(m, "QuadformValue")
      .def_readonly("value", &QuadformValue::value)
      .def_readonly("scale", &QuadformValue::scale)
      .def_readonly("t1", &QuadformValue::t1)
      .def_readonly("t2", &QuadformValue::t2)
      .def_readonly("t3", &QuadformValue::t3);
  m.def(
      "quadform_cosine",
      [](const RadialProfile& prof, std::vector<double> c) { return quadform_R4(prof, cosine_series(std::move(c))); },
      py::arg("profile"), py::arg("coefficients"), Release(),
      "Quadratic form at v = sum_m c_m cos((m - 1/2) pi r).");
  m.def(
      "quadform_profile", [](const RadialProfile& prof) { return quadform_R4(prof, profile_function(prof)); },
      py::arg("profile"), Release());

  m.def(
      "weighted_first_eigenvalue",
      [](int N, double alpha, double R) { return weighted_first_eigen(N, alpha, R).lambda_1; }, py::arg("N"),
      py::arg("alpha"), py::arg("R") = 1.0, Release());
  m.def("limit_profile", &limit_profile, py::arg("N"), py::arg("alpha"), py::arg("x"));
  m.def(
      "p_to_1",
      [](int N, double alpha, std::vector<double> ps) {
        PToOneReport r;
        {
          py::gil_scoped_release nogil;
          r = verify_p_to_1(N, alpha, ps);
        }
        py::dict d;
        d["lambda_1"] = r.lambda_1;
        d["extrapolated"] = r.extrapolated;
        d["extrapolated_error"] = r.extrapolated_error;
        d["deviation_decreasing"] = r.deviation_decreasing;
        d["distance_decreasing"] = r.distance_decreasing;
        py::list rows;
        for (const auto& w : r.rows) {
          py::dict row;
          row["p"] = w.p;
          row["sup_pow"] = w.sup_pow;
          row["deviation"] = w.deviation;
          row["sup_distance"] = w.sup_distance;
          row["morse_index"] = w.morse_index;
          rows.append(row);
        }
        d["rows"] = rows;
        return d;
      },
      py::arg("N"), py::arg("alpha"), py::arg("p_list"));
  m.def(
      "rescaled_sup_distance",
      [](const RadialProfile& prof, double window) {
        const RescaledProfile r = rescale_profile(prof, window);
        return py::make_tuple(r.sup_distance, r.max_excess, r.bounded_by_U);
      },
      py::arg("profile"), py::arg("window") = 5.0);

  m.def(
      "run_acceptance",
      [](unsigned workers) {
        AcceptanceOptions o;
        o.workers = workers;
        AcceptanceRun run;
        {
          py::gil_scoped_release nogil;
          run = run_acceptance(o);
        }
        py::list out;
        for (const auto& c : run.checks) {
          py::dict d;
          d["id"] = c.id;
          d["passed"] = c.passed;
          d["detail"] = c.detail;
          out.append(d);
        }
        return out;
      },
      py::arg("workers") = 0, "Full end-to-end check list for N = 3, alpha = 1 (minutes).");
}
