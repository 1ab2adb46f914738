#pragma once

// The end-to-end checks for one (N, α) instance. Shared by the acceptance
// test binary and the `reproduce` command, which also writes the artifacts.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "henon/asymptotics.hpp"
#include "henon/continuation.hpp"
#include "henon/morse_scan.hpp"

namespace henon {

struct CheckResult {
  std::string id;
  std::string description;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  int N = 3;
  double alpha = 1.0;
  int scan_points = 101;
  int scan_points_fine = 201;
  double refine_tol = kDegeneracyTol;
  GridOptions grid;           // mesh_scale is replaced by 1/R₀(p̄)
  ContinuationOptions continuation;
  std::uint64_t seed = 20240607;
  int random_functions = 100;
  unsigned workers = 0;
};

/// Everything the checks computed, for writing a report bundle.
struct AcceptanceRun {
  std::vector<CheckResult> checks;
  std::optional<ScanResult> scan;
  std::optional<DegeneracyReport> degeneracy;
  std::optional<DegeneracyReport> degeneracy_fine;
  std::optional<PToOneReport> p_to_1;
  std::optional<PToCriticalReport> p_to_critical;
  std::optional<BlowupReport> blowup;
  std::optional<AxisymGrid> grid;
  std::optional<Branch> branch;
  bool all_passed() const;
};

/// Called after every check, e.g. to print progress.
using CheckCallback = std::function<void(const CheckResult&)>;

/// Runs the checks in order. A check that throws is recorded as failed with
/// the error text; later checks that need its output are failed likewise.
AcceptanceRun run_acceptance(const AcceptanceOptions& options = {}, const CheckCallback& on_check = {});

/// Eigenvalue and inequality samples used by the first two checks.
inline const std::vector<double> kOracleSamples{1.5, 2.0, 3.0, 5.0, 6.5};

}  // namespace henon
