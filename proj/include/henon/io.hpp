#pragma once

// CSV tables and JSON documents written by the command-line tool. Every file
// carries schema_version: JSON as a top-level field, CSV as a leading
// "# schema_version: N" comment line. Numbers are printed with 17 significant
// digits so identical inputs give byte-identical files.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "henon/asymptotics.hpp"
#include "henon/continuation.hpp"
#include "henon/morse_scan.hpp"
#include "henon/radial.hpp"
#include "henon/spectral.hpp"

namespace henon {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kOutputDirEnv = "HENON_OUTPUT_DIR";

using Json = nlohmann::ordered_json;

/// `flag` if non-empty, else $HENON_OUTPUT_DIR, else "out".
std::filesystem::path resolve_output_dir(const std::string& flag);

std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns,
            const std::vector<std::string>& comments = {});
  void row(const std::vector<double>& values);
  void close();

 private:
  std::ofstream out_;
  std::size_t width_;
};

/// Writes {"schema_version": …, …doc} with two-space indentation.
void write_json(const std::filesystem::path& path, const Json& doc);
Json read_json(const std::filesystem::path& path);

Json to_json(const HenonParams& params);
Json profile_header(const RadialProfile& profile);
void write_profile_csv(const std::filesystem::path& path, const RadialProfile& profile);

Json to_json(const ModeSpectrum& spectrum);
void write_eigenfunctions_csv(const std::filesystem::path& path, const ModeSpectrum& spectrum);
Json to_json(const MorseReport& report);

void write_scan_csv(const std::filesystem::path& path, const ScanResult& scan);
Json to_json(const ScanResult& scan);  // metadata and failures, not the rows
Json to_json(const DegeneracyReport& report, const std::string& kernel_dir = "");
void write_kernel_csv(const std::filesystem::path& path, const DegeneracyPoint& point);
/// Reads one degeneracy point (with its kernel) back from a degeneracy JSON.
DegeneracyPoint read_degeneracy_point(const std::filesystem::path& json_path, std::size_t which = 0);

Json to_json(const PToOneReport& report);
void write_p_to_1_csv(const std::filesystem::path& path, const PToOneReport& report);
Json to_json(const PToCriticalReport& report);
void write_p_to_critical_csv(const std::filesystem::path& path, const PToCriticalReport& report);
void write_rescaled_csv(const std::filesystem::path& path, const RescaledProfile& rescaled, const HenonParams& params);
Json to_json(const BlowupReport& report);

Json to_json(const Branch& branch, const AxisymGrid& grid);
void write_branch_csv(const std::filesystem::path& path, const Branch& branch);
/// One field snapshot: "# key: value" header lines then r, theta, u.
void write_field_csv(const std::filesystem::path& path, const AxisymGrid& grid, const AxisymState& state);

}  // namespace henon
