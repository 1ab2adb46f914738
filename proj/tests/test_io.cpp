// Output files: schema version, determinism, round trips.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "henon/error.hpp"
#include "henon/io.hpp"

using namespace henon;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("henon_io_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("output directory precedence") {
  ::unsetenv(kOutputDirEnv);
  CHECK(resolve_output_dir("") == fs::path("out"));
  ::setenv(kOutputDirEnv, "/tmp/from_env", 1);
  CHECK(resolve_output_dir("") == fs::path("/tmp/from_env"));
  CHECK(resolve_output_dir("given") == fs::path("given"));
  ::unsetenv(kOutputDirEnv);
}

TEST_CASE("numbers round-trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, 2.048607777354, 1e-300, -7.25e12}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("CSV and JSON carry the schema version") {
  const fs::path d = scratch_dir("schema");
  {
    CsvWriter csv(d / "t.csv", {"a", "b"}, {"note: x"});
    csv.row({1.0, 2.5});
    csv.close();
  }
  const std::string text = slurp(d / "t.csv");
  CHECK(text.rfind("# schema_version: " + std::to_string(kSchemaVersion) + "\n", 0) == 0);
  CHECK(text.find("# note: x\na,b\n1,2.5\n") != std::string::npos);
  write_json(d / "t.json", {{"x", 1}, {"schema_version", 99}});
  const Json j = read_json(d / "t.json");
  CHECK(j.begin().key() == "schema_version");
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["x"] == 1);
  CHECK_THROWS_AS(CsvWriter(d / "missing" / "x.csv", {"a"}), Error);
}

TEST_CASE("identical inputs give byte-identical files") {
  const fs::path d = scratch_dir("determinism");
  for (int run = 0; run < 2; ++run) {
    const RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, 2.0));
    write_profile_csv(d / ("profile_" + std::to_string(run) + ".csv"), prof);
    write_json(d / ("profile_" + std::to_string(run) + ".json"), profile_header(prof));
    const ScanResult s = scan(3, 1.0, {1.5, 2.5, 3.5});
    write_scan_csv(d / ("scan_" + std::to_string(run) + ".csv"), s);
  }
  for (const char* stem : {"profile_%.csv", "profile_%.json", "scan_%.csv"}) {
    std::string a = stem, b = stem;
    a.replace(a.find('%'), 1, "0");
    b.replace(b.find('%'), 1, "1");
    CHECK(slurp(d / a) == slurp(d / b));
  }
  const std::string csv = slurp(d / "profile_0.csv");
  CHECK(csv.find("r,u,u_prime,w,z,g,u_hat\n") != std::string::npos);
}

TEST_CASE("degeneracy points round-trip with their kernels") {
  const fs::path d = scratch_dir("degen");
  const DegeneracyReport rep = find_degeneracy_points(scan(3, 1.0, {2.0, 2.1}));
  REQUIRE(rep.points.size() == 1);
  fs::create_directories(d / "kernels");
  write_kernel_csv(d / "kernels" / "kernel_0.csv", rep.points[0]);
  write_json(d / "degen.json", to_json(rep, "kernels"));
  const DegeneracyPoint back = read_degeneracy_point(d / "degen.json");
  const DegeneracyPoint& src = rep.points[0];
  CHECK(back.p_bar == src.p_bar);
  CHECK(back.p_lo == src.p_lo);
  CHECK(back.morse_above == src.morse_above);
  CHECK(back.changing);
  REQUIRE(back.kernel.size() == src.kernel.size());
  for (std::size_t i = 0; i < src.kernel.size(); ++i) {
    CHECK(back.kernel[i] == src.kernel[i]);
    CHECK(back.mesh[i] == src.mesh[i]);
  }
  CHECK_THROWS_AS(read_degeneracy_point(d / "degen.json", 3), Error);
  write_json(d / "bad.json", {{"points", Json::array()}});
  Json bad = read_json(d / "bad.json");
  bad["schema_version"] = kSchemaVersion + 1;
  std::ofstream(d / "bad.json") << bad.dump();
  CHECK_THROWS_AS(read_degeneracy_point(d / "bad.json"), Error);
}

TEST_CASE("non-finite values become strings in JSON") {
  RadialProfile prof = solve_radial(HenonParams::make(3, 1.0, 2.0));
  prof.sup_norm = std::numeric_limits<double>::infinity();
  const Json j = profile_header(prof);
  CHECK(j["sup_norm"] == "inf");
}
