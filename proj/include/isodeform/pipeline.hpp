#pragma once

#include "isodeform/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace isodeform {

std::string version_string();

/// Every named threshold used by a subcommand. Settable by name.
struct Tolerances {
  double iso = 1e-10;             // power-trace deviation of family members
  double rho = 1e-3;              // inequivalence evidence level
  double bracket = 1e-10;         // ⟨B2(Ax, Ay) − B(x, y), Z⟩ = 0
  double tau = 1e-12;
  double mean_curvature = 1e-8;
  double quotient = 1e-13;
  double fiber = 1e-8;            // fiber second fundamental form
  double orbit = 1e-8;            // orbit mean curvature j_0 vs j_end
  double sigma = 3.0;             // paired comparisons must agree within this many σ
  double control_sigma = 10.0;    // j vs 2j must separate by more than this
  double volume_rel_sigma = 1e-3;
  double scalar_rel_sigma = 5e-3;
  double scan_ratio = 0.6;

  /// Throws std::invalid_argument on an unknown name or non-positive value.
  void set(const std::string& name, double value);
  Json to_json() const;
};

struct SampleCounts {
  int metric_csv = 64;
  int certify_restarts = 20;
  int suite = 100;
  int fiber = 100;
  int evidence_restarts = 50;
  std::int64_t volume = std::int64_t{1} << 20;
  std::int64_t scalar = std::int64_t{1} << 18;
  int scan_points = 256;
  int scan_planes = 64;
};

struct RunConfig {
  int m = 5;
  int k = 2;
  std::uint64_t seed = 42;
  int steps = 5;
  double h = 5e-3;
  std::vector<double> c_list{1.0, 0.5, 0.25, 0.125};
  double control_eps = 1e-3;
  Sampling sampling = Sampling::monte_carlo;
  SampleCounts samples;
  Tolerances tol;
  std::filesystem::path out_dir = "out";

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
  /// Warnings for parameter choices outside the intended scenario.
  std::vector<std::string> warnings() const;

  /// The output directory is not part of the serialized config, so runs into
  /// different directories share a hash.
  Json to_json() const;
  /// Overlays the fields present in `j` on this config.
  void merge(const Json& j);
  std::string hash() const { return json_hash(to_json()); }
};

enum ExitCode { exit_pass = 0, exit_fail = 1, exit_usage = 2, exit_upstream = 3 };

struct CommandResult {
  bool pass = false;
  Json report;
};

/// Adds a "content_hash" member over the remaining content and writes it.
void write_sealed(const std::filesystem::path& path, Json j);
/// Throws ArtifactError if the file is missing, malformed, or was modified.
Json read_sealed(const std::filesystem::path& path);

// Each command reads its upstream artifacts from config.out_dir, writes its
// own outputs there, and prints a short summary to `log`.
CommandResult cmd_gen(const RunConfig& config, std::ostream& log);
CommandResult cmd_deform(const RunConfig& config, std::ostream& log);
CommandResult cmd_verify(const RunConfig& config, std::ostream& log);
CommandResult cmd_invariants(const RunConfig& config, std::ostream& log);
CommandResult cmd_curvature(const RunConfig& config, std::ostream& log);
CommandResult cmd_report(const RunConfig& config, std::ostream& log);

/// Dispatches by name and maps outcomes and exceptions to exit codes.
int run_command(const std::string& name, const RunConfig& config, std::ostream& log, std::ostream& err);

// Output file names inside out_dir.
inline constexpr const char* kJmapFile = "jmap.json";
inline constexpr const char* kMetricCsv = "metric_samples.csv";
inline constexpr const char* kFamilyFile = "family.json";
inline constexpr const char* kVerifyFile = "verify_report.json";
inline constexpr const char* kInvariantsFile = "invariants_report.json";
inline constexpr const char* kScanCsv = "curvature_scan.csv";
inline constexpr const char* kCurvatureFile = "curvature_report.json";
inline constexpr const char* kReportFile = "report.json";

}  // namespace isodeform
