#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "kahler/family/family.hpp"
#include "kahler/report/checks.hpp"
#include "kahler/report/config.hpp"

namespace kahler::report {

inline constexpr const char* kOutputRootEnv = "KAHLERLAB_OUTPUT_ROOT";

enum ExitCode : int { kExitPass = 0, kExitInvariantFailure = 1, kExitConfigError = 2 };

/// $KAHLERLAB_OUTPUT_ROOT when set, else the current directory.
std::filesystem::path output_root();

struct RunResult {
  int exit_code = kExitPass;
  std::filesystem::path directory;
  std::vector<std::string> files;  // relative to directory, in write order
  CheckList checks;
};

/// Writes sweep.csv, levi_<k>.json, heatmap_E.svg, heatmap_levi_stencil.svg,
/// verification.txt (and flow_trace.csv with flow.enabled) into
/// output_root() / config.output_dir. Throws ConfigError for invalid
/// configurations.
RunResult run(const RunConfig& config, std::ostream* log = nullptr);

/// One row of the disk sweep.
struct SweepRow {
  cplx t;
  family::DiskSample energy;
  std::optional<double> E_oracle, levi_oracle;
  double levi_stencil = 0.0;
  std::optional<family::LeviReport> levi;  // empty when the fiber fails the gate
  double pluriharmonic_residual = 0.0;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, double stencil_delta);

nlohmann::ordered_json levi_report_json(const family::LeviReport& r, const std::string& scenario,
                                        int grid);

/// Heatmap over a square grid of t values; NaN cells (outside the disk) are
/// left blank. values[j * xs.size() + i] belongs to (xs[i], ys[j]).
void write_svg_heatmap(std::ostream& os, const std::string& title, const std::vector<double>& xs,
                       const std::vector<double>& ys, const std::vector<double>& values,
                       double disk_radius);

/// Full verification matrix; returns kExitPass iff every check is PASS or
/// EXPECTED-FAIL. The report text goes to `os`; stage progress to `progress`.
int verify(const SuiteOptions& options, std::ostream& os, std::ostream* progress = nullptr);

}  // namespace kahler::report
