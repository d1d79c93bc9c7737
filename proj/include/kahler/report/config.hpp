#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kahler/core/types.hpp"
#include "kahler/scenarios/scenarios.hpp"

namespace kahler::report {

enum class Mode { kReport, kVerify };

/// Inline family parameters (used when `family.kind` is set instead of a
/// registered scenario name).
struct InlineFamily {
  std::string kind;  // affine | product | geodesic | holomorphic | reparametrized
                     // | nonpluriharmonic | sphere
  std::vector<cplx> lambda{cplx(0.0, 1.0), cplx(1.0, 0.0)};
  std::vector<cplx> lambda2{cplx(0.0, 1.0)};
  cplx tau{0.0, 1.0};
  cplx tau2{0.0, 1.0};
  double length = 1.5;
  int winding = 1;
  double eps = 0.5;
  double amp = 0.3;
};

struct FlowConfig {
  bool enabled = false;
  double perturbation = 0.1;
  double tol = 1e-8;
  int max_steps = 200000;
  int grid_size = 32;
};

struct RunConfig {
  std::string scenario;                 // registered name
  std::optional<InlineFamily> family;  // or inline parameters
  std::optional<double> C;
  int grid_size = 64;     // n = 1 fibers, per real direction
  int grid_product = 8;   // n = 2 fibers, per real direction
  double stencil_delta = 1e-3;
  std::optional<double> sweep_radius;  // default: scenario working radius
  int sweep_samples = 9;               // per axis of the disk grid
  std::vector<cplx> levi_points{cplx(0.0, 0.0)};
  FlowConfig flow;
  std::string output_dir = "kahlerlab-out";
  Mode mode = Mode::kReport;
  std::map<std::string, double> tolerances;
};

/// Parses the key = value format. Throws ConfigError("<source>:<line>: ...").
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Builds the scenario described by the config and checks the numeric
/// invariants that depend on it. Throws ConfigError.
scenarios::Scenario resolve_scenario(const RunConfig& config);
void validate(const RunConfig& config, const scenarios::Scenario& scenario);

/// "re,im" or "re".
cplx parse_complex(const std::string& text);
/// "c0; c1; ..." with each entry as in parse_complex.
std::vector<cplx> parse_complex_list(const std::string& text);

}  // namespace kahler::report
