#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kahler/scenarios/scenarios.hpp"

namespace kahler::report {

enum class Relation { kAtMost, kAtLeast };
enum class Status { kPass, kFail, kExpectedFail, kUnexpectedPass };

/// One invariant measured on one subject (scenario or suite component).
struct Check {
  std::string name;
  std::string subject;
  double measured = 0.0;
  Relation relation = Relation::kAtMost;
  double bound = 0.0;
  bool expected_fail = false;  // designed negative control
  std::string note;

  bool holds() const;
  Status status() const;
  bool ok() const { return status() == Status::kPass || status() == Status::kExpectedFail; }
};

const char* status_name(Status s);

/// Accumulates checks; bounds can be overridden by name.
class CheckList {
 public:
  explicit CheckList(std::map<std::string, double> overrides = {})
      : overrides_(std::move(overrides)) {}

  Check& add(std::string name, std::string subject, double measured, Relation rel, double bound,
             bool expected_fail = false, std::string note = {});
  Check& at_most(std::string name, std::string subject, double measured, double bound,
                 bool expected_fail = false);
  Check& at_least(std::string name, std::string subject, double measured, double bound,
                  bool expected_fail = false);
  /// Records an exception raised while measuring `name` as a failed check.
  Check& error(std::string name, std::string subject, const std::string& message,
               bool expected_fail = false);

  void append(const CheckList& other);
  const std::vector<Check>& checks() const { return checks_; }
  bool all_ok() const;
  std::size_t count(Status s) const;

 private:
  std::map<std::string, double> overrides_;
  std::vector<Check> checks_;
};

/// Agreement bound between the second-variation formula and the 5-point
/// stencil: max(1e-6, kStencilC1 * delta^2). The fiber quadrature is exact to
/// rounding for the registered scenarios, so no h^2 term is carried.
inline constexpr double kStencilC1 = 10.0;
double stencil_bound(double delta);

/// Sizes used by the invariant suites.
struct SuiteOptions {
  int grid = 64;            // n = 1 fibers
  int grid_product = 16;    // n = 2 fibers at the centre
  int sweep_product = 8;    // n = 2 fibers in disk sweeps
  double stencil_delta = 1e-3;
  int ring_samples = 12;    // 1 + 2 * ring_samples disk samples
  std::map<std::string, double> overrides;
};

/// Disk samples: the centre plus two rings at radius r/2 and r.
std::vector<cplx> disk_samples(double radius, int ring_samples);

/// Invariants of one scenario: oracles, K constancy, Levi triple and sign,
/// horizontality, volume identity, structure of F, strictness diagnostics.
CheckList scenario_checks(const scenarios::Scenario& sc, const SuiteOptions& opt);

/// Cross-scenario invariants (chain rule, product additivity and symmetry).
CheckList family_relation_checks(const SuiteOptions& opt);
/// Target geometry: curvature by two routes, symmetries, sectional values.
CheckList geometry_checks(const SuiteOptions& opt);
/// Map calculus: Bochner convergence, energy split, K routes.
CheckList calculus_checks(const SuiteOptions& opt);
/// Heat flow to the harmonic limit and the pluriharmonicity diagnostic.
CheckList flow_checks(const SuiteOptions& opt);

struct FlowCheckInput {
  std::string subject;
  calc::MapField start;
  double tol = 1e-8;
  int max_steps = 200000;
  std::optional<double> energy_oracle;
};
/// Flows `start` and records tension, energy and pluriharmonicity checks.
/// The flow result is returned through `trace` when non-null.
CheckList flow_case(const FlowCheckInput& in, const std::map<std::string, double>& overrides,
                    std::ostream* trace = nullptr);

/// Full suite; `progress` receives one line per stage (may be null).
CheckList verify_suite(const SuiteOptions& opt, std::ostream* progress = nullptr);

/// Status matrix (check x subject) followed by every check with its measured
/// value, relation and bound. Deterministic formatting.
void write_matrix(std::ostream& os, const CheckList& list);
void write_check_lines(std::ostream& os, const CheckList& list);

}  // namespace kahler::report
