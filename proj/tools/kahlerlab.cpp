#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "kahler/core/errors.hpp"
#include "kahler/report/run.hpp"
#include "kahler/scenarios/scenarios.hpp"

namespace {

using namespace kahler;

int cmd_run(const std::string& path) {
  const report::RunConfig config = report::load_config(path);
  const auto res = report::run(config, &std::cerr);
  std::cout << "wrote";
  for (const auto& f : res.files) std::cout << ' ' << f;
  std::cout << " to " << res.directory.string() << "\n";
  report::write_check_lines(std::cout, res.checks);
  return res.exit_code;
}

int cmd_verify(const std::vector<std::string>& tols, int grid, const std::string& output) {
  report::SuiteOptions opt;
  opt.grid = grid;
  for (const auto& t : tols) {
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("--tol expects name=value, got '" + t + "'");
    try {
      opt.overrides[t.substr(0, eq)] = std::stod(t.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("--tol: bad value in '" + t + "'");
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream text;
  std::cerr << "running verification suite\n";
  const int code = report::verify(opt, text, &std::cerr);
  std::cout << text.str();
  if (!output.empty()) {
    const auto dir = report::output_root() / output;
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / "verification.txt", std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir / "verification.txt").string());
    f << text.str();
    std::cerr << "report written to " << (dir / "verification.txt").string() << "\n";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "verification " << (code == 0 ? "passed" : "FAILED") << " in " << secs << " s\n";
  return code;
}

int cmd_list() {
  for (const auto& name : scenarios::scenario_names()) {
    const auto sc = scenarios::make_scenario(name);
    std::string tag;
    if (sc.control != scenarios::Scenario::Control::kNone) tag = "  [negative control]";
    std::cout << name << "  n=" << sc.spec.n << "  target=" << sc.spec.target->name << "  "
              << sc.description << tag << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Levi-form and energy diagnostics for families of harmonic maps on tori"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a configured family and write reports");
  run->add_option("config", config_path, "configuration file")->required();

  std::vector<std::string> tols;
  int grid = 64;
  std::string output = "kahlerlab-verify";
  auto* verify = app.add_subcommand("verify", "run every invariant suite and print the check matrix");
  verify->add_option("--tol", tols, "override a bound, name=value (repeatable)");
  verify->add_option("--grid", grid, "grid points per direction for n = 1 fibers")
      ->check(CLI::Range(16, 512));
  verify->add_option("--output", output,
                     "directory (under the output root) for verification.txt; empty to skip");

  auto* list = app.add_subcommand("list-scenarios", "list registered scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : report::kExitConfigError;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*verify) return cmd_verify(tols, grid, output);
    if (*list) return cmd_list();
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return report::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return report::kExitInvariantFailure;
  }
  return 0;
}
