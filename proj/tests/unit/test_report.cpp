#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <unistd.h>
#include <sstream>

#include <gtest/gtest.h>

#include "kahler/core/errors.hpp"
#include "kahler/report/run.hpp"

namespace kahler::report {
namespace {

namespace fs = std::filesystem;

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test.conf");
}

std::string error_of(const std::string& text) {
  try {
    const auto c = parse(text);
    resolve_scenario(c);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

TEST(Config, ParsesAllSections) {
  const auto c = parse(
      "# comment\n"
      "run.mode = verify   # trailing comment\n"
      "run.output = out/a\n"
      "family.scenario = tilted\n"
      "grid.size = 32\n"
      "levi.stencil_delta = 2e-3\n"
      "levi.points = 0; 0.1,-0.05\n"
      "sweep.radius = 0.3\n"
      "sweep.samples = 5\n"
      "flow.enabled = yes\n"
      "flow.tol = 1e-9\n"
      "tolerance.energy_oracle = 1e-12\n");
  EXPECT_EQ(c.mode, Mode::kVerify);
  EXPECT_EQ(c.output_dir, "out/a");
  EXPECT_EQ(c.scenario, "tilted");
  EXPECT_EQ(c.grid_size, 32);
  EXPECT_DOUBLE_EQ(c.stencil_delta, 2e-3);
  ASSERT_EQ(c.levi_points.size(), 2u);
  EXPECT_EQ(c.levi_points[1], cplx(0.1, -0.05));
  EXPECT_DOUBLE_EQ(*c.sweep_radius, 0.3);
  EXPECT_TRUE(c.flow.enabled);
  EXPECT_DOUBLE_EQ(c.flow.tol, 1e-9);
  EXPECT_DOUBLE_EQ(c.tolerances.at("energy_oracle"), 1e-12);
  const auto sc = resolve_scenario(c);
  EXPECT_EQ(sc.spec.grid, 32);
  EXPECT_DOUBLE_EQ(sc.sweep_radius, 0.3);
}

TEST(Config, InlineFamily) {
  const auto c = parse(
      "family.kind = affine\n"
      "family.lambda = 0.2,1.1; 0.4,-0.1\n"
      "family.tau = -0.3,0.9\n");
  const auto sc = resolve_scenario(c);
  EXPECT_EQ(sc.name, "inline-affine");
  EXPECT_EQ(sc.spec.moduli(0.0)[0], cplx(0.2, 1.1));
  EXPECT_NEAR(sc.E(0.0), scenarios::affine_energy(cplx(0.2, 1.1), cplx(-0.3, 0.9)), 1e-15);
}

TEST(Config, GridSizeValidation) {
  EXPECT_NE(error_of("family.scenario = standard\ngrid.size = 10\n").find("grid_size >= 16 and even"),
            std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\ngrid.size = 33\n").find("grid_size >= 16 and even"),
            std::string::npos);
  EXPECT_EQ(error_of("family.scenario = standard\ngrid.size = 16\n"), "");
}

TEST(Config, StencilDeltaValidation) {
  // standard disk radius is 0.9
  EXPECT_NE(error_of("family.scenario = standard\nlevi.stencil_delta = 0.3\n").find("stencil_delta"),
            std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\nlevi.stencil_delta = 0\n").find("stencil_delta"),
            std::string::npos);
  EXPECT_EQ(error_of("family.scenario = standard\nlevi.stencil_delta = 0.2\nsweep.radius = 0.4\n"), "");
}

TEST(Config, LineDiagnostics) {
  EXPECT_NE(error_of("family.scenario = standard\n\nbogus.key = 1\n").find("test.conf:3: field 'bogus.key'"),
            std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\ngrid.size = sixty\n").find("test.conf:2: field 'grid.size'"),
            std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\nfamily.scenario = tilted\n").find("duplicate key"),
            std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\njust words\n").find("test.conf:2"), std::string::npos);
  EXPECT_NE(error_of("grid.size = 32\n").find("no family"), std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\nfamily.tau = 0,1\n").find("exclusive"),
            std::string::npos);
  EXPECT_NE(error_of("family.scenario = nope\n").find("unknown scenario"), std::string::npos);
  EXPECT_NE(error_of("family.kind = spiral\n").find("unknown kind"), std::string::npos);
  EXPECT_NE(error_of("family.scenario = standard\nrun.mode = fast\n").find("report' or 'verify"),
            std::string::npos);
}

TEST(Config, ComplexParsing) {
  EXPECT_EQ(parse_complex(" 1.5 "), cplx(1.5, 0.0));
  EXPECT_EQ(parse_complex("-0.25, 3"), cplx(-0.25, 3.0));
  EXPECT_THROW(parse_complex("1,2,3"), ConfigError);
  EXPECT_THROW(parse_complex("x"), ConfigError);
  const auto l = parse_complex_list("0,1; 1; 0,-2");
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[2], cplx(0.0, -2.0));
}

TEST(Checks, StatusesAndOverrides) {
  CheckList list({{"tight", 1e-15}});
  list.at_most("loose", "s", 1e-9, 1e-8);
  list.at_most("tight", "s", 1e-12, 1e-6);  // overridden to 1e-15
  list.at_least("sign", "s", -1.0, 0.0, true);
  list.at_most("control", "s", 0.0, 1.0, true);
  list.error("broken", "s", "boom");
  const auto& c = list.checks();
  EXPECT_EQ(c[0].status(), Status::kPass);
  EXPECT_EQ(c[1].status(), Status::kFail);
  EXPECT_DOUBLE_EQ(c[1].bound, 1e-15);
  EXPECT_EQ(c[2].status(), Status::kExpectedFail);
  EXPECT_EQ(c[3].status(), Status::kUnexpectedPass);
  EXPECT_EQ(c[4].status(), Status::kFail);
  EXPECT_FALSE(list.all_ok());
  std::ostringstream os;
  write_check_lines(os, list);
  EXPECT_NE(os.str().find("FAIL  s  tight  measured 1.000000e-12 <= 1.000000e-15"), std::string::npos);
  EXPECT_NE(os.str().find("EXPECTED-FAIL  s  sign  measured -1.000000e+00 >= 0.000000e+00"),
            std::string::npos);
  EXPECT_NE(os.str().find("1 unexpected-pass"), std::string::npos);
}

TEST(Checks, MatrixLayout) {
  CheckList list;
  list.at_most("a", "one", 0.0, 1.0);
  list.at_most("a", "two", 2.0, 1.0);
  list.at_most("b", "two", 2.0, 1.0, true);
  std::ostringstream os;
  write_matrix(os, list);
  const std::string m = os.str();
  EXPECT_NE(m.find("[ 1] one"), std::string::npos);
  EXPECT_NE(m.find("[ 2] two"), std::string::npos);
  EXPECT_NE(m.find("\na  PF\n"), std::string::npos);
  EXPECT_NE(m.find("\nb  .X\n"), std::string::npos);
}

TEST(Checks, TightenedToleranceProducesHonestFailures) {
  SuiteOptions opt;
  opt.grid = 16;
  opt.overrides = {{"levi_formula_vs_stencil", 1e-15}};
  const auto list = scenario_checks(scenarios::make_scenario("tilted"), opt);
  bool saw = false;
  for (const auto& c : list.checks()) {
    if (c.name == "levi_formula_vs_stencil") {
      saw = true;
      EXPECT_DOUBLE_EQ(c.bound, 1e-15);
      EXPECT_GT(c.measured, 0.0);
      EXPECT_EQ(c.status(), Status::kFail);
    }
  }
  EXPECT_TRUE(saw);
  EXPECT_FALSE(list.all_ok());
}

TEST(Checks, DiskSamples) {
  const auto ts = disk_samples(0.4, 12);
  ASSERT_EQ(ts.size(), 25u);
  EXPECT_EQ(ts[0], cplx(0.0));
  for (std::size_t k = 1; k < ts.size(); ++k) {
    EXPECT_NEAR(std::abs(ts[k]), k <= 12 ? 0.2 : 0.4, 1e-15);
  }
}

TEST(Artifacts, SweepCsvSchema) {
  SweepRow r;
  r.t = cplx(0.1, -0.2);
  r.energy.E = 1.0;
  r.energy.K = 1.0;
  r.levi_stencil = 0.5;
  std::ostringstream os;
  write_sweep_csv(os, {r}, 1e-3);
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("t_re,t_im,E,E1,E2,K,", 0), 0u);
  for (const char* col : {"levi_formula", "levi_stencil", "levi_oracle", "stencil_delta", "gated"}) {
    EXPECT_NE(header.find(col), std::string::npos) << col;
  }
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.back(), '1');  // no Levi report: gated
}

TEST(Artifacts, LeviJsonHasEveryField) {
  family::LeviReport r;
  r.t0 = cplx(0.1, 0.2);
  r.levi_formula = 0.5;
  r.class_average = 0.5;
  r.class_predicts_strict = true;
  r.prediction_confirmed = true;
  const auto j = levi_report_json(r, "standard", 64);
  for (const char* k : {"t0", "E", "dE_dt", "curvature_term", "norm_term", "levi_formula", "levi_stencil",
                        "levi_oracle", "stencil_delta", "pluriharmonic_residual", "strictness",
                        "strictness_identity", "phiA_norm", "nabla_fH_norm", "phiA_minus_nabla",
                        "class_average", "class_predicts_strict", "prediction_confirmed", "residuals"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_TRUE(j["levi_oracle"].is_null());
  EXPECT_DOUBLE_EQ(j["t0"]["im"].get<double>(), 0.2);
}

TEST(Artifacts, SvgHeatmapCells) {
  const std::vector<double> xs{-1.0, 0.0, 1.0}, ys = xs;
  std::vector<double> v(9, 2.0);
  v[0] = std::numeric_limits<double>::quiet_NaN();
  v[4] = 3.0;
  std::ostringstream os;
  write_svg_heatmap(os, "E", xs, ys, v, 1.0);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  const std::regex cell("<rect [^>]*><title>");
  const auto n = std::distance(std::sregex_iterator(s.begin(), s.end(), cell), std::sregex_iterator());
  EXPECT_EQ(n, 8);
  EXPECT_NE(s.find("Re t"), std::string::npos);
  EXPECT_NE(s.find("Im t"), std::string::npos);
}

class RunTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("kahlerlab-test-" + std::to_string(::getpid()));
    fs::create_directories(root_);
    ::setenv(kOutputRootEnv, root_.c_str(), 1);
  }
  void TearDown() override {
    ::unsetenv(kOutputRootEnv);
    fs::remove_all(root_);
  }
  fs::path root_;
};

TEST_F(RunTest, WritesArtifactsDeterministically) {
  auto c = parse(
      "run.mode = verify\nrun.output = a\nfamily.scenario = standard\ngrid.size = 16\n"
      "sweep.samples = 3\nlevi.points = 0; 0.1,0\n");
  const auto r1 = run(c);
  EXPECT_EQ(r1.exit_code, kExitPass);
  EXPECT_EQ(r1.directory, root_ / "a");
  for (const char* f : {"sweep.csv", "levi_0.json", "levi_1.json", "heatmap_E.svg",
                        "heatmap_levi_stencil.svg", "verification.txt"}) {
    EXPECT_TRUE(fs::exists(root_ / "a" / f)) << f;
  }
  c.output_dir = "b";
  run(c);
  for (const auto& f : r1.files) EXPECT_EQ(slurp(root_ / "a" / f), slurp(root_ / "b" / f)) << f;
  const auto j = nlohmann::json::parse(slurp(root_ / "a" / "levi_0.json"));
  EXPECT_NEAR(j["levi_formula"].get<double>(), 0.5, 1e-6);
  EXPECT_NEAR(j["levi_oracle"].get<double>(), 0.5, 1e-15);
  const std::string ver = slurp(root_ / "a" / "verification.txt");
  EXPECT_NE(ver.find("levi_formula_vs_oracle"), std::string::npos);
  EXPECT_NE(ver.find("0 fail"), std::string::npos);
}

TEST_F(RunTest, VerifyModeFailsOnTightenedTolerance) {
  const auto c = parse(
      "run.mode = verify\nrun.output = t\nfamily.scenario = tilted\ngrid.size = 16\n"
      "sweep.samples = 3\ntolerance.levi_formula_vs_stencil = 1e-15\n");
  EXPECT_EQ(run(c).exit_code, kExitInvariantFailure);
  auto rep = c;
  rep.mode = Mode::kReport;
  EXPECT_EQ(run(rep).exit_code, kExitPass);
}

TEST_F(RunTest, GatedFibersAreMarked) {
  const auto c = parse(
      "run.output = g\nfamily.scenario = control-nonpluriharmonic\ngrid.size = 16\n"
      "sweep.samples = 3\n");
  const auto r = run(c);
  EXPECT_EQ(r.exit_code, kExitPass);
  const auto j = nlohmann::json::parse(slurp(root_ / "g" / "levi_0.json"));
  EXPECT_TRUE(j.contains("error"));
  EXPECT_GT(j["pluriharmonic_residual"].get<double>(), 1.0);
  const std::string csv = slurp(root_ / "g" / "sweep.csv");
  EXPECT_NE(csv.find(",1\n"), std::string::npos);
}

}  // namespace
}  // namespace kahler::report
