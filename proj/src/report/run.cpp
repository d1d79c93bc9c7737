#include "kahler/report/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "kahler/calc/map_calculus.hpp"
#include "kahler/core/errors.hpp"
#include "kahler/geom/curvature.hpp"

namespace kahler::report {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

ordered_json opt_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(); }

ordered_json cjson(cplx z) { return ordered_json{{"re", z.real()}, {"im", z.imag()}}; }

void write_file(const fs::path& dir, const std::string& name, const std::string& text,
                RunResult& res) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw Error("cannot write " + (dir / name).string());
  f << text;
  res.files.push_back(name);
}

// five-stop ramp, dark to light
std::string ramp(double s) {
  s = std::clamp(s, 0.0, 1.0);
  const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}};
  const double x = s * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const double f = x - i;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(std::lround(stops[i][0] + f * (stops[i + 1][0] - stops[i][0]))),
                static_cast<int>(std::lround(stops[i][1] + f * (stops[i + 1][1] - stops[i][1]))),
                static_cast<int>(std::lround(stops[i][2] + f * (stops[i + 1][2] - stops[i][2]))));
  return buf;
}

std::string fixed(double v, int prec) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

calc::MapField perturbed_start(const family::FamilySpec& spec, double amp) {
  calc::MapField m = family::fiber_map(spec, 0.0);
  m.analytic = nullptr;
  const int d = m.dim();
  const int last = m.chart.real_dim() - 1;
  for (std::size_t i = 0; i < m.chart.size(); ++i) {
    const auto w = m.chart.marked(i);
    for (int k = 0; k < d; ++k) {
      m.lift[i * d + k] += amp * std::sin(kTwoPi * (w[0] + k * w[last])) * std::cos(kTwoPi * w[last]);
    }
  }
  return m;
}

}  // namespace

fs::path output_root() {
  if (const char* env = std::getenv(kOutputRootEnv); env && *env) return fs::path(env);
  return fs::current_path();
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows, double stencil_delta) {
  os << "t_re,t_im,E,E1,E2,K,K_form,E_oracle,levi_formula,levi_stencil,levi_oracle,"
        "curvature_term,norm_term,stencil_delta,dE_dt_re,dE_dt_im,pluriharmonic_residual,gated\n";
  for (const auto& r : rows) {
    os << num(r.t.real()) << ',' << num(r.t.imag()) << ',' << num(r.energy.E) << ','
       << num(r.energy.E1) << ',' << num(r.energy.E2) << ',' << opt_num(r.energy.K) << ','
       << opt_num(r.energy.K_form) << ',' << opt_num(r.E_oracle) << ',';
    if (r.levi) {
      os << num(r.levi->levi_formula);
    }
    os << ',' << num(r.levi_stencil) << ',' << opt_num(r.levi_oracle) << ',';
    if (r.levi) os << num(r.levi->curvature_term) << ',' << num(r.levi->norm_term);
    else os << ',';
    os << ',' << num(stencil_delta) << ',';
    if (r.levi) os << num(r.levi->dE_dt.real()) << ',' << num(r.levi->dE_dt.imag());
    else os << ',';
    os << ',' << num(r.pluriharmonic_residual) << ',' << (r.levi ? 0 : 1) << '\n';
  }
}

ordered_json levi_report_json(const family::LeviReport& r, const std::string& scenario, int grid) {
  ordered_json j;
  j["scenario"] = scenario;
  j["grid"] = grid;
  j["t0"] = cjson(r.t0);
  j["E"] = r.E;
  j["dE_dt"] = cjson(r.dE_dt);
  j["curvature_term"] = r.curvature_term;
  j["norm_term"] = r.norm_term;
  j["levi_formula"] = r.levi_formula;
  j["levi_stencil"] = r.levi_stencil;
  j["levi_oracle"] = opt_json(r.levi_oracle);
  j["stencil_delta"] = r.stencil_delta;
  j["pluriharmonic_residual"] = r.pluriharmonic_residual;
  j["strictness"] = r.strictness;
  j["strictness_identity"] = r.strictness_identity;
  j["phiA_norm"] = r.phiA_norm;
  j["nabla_fH_norm"] = r.nabla_fH_norm;
  j["phiA_minus_nabla"] = r.phiA_minus_nabla;
  j["class_average"] = opt_json(r.class_average);
  j["class_predicts_strict"] = r.class_predicts_strict ? ordered_json(*r.class_predicts_strict) : ordered_json();
  j["prediction_confirmed"] = r.prediction_confirmed ? ordered_json(*r.prediction_confirmed) : ordered_json();
  j["residuals"] = {{"formula_stencil", r.residual_formula_stencil},
                    {"formula_oracle", opt_json(r.residual_formula_oracle)},
                    {"stencil_oracle", opt_json(r.residual_stencil_oracle)}};
  return j;
}

void write_svg_heatmap(std::ostream& os, const std::string& title, const std::vector<double>& xs,
                       const std::vector<double>& ys, const std::vector<double>& values,
                       double disk_radius) {
  const int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
  const double cell = 360.0 / std::max(nx, ny);
  const double x0 = 70.0, y0 = 40.0, w = cell * nx, h = cell * ny;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  const double span = hi > lo ? hi - lo : 1.0;
  const double W = x0 + w + 110.0, H = y0 + h + 60.0;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(W, 0) << "\" height=\""
     << fixed(H, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << fixed(x0, 1) << "\" y=\"24\" font-size=\"15\">" << title << "</text>\n";
  os << "<rect x=\"" << fixed(x0, 1) << "\" y=\"" << fixed(y0, 1) << "\" width=\"" << fixed(w, 1)
     << "\" height=\"" << fixed(h, 1) << "\" fill=\"#eeeeee\"/>\n";
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double v = values[static_cast<std::size_t>(j) * nx + i];
      if (std::isnan(v)) continue;
      // row 0 is the smallest Im t, drawn at the bottom
      os << "<rect x=\"" << fixed(x0 + i * cell, 2) << "\" y=\"" << fixed(y0 + (ny - 1 - j) * cell, 2)
         << "\" width=\"" << fixed(cell, 2) << "\" height=\"" << fixed(cell, 2) << "\" fill=\""
         << ramp((v - lo) / span) << "\"><title>t = " << sci(xs[i]) << (ys[j] < 0 ? " - " : " + ")
         << sci(std::abs(ys[j])) << "i: " << sci(v) << "</title></rect>\n";
    }
  }
  // disk outline
  const double step_x = nx > 1 ? (xs.back() - xs.front()) / (nx - 1) : 1.0;
  const double scale = cell / step_x;
  const double cx = x0 + (0.0 - xs.front()) * scale + 0.5 * cell;
  const double cy = y0 + h - ((0.0 - ys.front()) * scale + 0.5 * cell);
  os << "<circle cx=\"" << fixed(cx, 2) << "\" cy=\"" << fixed(cy, 2) << "\" r=\""
     << fixed(disk_radius * scale, 2) << "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
  // axes
  os << "<text x=\"" << fixed(x0 + w / 2, 1) << "\" y=\"" << fixed(y0 + h + 40, 1)
     << "\" text-anchor=\"middle\">Re t</text>\n";
  os << "<text x=\"20\" y=\"" << fixed(y0 + h / 2, 1) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << fixed(y0 + h / 2, 1) << ")\">Im t</text>\n";
  for (int i : {0, nx / 2, nx - 1}) {
    os << "<text x=\"" << fixed(x0 + (i + 0.5) * cell, 1) << "\" y=\"" << fixed(y0 + h + 18, 1)
       << "\" text-anchor=\"middle\">" << fixed(xs[i], 2) << "</text>\n";
  }
  for (int j : {0, ny / 2, ny - 1}) {
    os << "<text x=\"" << fixed(x0 - 8, 1) << "\" y=\"" << fixed(y0 + (ny - 1 - j + 0.5) * cell + 4, 1)
       << "\" text-anchor=\"end\">" << fixed(ys[j], 2) << "</text>\n";
  }
  // colour bar
  const double bx = x0 + w + 25.0;
  for (int k = 0; k < 50; ++k) {
    os << "<rect x=\"" << fixed(bx, 1) << "\" y=\"" << fixed(y0 + h * (49 - k) / 50.0, 2)
       << "\" width=\"16\" height=\"" << fixed(h / 50.0 + 0.5, 2) << "\" fill=\"" << ramp(k / 49.0)
       << "\"/>\n";
  }
  os << "<text x=\"" << fixed(bx + 22, 1) << "\" y=\"" << fixed(y0 + 10, 1) << "\">" << sci(hi) << "</text>\n";
  os << "<text x=\"" << fixed(bx + 22, 1) << "\" y=\"" << fixed(y0 + h, 1) << "\">" << sci(lo) << "</text>\n";
  os << "</svg>\n";
}

RunResult run(const RunConfig& config, std::ostream* log) {
  const scenarios::Scenario sc = resolve_scenario(config);
  RunResult res;
  res.directory = output_root() / config.output_dir;
  std::error_code ec;
  fs::create_directories(res.directory, ec);
  if (ec) throw ConfigError("cannot create output directory " + res.directory.string());

  family::FamilySpec spec = sc.spec;
  std::vector<cplx> positivity_ts{0.0};
  for (int k = 0; k < 8; ++k) positivity_ts.push_back(std::polar(sc.sweep_radius, kTwoPi * k / 8));
  {
    family::FamilySpec probe = spec;
    probe.grid = std::min(probe.grid, 16);
    probe.grid_product = std::min(probe.grid_product, 8);
    spec.C = family::ensure_positive(probe, positivity_ts);
  }
  const int grid = spec.grid_points();
  if (log) *log << "scenario " << sc.name << ": " << sc.description << "\n";

  // disk sweep on a square grid of t values
  const int ns = config.sweep_samples;
  const double R = sc.sweep_radius;
  std::vector<double> xs(ns), ys(ns);
  for (int i = 0; i < ns; ++i) xs[i] = ys[i] = -R + 2.0 * R * i / (ns - 1);
  std::vector<double> heat_E(static_cast<std::size_t>(ns) * ns, kNaN), heat_L = heat_E;
  std::vector<SweepRow> rows;
  for (int j = 0; j < ns; ++j) {
    for (int i = 0; i < ns; ++i) {
      const cplx t(xs[i], ys[j]);
      if (std::abs(t) > R * (1.0 + 1e-12)) continue;
      SweepRow row;
      row.t = t;
      row.energy = family::energy_at(spec, t);
      if (sc.E) row.E_oracle = sc.E(t);
      if (sc.levi) row.levi_oracle = sc.levi(t);
      try {
        row.levi = family::levi_form(spec, t, config.stencil_delta, sc.levi);
        row.levi_stencil = row.levi->levi_stencil;
        row.pluriharmonic_residual = row.levi->pluriharmonic_residual;
      } catch (const PreconditionError& e) {
        row.levi_stencil = family::levi_stencil(spec, t, config.stencil_delta);
        row.pluriharmonic_residual = e.residual();
      }
      heat_E[static_cast<std::size_t>(j) * ns + i] = row.energy.E;
      heat_L[static_cast<std::size_t>(j) * ns + i] = row.levi_stencil;
      rows.push_back(std::move(row));
    }
  }
  if (log) *log << "  sweep: " << rows.size() << " fibers\n";
  {
    std::ostringstream os;
    write_sweep_csv(os, rows, config.stencil_delta);
    write_file(res.directory, "sweep.csv", os.str(), res);
  }
  {
    std::ostringstream os;
    write_svg_heatmap(os, "E(t), " + sc.name, xs, ys, heat_E, R);
    write_file(res.directory, "heatmap_E.svg", os.str(), res);
  }
  {
    std::ostringstream os;
    write_svg_heatmap(os, "levi_stencil(t), " + sc.name, xs, ys, heat_L, R);
    write_file(res.directory, "heatmap_levi_stencil.svg", os.str(), res);
  }

  // invariant checks
  SuiteOptions opt;
  opt.grid = config.grid_size;
  opt.grid_product = config.grid_product;
  opt.sweep_product = config.grid_product;
  opt.stencil_delta = config.stencil_delta;
  opt.overrides = config.tolerances;
  scenarios::Scenario checked = sc;
  checked.spec.C = spec.C;
  res.checks = scenario_checks(checked, opt);

  // Levi reports at the requested points
  const bool ph_control = sc.control == scenarios::Scenario::Control::kPluriharmonic;
  for (std::size_t k = 0; k < config.levi_points.size(); ++k) {
    const cplx t0 = config.levi_points[k];
    ordered_json j;
    const std::string subject = sc.name + "@t" + std::to_string(k);
    try {
      const auto r = family::levi_form(spec, t0, config.stencil_delta, sc.levi);
      j = levi_report_json(r, sc.name, grid);
      CheckList c(config.tolerances);
      c.at_most("levi_formula_vs_stencil", subject, std::abs(r.levi_formula - r.levi_stencil),
                stencil_bound(config.stencil_delta));
      if (r.levi_oracle) {
        c.at_most("levi_formula_vs_oracle", subject, std::abs(r.levi_formula - *r.levi_oracle), 1e-6);
      }
      res.checks.append(c);
    } catch (const PreconditionError& e) {
      j = {{"scenario", sc.name}, {"grid", grid}, {"t0", cjson(t0)}, {"error", e.what()},
           {"pluriharmonic_residual", e.residual()}};
      CheckList c(config.tolerances);
      c.at_most("pluriharmonic_gate", subject, e.residual(), spec.gate, ph_control);
      res.checks.append(c);
    }
    write_file(res.directory, "levi_" + std::to_string(k) + ".json", j.dump(2) + "\n", res);
  }

  if (config.flow.enabled) {
    family::FamilySpec fs_spec = spec;
    fs_spec.grid = config.flow.grid_size;
    FlowCheckInput in;
    in.subject = sc.name + "@flow";
    in.start = perturbed_start(fs_spec, config.flow.perturbation);
    in.tol = config.flow.tol;
    in.max_steps = config.flow.max_steps;
    const auto samples = geom::random_samples(*spec.target, 500, 0x5155, 0.1);
    const bool condition_ok = geom::check_curvature_condition(*spec.target, samples, false).pass;
    if (sc.E && condition_ok && !ph_control) in.energy_oracle = sc.E(0.0);
    std::ostringstream trace;
    res.checks.append(flow_case(in, config.tolerances, &trace));
    write_file(res.directory, "flow_trace.csv", trace.str(), res);
  }

  {
    std::ostringstream os;
    os << "verification report: " << sc.name << "\n" << sc.description << "\n";
    os << "grid " << grid << ", stencil_delta " << num(config.stencil_delta) << ", C " << num(spec.C)
       << ", sweep radius " << num(R) << "\n\n";
    write_check_lines(os, res.checks);
    write_file(res.directory, "verification.txt", os.str(), res);
  }
  const bool ok = res.checks.all_ok();
  res.exit_code = (config.mode == Mode::kVerify && !ok) ? kExitInvariantFailure : kExitPass;
  if (log) {
    *log << "  checks: " << res.checks.checks().size() << ", "
         << (ok ? "all pass" : "some fail") << "\n  output: " << res.directory.string() << "\n";
  }
  return res;
}

int verify(const SuiteOptions& options, std::ostream& os, std::ostream* progress) {
  const CheckList all = verify_suite(options, progress);
  os << "kahlerlab verification suite\n";
  os << "grid " << options.grid << " (n = 1), " << options.grid_product << " per factor (n = 2 centre), "
     << options.sweep_product << " per factor (n = 2 sweeps), stencil_delta " << num(options.stencil_delta)
     << "\n\n";
  write_matrix(os, all);
  write_check_lines(os, all);
  return all.all_ok() ? kExitPass : kExitInvariantFailure;
}

}  // namespace kahler::report
