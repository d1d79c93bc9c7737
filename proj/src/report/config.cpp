#include "kahler/report/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "kahler/core/errors.hpp"

namespace kahler::report {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto* end = t.data() + t.size();
  const auto [p, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || p != end) throw ConfigError("expected a number, got '" + t + "'");
  return v;
}

int parse_int(const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto* end = t.data() + t.size();
  const auto [p, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || p != end) throw ConfigError("expected an integer, got '" + t + "'");
  return v;
}

bool parse_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw ConfigError("expected true or false, got '" + t + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

InlineFamily& fam(RunConfig& c) {
  if (!c.family) c.family.emplace();
  return *c.family;
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> s = {
      {"run.mode",
       [](RunConfig& c, const std::string& v) {
         const std::string t = trim(v);
         if (t == "report") {
           c.mode = Mode::kReport;
         } else if (t == "verify") {
           c.mode = Mode::kVerify;
         } else {
           throw ConfigError("mode must be 'report' or 'verify', got '" + t + "'");
         }
       }},
      {"run.output", [](RunConfig& c, const std::string& v) { c.output_dir = trim(v); }},
      {"family.scenario", [](RunConfig& c, const std::string& v) { c.scenario = trim(v); }},
      {"family.kind", [](RunConfig& c, const std::string& v) { fam(c).kind = trim(v); }},
      {"family.lambda", [](RunConfig& c, const std::string& v) { fam(c).lambda = parse_complex_list(v); }},
      {"family.lambda2", [](RunConfig& c, const std::string& v) { fam(c).lambda2 = parse_complex_list(v); }},
      {"family.tau", [](RunConfig& c, const std::string& v) { fam(c).tau = parse_complex(v); }},
      {"family.tau2", [](RunConfig& c, const std::string& v) { fam(c).tau2 = parse_complex(v); }},
      {"family.length", [](RunConfig& c, const std::string& v) { fam(c).length = parse_double(v); }},
      {"family.winding", [](RunConfig& c, const std::string& v) { fam(c).winding = parse_int(v); }},
      {"family.eps", [](RunConfig& c, const std::string& v) { fam(c).eps = parse_double(v); }},
      {"family.amp", [](RunConfig& c, const std::string& v) { fam(c).amp = parse_double(v); }},
      {"family.C", [](RunConfig& c, const std::string& v) { c.C = parse_double(v); }},
      {"grid.size", [](RunConfig& c, const std::string& v) { c.grid_size = parse_int(v); }},
      {"grid.product_size", [](RunConfig& c, const std::string& v) { c.grid_product = parse_int(v); }},
      {"levi.stencil_delta", [](RunConfig& c, const std::string& v) { c.stencil_delta = parse_double(v); }},
      {"levi.points", [](RunConfig& c, const std::string& v) { c.levi_points = parse_complex_list(v); }},
      {"sweep.radius", [](RunConfig& c, const std::string& v) { c.sweep_radius = parse_double(v); }},
      {"sweep.samples", [](RunConfig& c, const std::string& v) { c.sweep_samples = parse_int(v); }},
      {"flow.enabled", [](RunConfig& c, const std::string& v) { c.flow.enabled = parse_bool(v); }},
      {"flow.perturbation", [](RunConfig& c, const std::string& v) { c.flow.perturbation = parse_double(v); }},
      {"flow.tol", [](RunConfig& c, const std::string& v) { c.flow.tol = parse_double(v); }},
      {"flow.max_steps", [](RunConfig& c, const std::string& v) { c.flow.max_steps = parse_int(v); }},
      {"flow.grid_size", [](RunConfig& c, const std::string& v) { c.flow.grid_size = parse_int(v); }},
  };
  return s;
}

}  // namespace

cplx parse_complex(const std::string& text) {
  const std::string t = trim(text);
  const auto comma = t.find(',');
  if (comma == std::string::npos) return {parse_double(t), 0.0};
  return {parse_double(t.substr(0, comma)), parse_double(t.substr(comma + 1))};
}

std::vector<cplx> parse_complex_list(const std::string& text) {
  std::vector<cplx> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) out.push_back(parse_complex(item));
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = line.substr(eq + 1);
    if (!seen.insert(key).second) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      if (key.rfind("tolerance.", 0) == 0 && key.size() > 10) {
        c.tolerances[key.substr(10)] = parse_double(value);
        continue;
      }
      const auto it = setters().find(key);
      if (it == setters().end()) throw ConfigError("unknown key");
      it->second(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + "field '" + key + "': " + e.what());
    }
  }
  if (c.scenario.empty() && !c.family) throw ConfigError(source + ": no family.scenario or family.kind given");
  if (!c.scenario.empty() && c.family) {
    throw ConfigError(source + ": family.scenario and inline family parameters are exclusive");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in, path);
}

scenarios::Scenario resolve_scenario(const RunConfig& config) {
  using calc::Polynomial;
  scenarios::Scenario sc;
  try {
    if (!config.scenario.empty()) {
      sc = scenarios::make_scenario(config.scenario);
    } else {
      const InlineFamily& f = *config.family;
      const Polynomial lam(f.lambda);
      if (f.kind == "affine") {
        sc = scenarios::torus_affine(lam, f.tau);
      } else if (f.kind == "product") {
        sc = scenarios::product_torus(lam, Polynomial(f.lambda2), f.tau, f.tau2);
      } else if (f.kind == "geodesic") {
        sc = scenarios::geodesic_valued(lam, f.length, f.winding);
      } else if (f.kind == "holomorphic") {
        sc = scenarios::holomorphic_family(lam);
      } else if (f.kind == "reparametrized") {
        sc = scenarios::reparametrized_constant(f.lambda.front(), f.eps);
      } else if (f.kind == "nonpluriharmonic") {
        sc = scenarios::nonpluriharmonic_control(lam, f.tau, f.amp);
      } else if (f.kind == "sphere") {
        sc = scenarios::sphere_control(lam);
      } else {
        throw ConfigError("family.kind: unknown kind '" + f.kind + "'");
      }
      sc.name = "inline-" + f.kind;
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("family: ") + e.what());
  }
  if (config.C) sc.spec.C = *config.C;
  sc.spec.grid = config.grid_size;
  sc.spec.grid_product = config.grid_product;
  if (config.sweep_radius) sc.sweep_radius = *config.sweep_radius;
  validate(config, sc);
  return sc;
}

void validate(const RunConfig& config, const scenarios::Scenario& sc) {
  if (config.grid_size < 16 || config.grid_size % 2 != 0) {
    throw ConfigError("grid.size: grid_size >= 16 and even required, got " +
                      std::to_string(config.grid_size));
  }
  if (config.grid_product < 4 || config.grid_product % 2 != 0) {
    throw ConfigError("grid.product_size: >= 4 and even required, got " +
                      std::to_string(config.grid_product));
  }
  const double R = sc.spec.disk_radius;
  if (!(config.stencil_delta > 0.0 && config.stencil_delta < R / 4.0)) {
    std::ostringstream os;
    os << "levi.stencil_delta: 0 < stencil_delta < disk radius / 4 = " << R / 4.0 << " required";
    throw ConfigError(os.str());
  }
  if (!(sc.sweep_radius > 0.0 && sc.sweep_radius + config.stencil_delta < R)) {
    std::ostringstream os;
    os << "sweep.radius: the sweep plus the stencil must stay inside the disk of radius " << R;
    throw ConfigError(os.str());
  }
  if (config.sweep_samples < 2) throw ConfigError("sweep.samples: at least 2 required");
  for (const cplx t : config.levi_points) {
    if (std::abs(t) + config.stencil_delta >= R) throw ConfigError("levi.points: point outside the disk");
  }
  if (config.flow.enabled) {
    if (config.flow.grid_size < 16 || config.flow.grid_size % 2 != 0) {
      throw ConfigError("flow.grid_size: >= 16 and even required");
    }
    if (!(config.flow.tol > 0.0) || config.flow.max_steps <= 0) {
      throw ConfigError("flow: tol and max_steps must be positive");
    }
  }
  if (!(sc.spec.C > 0.0)) throw ConfigError("family.C: must be positive");
}

}  // namespace kahler::report
