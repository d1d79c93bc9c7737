#include "kahler/report/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "kahler/calc/map_calculus.hpp"
#include "kahler/core/errors.hpp"
#include "kahler/flow/harmonic_flow.hpp"
#include "kahler/geom/curvature.hpp"

namespace kahler::report {

using family::FamilySpec;
using scenarios::Scenario;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

bool Check::holds() const {
  if (!std::isfinite(measured)) return false;
  return relation == Relation::kAtMost ? measured <= bound : measured >= bound;
}

Status Check::status() const {
  if (expected_fail) return holds() ? Status::kUnexpectedPass : Status::kExpectedFail;
  return holds() ? Status::kPass : Status::kFail;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::kPass: return "PASS";
    case Status::kFail: return "FAIL";
    case Status::kExpectedFail: return "EXPECTED-FAIL";
    case Status::kUnexpectedPass: return "UNEXPECTED-PASS";
  }
  return "?";
}

Check& CheckList::add(std::string name, std::string subject, double measured, Relation rel,
                      double bound, bool expected_fail, std::string note) {
  if (const auto it = overrides_.find(name); it != overrides_.end()) bound = it->second;
  checks_.push_back(Check{std::move(name), std::move(subject), measured, rel, bound, expected_fail,
                          std::move(note)});
  return checks_.back();
}

Check& CheckList::at_most(std::string name, std::string subject, double measured, double bound,
                          bool expected_fail) {
  return add(std::move(name), std::move(subject), measured, Relation::kAtMost, bound, expected_fail);
}

Check& CheckList::at_least(std::string name, std::string subject, double measured, double bound,
                           bool expected_fail) {
  return add(std::move(name), std::move(subject), measured, Relation::kAtLeast, bound,
             expected_fail);
}

Check& CheckList::error(std::string name, std::string subject, const std::string& message,
                        bool expected_fail) {
  return add(std::move(name), std::move(subject), kNaN, Relation::kAtMost, 0.0, expected_fail,
             "error: " + message);
}

void CheckList::append(const CheckList& other) {
  checks_.insert(checks_.end(), other.checks_.begin(), other.checks_.end());
}

bool CheckList::all_ok() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.ok(); });
}

std::size_t CheckList::count(Status s) const {
  return static_cast<std::size_t>(std::count_if(checks_.begin(), checks_.end(),
                                                [s](const Check& c) { return c.status() == s; }));
}

double stencil_bound(double delta) { return std::max(1e-6, kStencilC1 * delta * delta); }

std::vector<cplx> disk_samples(double radius, int ring_samples) {
  std::vector<cplx> ts{0.0};
  for (const double r : {0.5 * radius, radius}) {
    for (int k = 0; k < ring_samples; ++k) {
      ts.push_back(std::polar(r, kTwoPi * (k + 0.5) / ring_samples));
    }
  }
  return ts;
}

CheckList scenario_checks(const Scenario& sc, const SuiteOptions& opt) {
  CheckList out(opt.overrides);
  const std::string& s = sc.name;
  const bool curv_control = sc.control == Scenario::Control::kCurvature;
  const bool ph_control = sc.control == Scenario::Control::kPluriharmonic;
  const bool flat = sc.spec.target->flat;

  FamilySpec spec = sc.spec;
  spec.grid = opt.grid;
  spec.grid_product = opt.grid_product;
  FamilySpec sweep = spec;
  sweep.grid_product = opt.sweep_product;

  // target curvature condition
  bool condition_ok = false;
  {
    const auto samples = geom::random_samples(*spec.target, 500, 0x5155, 0.1);
    const auto rep = geom::check_curvature_condition(*spec.target, samples, false);
    condition_ok = rep.pass;
    out.at_most("curvature_condition", s, rep.max_value, 1e-9, curv_control);
  }

  const auto ts = disk_samples(sc.sweep_radius, opt.ring_samples);

  // energy sweep
  try {
    const auto rows = family::energy_over_disk(sweep, ts);
    if (sc.E) {
      double d = 0.0;
      for (const auto& r : rows) d = std::max(d, std::abs(r.E - sc.E(r.t)));
      out.at_most("energy_oracle", s, d, 1e-8);
    }
    if (sc.E2) {
      double d = 0.0;
      for (const auto& r : rows) d = std::max(d, std::abs(r.E2 - sc.E2(r.t)));
      out.at_most("e2_oracle", s, d, 1e-8);
    }
    const bool have_k = std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.K.has_value(); });
    if (have_k) {
      double dev = 0.0, routes = 0.0, orc = 0.0;
      for (const auto& r : rows) {
        dev = std::max(dev, std::abs(*r.K - *rows.front().K));
        if (r.K_form) routes = std::max(routes, std::abs(*r.K - *r.K_form));
        if (sc.K) orc = std::max(orc, std::abs(*r.K - sc.K(r.t)));
      }
      out.at_most("k_constant", s, dev, 1e-10);
      out.at_most("k_routes", s, routes, 1e-10);
      if (sc.K) out.at_most("k_oracle", s, orc, 1e-10);
    }
  } catch (const Error& e) {
    out.error("energy_sweep", s, e.what());
  }

  // Levi triple at the centre
  try {
    const auto r = family::levi_form(spec, 0.0, opt.stencil_delta, sc.levi);
    out.at_most("pluriharmonic_gate", s, r.pluriharmonic_residual, spec.gate, ph_control);
    const double sb = stencil_bound(opt.stencil_delta);
    out.at_most("levi_formula_vs_stencil", s, std::abs(r.levi_formula - r.levi_stencil), sb);
    if (r.levi_oracle) {
      out.at_most("levi_formula_vs_oracle", s, std::abs(r.levi_formula - *r.levi_oracle), 1e-6);
      out.at_most("levi_stencil_vs_oracle", s, std::abs(r.levi_stencil - *r.levi_oracle), sb);
    }
    out.at_least("norm_term_nonnegative", s, r.norm_term, -1e-12);
    if (condition_ok) {
      out.at_least("curvature_term_nonnegative", s, r.curvature_term, -1e-12);
      out.at_least("levi_nonnegative_centre", s, r.levi_formula, -1e-9);
    }
    if (spec.target->name == "hyperbolic-cylinder") {
      out.at_most("curvature_term_rank1", s, std::abs(r.curvature_term), 1e-9);
    }
    if (flat) {
      out.at_most("strictness_identity", s, r.strictness_identity, 1e-10);
      out.at_most("nabla_vs_phiA_identity", s, std::abs(r.phiA_minus_nabla - r.strictness), 1e-5);
      if (r.prediction_confirmed) {
        out.at_most("class_prediction", s, *r.prediction_confirmed ? 0.0 : 1.0, 0.0);
      }
    }
    const auto ks = family::kodaira_spencer(sweep, 0.0);
    if (sc.degenerate) {
      out.at_most("degenerate_levi", s, std::abs(r.levi_formula), 1e-6);
      double diag = r.phiA_norm;
      if (r.class_average) diag = std::max(diag, *r.class_average);
      out.at_most("degenerate_diagnostics", s, diag, 1e-12);
    } else if (flat && r.class_average && ks.mean_norm > 1e-12) {
      out.at_least("class_representative", s, *r.class_average, family::kClassMargin);
    }
  } catch (const PreconditionError& e) {
    out.at_most("pluriharmonic_gate", s, e.residual(), spec.gate, ph_control);
  } catch (const Error& e) {
    out.error("levi_form", s, e.what());
  }

  // sign of the Levi form over the disk (pluriharmonic families only)
  if (sc.pluriharmonic_on_disk) {
    try {
      double lo = std::numeric_limits<double>::infinity(), orc = 0.0;
      for (const cplx t : ts) {
        const auto fb = family::build_fiber(sweep, t);
        const auto lt = family::levi_terms(sweep, fb);
        const double levi = lt.curvature_term + lt.norm_term;
        lo = std::min(lo, levi);
        if (sc.levi) orc = std::max(orc, std::abs(levi - sc.levi(t)));
      }
      if (condition_ok) out.at_least("levi_nonnegative_sweep", s, lo, -1e-9);
      if (sc.levi) out.at_most("levi_oracle_sweep", s, orc, 1e-8);
    } catch (const Error& e) {
      out.error("levi_sweep", s, e.what());
    }
  }

  // horizontal lift, volume identity, structure of F
  const cplx t_off = sc.pluriharmonic_on_disk ? std::polar(0.5 * sc.sweep_radius, 0.3) : cplx(0.0);
  try {
    double horiz = 0.0, psi = std::numeric_limits<double>::infinity();
    for (const cplx t : {cplx(0.0), t_off}) {
      const auto fb = family::build_fiber(sweep, t);
      for (const auto& l : fb.lift) {
        horiz = std::max(horiz, l.horizontality);
        psi = std::min(psi, l.psi);
      }
    }
    out.at_most("horizontality", s, horiz, 1e-12);
    out.at_least("psi_positive", s, psi, 1e-12);
    const auto v = family::volume_identity_residual(sweep, t_off);
    out.at_most("volume_identity", s, v.max_residual, 1e-10);
    const auto f = family::f_structure_check(sweep, t_off, ph_control);
    out.at_most("f_term1", s, f.max_abs[0], 1e-8);
    out.at_most("f_term3", s, f.max_abs[2], 1e-8, ph_control);
    out.at_most("f_cancel_56", s, f.cancel_56, 1e-7, ph_control);
    out.at_most("f_reduced_vs_full", s, f.reduced_vs_full, 1e-8);
    out.at_most("f_vs_bochner", s, f.total_vs_bochner, 1e-8);
  } catch (const Error& e) {
    out.error("fiber_structure", s, e.what());
  }
  return out;
}

CheckList family_relation_checks(const SuiteOptions& opt) {
  CheckList out(opt.overrides);
  const std::string s = "relations";
  auto levi = [&](const std::string& name) {
    FamilySpec spec = scenarios::make_scenario(name).spec;
    spec.grid = opt.grid;
    spec.grid_product = opt.sweep_product;
    return family::levi_form(spec, 0.0, opt.stencil_delta);
  };
  try {
    const auto base = levi("standard");
    const auto two = levi("chain-2t");
    const auto it = levi("chain-it");
    out.at_most("chain_rule_2t", s, std::abs(two.levi_formula / base.levi_formula / 4.0 - 1.0), 1e-6);
    out.at_most("chain_rule_it", s, std::abs(it.levi_formula / base.levi_formula - 1.0), 1e-6);
    const auto prod = levi("product");
    const auto half = levi("product-half");
    const auto swap = levi("product-swapped");
    out.at_most("product_additivity", s, std::abs(prod.levi_formula - 2.0 * base.levi_formula), 1e-8);
    out.at_most("product_half", s, std::abs(half.levi_formula - base.levi_formula), 1e-8);
    double d = 0.0;
    for (const auto& [a, b] : {std::pair{half.E, swap.E}, {half.levi_formula, swap.levi_formula},
                               {half.levi_stencil, swap.levi_stencil},
                               {half.curvature_term, swap.curvature_term},
                               {half.norm_term, swap.norm_term}}) {
      d = std::max(d, std::abs(a - b));
    }
    out.at_most("product_swap_symmetry", s, d, 1e-12);
  } catch (const Error& e) {
    out.error("relations", s, e.what());
  }
  return out;
}

CheckList geometry_checks(const SuiteOptions& opt) {
  CheckList out(opt.overrides);
  struct Case {
    geom::TargetPtr t;
    std::optional<double> k;
    bool condition;
  };
  const std::vector<Case> cases = {
      {geom::flat_plane(), 0.0, true},
      {geom::hyperbolic_upper_half_plane(), -1.0, true},
      {geom::hyperbolic_cylinder(), -1.0, true},
      {geom::unit_sphere(), 1.0, false},
      {geom::make_target("product:hyperbolic-upper-half-plane,hyperbolic-cylinder"), std::nullopt, true},
  };
  for (const auto& c : cases) {
    const std::string s = "target:" + c.t->name;
    try {
      std::mt19937_64 rng(17);
      double fd = 0.0, sym = 0.0, kdev = 0.0;  // fd relative to the largest component
      for (int k = 0; k < 40; ++k) {
        const TPoint p = c.t->sample_point(rng);
        const auto r = geom::riemann(*c.t, p).riem_lowered;
        const auto rf = geom::riemann_fd(*c.t, p, 1e-4);
        const int d = c.t->dim;
        double scale = 1.0;
        for (double v : r.v) scale = std::max(scale, std::abs(v));
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j)
            for (int a = 0; a < d; ++a)
              for (int b = 0; b < d; ++b) {
                fd = std::max(fd, std::abs(r(i, j, a, b) - rf(i, j, a, b)) / scale);
                sym = std::max({sym, std::abs(r(i, j, a, b) + r(j, i, a, b)),
                                std::abs(r(i, j, a, b) - r(a, b, i, j)),
                                std::abs(r(i, j, a, b) + r(j, a, i, b) + r(a, i, j, b))});
              }
        if (c.k) kdev = std::max(kdev, std::abs(r(0, 1, 0, 1) / c.t->h(p).determinant() - *c.k));
      }
      out.at_most("riemann_fd_agreement", s, fd, 1e-6);
      out.at_most("riemann_symmetries", s, sym, 1e-12);
      if (c.k) out.at_most("sectional_curvature", s, kdev, 1e-10);
      const auto samples = geom::random_samples(*c.t, 500, 0x5155, 0.1);
      const auto rep = geom::check_curvature_condition(*c.t, samples, false);
      out.at_most("curvature_condition", s, rep.max_value, 1e-9, !c.condition);
    } catch (const Error& e) {
      out.error("geometry", s, e.what());
    }
  }
  return out;
}

namespace {

calc::MarkedMap trig_hyperbolic() {
  return [](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = 0.3 * sin(kTwoPi * w[0]) + 0.2 * cos(kTwoPi * (w[0] + w[1])) +
             0.1 * sin(kTwoPi * (2.0 * w[1] - w[0]));
    out[1] = 1.5 + 0.25 * cos(kTwoPi * w[1]) + 0.2 * sin(kTwoPi * (w[0] - w[1])) +
             0.1 * cos(kTwoPi * 2.0 * w[0]);
  };
}

// n = 2: the contracted identity is trivial on curves
calc::MarkedMap trig_hyperbolic4() {
  return [](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> out) {
    out[0] = 0.3 * sin(kTwoPi * w[0]) + 0.2 * cos(kTwoPi * (w[1] + w[2])) +
             0.1 * sin(kTwoPi * (w[3] - w[0]));
    out[1] = 1.5 + 0.25 * cos(kTwoPi * w[1]) + 0.2 * sin(kTwoPi * (w[0] + w[3])) +
             0.1 * cos(kTwoPi * w[2]);
  };
}

}  // namespace

CheckList calculus_checks(const SuiteOptions& opt) {
  CheckList out(opt.overrides);
  const std::string s = "map-calculus";
  try {
    const auto base = calc::FiberChart::product(cplx(0.0, 1.0), cplx(0.3, 1.2), 32);
    const std::array<int, 3> grids{32, 64, 128};
    const auto conv = calc::bochner_convergence(geom::hyperbolic_upper_half_plane(), base,
                                                trig_hyperbolic4(), calc::zero_shifts(2), grids, 16, 2024);
    out.at_least("bochner_order", s, *std::min_element(conv.orders.begin(), conv.orders.end()), 1.9);

    const auto m = calc::sample_map(geom::hyperbolic_upper_half_plane(),
                                    calc::FiberChart::torus(cplx(0.2, 1.1), 32), trig_hyperbolic(),
                                    calc::zero_shifts(2));
    const auto eb = calc::energy(m, calc::KMode::kRequired);
    out.at_most("energy_split", s, eb.max_split_defect, 1e-12);
    out.at_most("k_routes", s, std::abs(*eb.K - *eb.K_form), 1e-10);
    out.at_most("energy_decomposition", s, std::abs(eb.E - eb.E_prime - eb.E_doubleprime), 1e-12);
  } catch (const Error& e) {
    out.error("map_calculus", s, e.what());
  }
  return out;
}

CheckList flow_case(const FlowCheckInput& in, const std::map<std::string, double>& overrides,
                    std::ostream* trace) {
  CheckList out(overrides);
  const std::string& s = in.subject;
  try {
    flow::FlowParams p;
    p.tol = in.tol;
    p.max_steps = in.max_steps;
    const auto r = flow::flow(in.start, p);
    if (trace) flow::write_energy_trace(*trace, r);
    out.at_most("flow_tension", s, r.final_tension, in.tol);
    out.at_most("flow_energy_monotone", s, r.max_energy_increase, p.safeguard);
    if (in.energy_oracle) {
      out.at_most("flow_energy_oracle", s, std::abs(r.energy.back() - *in.energy_oracle), 1e-8);
    }
    const auto ss = flow::verify_pluriharmonic(r.map, in.tol);
    out.at_most("flow_pluriharmonic", s, ss.dd_sup, 1e-6, ss.informational);
  } catch (const NonConvergenceError& e) {
    out.at_most("flow_tension", s, e.residual(), in.tol);
  } catch (const Error& e) {
    out.error("flow", s, e.what());
  }
  return out;
}

CheckList flow_checks(const SuiteOptions& opt) {
  CheckList out(opt.overrides);
  const cplx lambda(0.3, 1.2), tau(0.0, 1.0);
  {
    const calc::MarkedMap m = [tau](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> o) {
      o[0] = w[0] + tau.real() * w[1] + 0.1 * sin(kTwoPi * w[0]);
      o[1] = tau.imag() * w[1] + 0.1 * sin(kTwoPi * w[1]) * cos(kTwoPi * w[0]);
    };
    auto sh = calc::zero_shifts(2);
    sh[0] << 1.0, 0.0;
    sh[1] << tau.real(), tau.imag();
    FlowCheckInput in;
    in.subject = "flow:affine";
    in.start = calc::sample_map(geom::flat_plane(), calc::FiberChart::torus(lambda, 32), m, sh);
    in.energy_oracle = scenarios::affine_energy(lambda, tau);
    out.append(flow_case(in, opt.overrides));
  }
  {
    const calc::MarkedMap m = [](std::span<const Jet> w, const Jet&, const Jet&, std::span<Jet> o) {
      o[0] = w[0] + 0.1 * sin(kTwoPi * w[1]) * cos(kTwoPi * w[2]);
      o[1] = w[2] + 0.1 * sin(kTwoPi * (w[0] + w[3]));
    };
    auto sh = calc::zero_shifts(2);
    sh[0] << 1.0, 0.0;
    sh[2] << 0.0, 1.0;
    FlowCheckInput in;
    in.subject = "flow:product";
    in.start = calc::sample_map(geom::flat_plane(), calc::FiberChart::product(kI, kI, 16), m, sh);
    in.energy_oracle = 1.0;
    out.append(flow_case(in, opt.overrides));
  }
  return out;
}

CheckList verify_suite(const SuiteOptions& opt, std::ostream* progress) {
  CheckList all(opt.overrides);
  auto stage = [&](const std::string& what, const CheckList& c) {
    all.append(c);
    if (progress) *progress << "  " << what << ": " << c.checks().size() << " checks\n" << std::flush;
  };
  stage("geometry", geometry_checks(opt));
  stage("map calculus", calculus_checks(opt));
  for (const auto& name : scenarios::scenario_names()) {
    stage("scenario " + name, scenario_checks(scenarios::make_scenario(name), opt));
  }
  stage("family relations", family_relation_checks(opt));
  stage("heat flow", flow_checks(opt));
  return all;
}

void write_matrix(std::ostream& os, const CheckList& list) {
  std::vector<std::string> subjects, names;
  std::set<std::string> seen_s, seen_n;
  for (const auto& c : list.checks()) {
    if (seen_s.insert(c.subject).second) subjects.push_back(c.subject);
    if (seen_n.insert(c.name).second) names.push_back(c.name);
  }
  // status letters: P pass, F fail, X expected fail, U unexpected pass, . not run
  std::size_t w = 0;
  for (const auto& n : names) w = std::max(w, n.size());
  os << "status matrix (columns are subjects, listed below)\n";
  os << "  P pass  F fail  X expected fail  U unexpected pass  . not applicable\n\n";
  for (std::size_t j = 0; j < subjects.size(); ++j) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%2zu", j + 1);
    os << "  [" << buf << "] " << subjects[j] << "\n";
  }
  os << "\n" << std::string(w + 2, ' ');
  for (std::size_t j = 0; j < subjects.size(); ++j) os << ((j + 1) % 10);
  os << "\n";
  for (const auto& n : names) {
    os << n << std::string(w + 2 - n.size(), ' ');
    for (const auto& sub : subjects) {
      char cell = '.';
      for (const auto& c : list.checks()) {
        if (c.name != n || c.subject != sub) continue;
        const char st = "PFXU"[static_cast<int>(c.status())];
        // any failing entry dominates the cell
        if (cell == '.' || st == 'F' || st == 'U') cell = st;
      }
      os << cell;
    }
    os << "\n";
  }
  os << "\n";
}

void write_check_lines(std::ostream& os, const CheckList& list) {
  for (const auto& c : list.checks()) {
    os << status_name(c.status()) << "  " << c.subject << "  " << c.name << "  measured "
       << fmt(c.measured) << (c.relation == Relation::kAtMost ? " <= " : " >= ") << fmt(c.bound);
    if (!c.note.empty()) os << "  (" << c.note << ")";
    os << "\n";
  }
  os << "\nsummary: " << list.checks().size() << " checks, " << list.count(Status::kPass)
     << " pass, " << list.count(Status::kFail) << " fail, " << list.count(Status::kExpectedFail)
     << " expected-fail, " << list.count(Status::kUnexpectedPass) << " unexpected-pass\n";
}

}  // namespace kahler::report
