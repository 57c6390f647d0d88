// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rigidlim/bogovskii.hpp"
#include "rigidlim/config.hpp"
#include "rigidlim/diagnostics.hpp"
#include "rigidlim/harness.hpp"
#include "rigidlim/restriction.hpp"
#include "rigidlim/spectral.hpp"

using namespace rigidlim;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  json data = json::object();
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Vec2 taylor_green0(Vec2 x) { return {std::sin(x.x) * std::cos(x.y), -std::cos(x.x) * std::sin(x.y)}; }

double simpson(const std::function<double(double)>& f, double a, double b, int n = 400) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int k = 1; k < n; ++k) s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return s * h / 3.0;
}

// ---- 1: restriction scaling ------------------------------------------------

Outcome restriction_scaling() {
  Outcome o;
  o.pass = true;
  std::ostringstream d;
  for (double p : {2.0, 3.0, 4.0}) {
    const ScalingStudy s = restriction_scaling_study(taylor_green0, p, {0.2, 0.1, 0.05, 0.025}, {1.0, 0.7});
    const double target = 2.0 / p;
    const bool lp = std::abs(s.slope_lp.slope - target) <= 0.25;
    const bool grad = std::abs(s.slope_grad_lp.slope - target) <= 0.25;
    o.pass = o.pass && lp && grad;
    d << "p=" << p << ": slope " << fmt("%.3f", s.slope_lp.slope) << (lp ? "" : "!") << " grad "
      << fmt("%.3f", s.slope_grad_lp.slope) << (grad ? "" : "!") << " (target " << fmt("%.3f", target) << "); ";
    o.data[fmt("p%g", p)] = {{"target", target},
                             {"slope_lp", s.slope_lp.slope},
                             {"slope_grad_lp", s.slope_grad_lp.slope},
                             {"slope_lp_eta", s.slope_lp_eta.slope},
                             {"slope_grad_lp_eta", s.slope_grad_lp_eta.slope}};
  }
  o.detail = d.str();
  return o;
}

// ---- 2: restriction structure ----------------------------------------------

Outcome restriction_structure() {
  Outcome o;
  const Grid2D g(256, 2 * kPi);
  const VectorField2D phi = leray_project(VectorField2D::sample(g, [](Vec2 x) {
    return Vec2{std::sin(x.y) + 0.4 * std::cos(2 * x.x + x.y), std::cos(x.x) - 0.3 * std::sin(x.x - 2 * x.y)};
  }));
  const double eps = 0.4;
  const Vec2 c{2.1, 3.3};
  const RestrictionResult r = restrict_field(phi, eps, c);
  double outside = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      if (norm(g.min_image(g.xface(i, j) - c)) >= 2 * eps) outside = std::max(outside, std::abs(r.field.u(i, j) - phi.u(i, j)));
      if (norm(g.min_image(g.yface(i, j) - c)) >= 2 * eps) outside = std::max(outside, std::abs(r.field.v(i, j) - phi.v(i, j)));
    }
  const Lattice lat{{0.0, 0.0}, 0.1 / 16};
  const Vec2 value{0.7, -1.3};
  const LocalRestriction fixed = restrict_local(sampler_from_function([&](Vec2) { return value; }, lat), lat, 0.1, {0.01, -0.02}, value);
  const PatchField diff = fixed.difference();
  double fixed_err = 0.0;
  for (std::size_t k = 0; k < diff.u.size(); ++k) fixed_err = std::max({fixed_err, std::abs(diff.u[k]), std::abs(diff.v[k])});
  const double rig_tol = 1e-8 * max_abs(phi);
  o.pass = r.divergence_residual <= 1e-8 && r.rigidity_residual <= rig_tol && outside == 0.0 && fixed_err <= 1e-12;
  o.detail = "div " + fmt("%.2e", r.divergence_residual) + ", rigidity " + fmt("%.2e", r.rigidity_residual) +
             ", outside " + fmt("%.1e", outside) + ", fixed point " + fmt("%.2e", fixed_err);
  o.data = {{"divergence_residual", r.divergence_residual},
            {"rigidity_residual", r.rigidity_residual},
            {"outside_change", outside},
            {"fixed_point_error", fixed_err}};
  return o;
}

// ---- 3: Bogovskii operator -------------------------------------------------

Outcome bogovskii() {
  Outcome o;
  double residual = 0.0, trace = 0.0, hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (double eps : {0.2, 0.1, 0.05}) {
    const BogovskiiSolver s(AnnulusMesh::scaled(16, eps));
    const AnnulusMesh& m = s.mesh();
    double ratio = 0.0;
    for (unsigned long long seed = 1; seed <= 20; ++seed) {
      const auto f = random_annulus_source(s, seed);
      const BogovskiiSolution sol = s.solve(f);
      residual = std::max(residual, sol.residual);
      trace = std::max(trace, sol.trace_max / m.l2_cells(f));
      const double l2 = m.l2_faces(sol.field), grad = m.gradient_l2(sol.field);
      ratio = std::max(ratio, std::sqrt(l2 * l2 + grad * grad) / m.l2_cells(f));
    }
    o.data["norm_ratio"][fmt("%g", eps)] = ratio;
    hi = std::max(hi, ratio);
    lo = std::min(lo, ratio);
  }
  const double spread = hi / lo - 1.0;

  // Radial oracle on the reference annulus.
  auto a = [](double r) { return (r - 1) * (r - 1) * (2 - r) * (2 - r); };
  auto ap = [](double r) { return 2 * (r - 1) * (2 - r) * (2 - r) - 2 * (r - 1) * (r - 1) * (2 - r); };
  auto f = [&](double r) { return ap(r) + a(r) / r; };
  auto g = [&](double r) { return simpson([&](double s) { return s * f(s); }, 1.0, r) / r; };
  const BogovskiiSolver solver(AnnulusMesh::reference(16));
  const AnnulusMesh& m = solver.mesh();
  const BogovskiiSolution sol = solver.solve(solver.remove_mean(solver.sample_cells([&](Vec2 x) {
    const double r = norm(x);
    return r > 1.0 && r < 2.0 ? f(r) : 0.0;
  })));
  PatchField err = m.zero_faces(), exact = m.zero_faces();
  for (int j = m.j0(); j < m.j0() + m.ny(); ++j)
    for (int i = m.i0(); i < m.i0() + m.nx(); ++i) {
      const std::size_t k = m.local(i, j);
      const Vec2 px = m.lattice().xface(i, j), py = m.lattice().yface(i, j);
      const double rx = norm(px), ry = norm(py);
      if (rx > 1.0 && rx < 2.0) exact.u[k] = g(rx) * px.x / rx;
      if (ry > 1.0 && ry < 2.0) exact.v[k] = g(ry) * py.y / ry;
      err.u[k] = sol.field.u[k] - exact.u[k];
      err.v[k] = sol.field.v[k] - exact.v[k];
    }
  const double oracle = m.l2_faces(err) / m.l2_faces(exact);

  o.pass = residual <= 1e-6 && trace <= 1e-8 && oracle <= 0.02 && spread <= 0.10;
  o.detail = "residual " + fmt("%.2e", residual) + ", trace " + fmt("%.2e", trace) + ", radial oracle " +
             fmt("%.4f", oracle) + ", norm spread " + fmt("%.3f", spread);
  o.data["residual"] = residual;
  o.data["trace"] = trace;
  o.data["radial_oracle"] = oracle;
  o.data["norm_spread"] = spread;
  return o;
}

// ---- 4: solver verification ------------------------------------------------

Outcome taylor_green_verification() {
  Outcome o;
  SimConfig c;
  c.n = 128;
  c.has_body = false;
  c.viscosity = 0.01;
  c.final_time = 1.0;
  c.initial = InitialField::Background;
  c.sample_every = 10;
  const BackgroundSolution bg = taylor_green(c.viscosity);
  EnergyLedger ledger;
  ledger.viscosity = c.viscosity;
  ledger.final_time = c.final_time;
  const RunRecord rec = run_simulation(c, bg, [&](const FsiState& s) {
    LedgerSample row;
    row.t = s.t;
    row.energy = s.energy();
    row.energy_dissipation_rate = 4.0 * c.viscosity * strain_energy(s.u);
    ledger.append(row);
  });
  const VectorField2D exact = sample_background(bg, rec.final_state.u.grid(), 1.0);
  const double err = lp_norm(rec.final_state.u - exact, 2.0) / lp_norm(exact, 2.0);
  const double ke = 0.5 * rec.final_state.energy(), ke_exact = kPi * kPi * std::exp(-4.0 * c.viscosity);
  const double ke_err = std::abs(ke / ke_exact - 1.0);
  const EnergyInequalityReport ei = energy_inequality_check(ledger, 1e-6);
  o.pass = err <= 0.01 && ke_err <= 0.01 && rec.max_energy_growth <= 1e-6 && ei.pass;
  o.detail = "L2 error " + fmt("%.2e", err) + ", energy error " + fmt("%.2e", ke_err) + ", max step growth " +
             fmt("%.2e", rec.max_energy_growth) + ", inequality violation " + fmt("%.2e", ei.max_violation);
  o.data = {{"l2_error", err},
            {"energy_error", ke_err},
            {"max_step_growth", rec.max_energy_growth},
            {"inequality_violation", ei.max_violation}};
  return o;
}

// ---- 5: coupling sanity ----------------------------------------------------

double max_rigidity(double penalty) {
  SimConfig c;
  c.n = 256;
  c.final_time = 1.0;
  c.radius = 0.3;
  c.density = 2.0;
  c.dt = 0.005;
  c.penalty = penalty;
  c.sample_every = 20;
  double mx = 0.0;
  run_simulation(c, taylor_green(c.viscosity), [&](const FsiState& s) {
    if (s.t > 0.5) mx = std::max(mx, rigidity_residual(s));
  });
  return mx;
}

Outcome coupling() {
  Outcome o;
  // Galilean: uniform flow carrying a co-moving body.
  SimConfig c;
  c.n = 64;
  c.background = "uniform";
  c.radius = 0.5;
  c.density = 2.0;
  c.dt = 0.01;
  c.final_time = 1000 * c.dt;
  c.initial = InitialField::Background;
  c.sample_every = 1000;
  const Vec2 U{1.0, 0.5};
  const RunRecord gal = run_simulation(c, uniform_flow(U, c.viscosity));
  double dev = norm(gal.final_state.body.velocity - U);
  for (double x : gal.final_state.u.u_data()) dev = std::max(dev, std::abs(x - U.x));
  for (double x : gal.final_state.u.v_data()) dev = std::max(dev, std::abs(x - U.y));

  // Exchange antisymmetry on a non-trivial coupled run.
  SimConfig t;
  t.n = 128;
  t.final_time = 0.5;
  t.radius = 0.3;
  t.density = 2.0;
  t.sample_every = 1000;
  const RunRecord tg = run_simulation(t, taylor_green(t.viscosity));
  double exchange = 0.0;
  for (const auto& r : gal.reports) exchange = std::max(exchange, r.exchange_residual);
  for (const auto& r : tg.reports) exchange = std::max(exchange, r.exchange_residual);

  const double coarse = max_rigidity(0.04), fine = max_rigidity(0.02);
  const double ratio = coarse / fine;
  o.pass = gal.steps == 1000 && dev <= 1e-10 && exchange <= 1e-10 && std::abs(ratio - 2.0) <= 0.4;
  o.detail = "Galilean deviation " + fmt("%.2e", dev) + " over 1000 steps, exchange " + fmt("%.2e", exchange) +
             ", rigidity ratio " + fmt("%.3f", ratio);
  o.data = {{"galilean_deviation", dev},
            {"exchange_residual", exchange},
            {"rigidity_penalty_0.04", coarse},
            {"rigidity_penalty_0.02", fine},
            {"rigidity_ratio", ratio}};
  return o;
}

// ---- 6-8: default sweep ----------------------------------------------------

Outcome sweep_trend(const SweepReport& rep) {
  Outcome o;
  double refinement = 0.0;
  std::ostringstream d;
  d << "slip";
  for (const auto& m : rep.members) {
    refinement = std::max(refinement, m.tracer_refinement);
    d << ' ' << fmt("%.3e", m.slip_l2);
  }
  d << "; gap";
  for (const auto& m : rep.members) d << ' ' << fmt("%.3e", m.traj_gap_sup);
  d << "; tracer refinement " << fmt("%.1e", refinement);
  o.pass = rep.failures.empty() && rep.slip_monotone && rep.gap_monotone && refinement <= 1e-8;
  o.detail = d.str();
  o.data = {{"slip_monotone", rep.slip_monotone}, {"gap_monotone", rep.gap_monotone}, {"tracer_refinement", refinement}};
  return o;
}

Outcome sweep_relative(const SweepReport& rep) {
  Outcome o;
  std::ostringstream d;
  double slack = 0.0;
  d << "fitted C_rest";
  for (const auto& m : rep.members) {
    d << ' ' << fmt("%.3e", m.eval.relative.fitted_c_rest);
    slack = std::max(slack, m.eval.relative.slack_used);
  }
  d << "; spread " << fmt("%.3f", rep.rest_spread) << "; slack " << fmt("%.3f", slack);
  o.pass = rep.failures.empty() && rep.relative_ok && rep.rest_stable;
  o.detail = d.str();
  o.data = {{"shared_c_rest", rep.shared_c_rest}, {"spread", rep.rest_spread}, {"max_slack", slack}};
  return o;
}

Outcome sweep_slip(const SweepReport& rep) {
  Outcome o;
  std::ostringstream d;
  d << "slip constant";
  for (const auto& m : rep.members) d << ' ' << fmt("%.3e", m.eval.slip.constant);
  d << "; spread " << fmt("%.3f", rep.slip_spread);
  o.pass = rep.failures.empty() && rep.slip_stable;
  o.detail = d.str();
  o.data = {{"shared_constant", rep.shared_slip_constant}, {"spread", rep.slip_spread}};
  return o;
}

// ---- 9: Sobolev embedding --------------------------------------------------

Outcome sobolev() {
  Outcome o;
  const SobolevStudy st = sobolev_study(Grid2D(256, 2 * kPi), {0.2, 0.1, 0.05}, 50, 4.0, 20240601ULL, {kPi, kPi});
  o.pass = st.spread <= 0.25;
  o.detail = "constant " + fmt("%.4f", st.constant) + ", spread " + fmt("%.4f", st.spread);
  o.data = {{"constant", st.constant}, {"spread", st.spread}};
  return o;
}

// ---- 10: assumption checker ------------------------------------------------

Outcome assumptions() {
  Outcome o;
  const AppConfig cfg = default_config();
  const BackgroundSolution bg = taylor_green(cfg.sim.viscosity);
  const SweepFamily& fam = cfg.family;
  const AssumptionReport def = check_assumptions(fam, [&](double e) {
    return restricted_initial_gap(bg, e, fam.radius(e), cfg.sim.position);
  });
  SweepFamily heavy = fam;
  heavy.density.exponent = -3.0;
  const AssumptionReport neg = check_assumptions(heavy);
  const AssumptionFlag* mass = def.find("mass_2d");
  const AssumptionFlag* volume = def.find("volume_2d");
  const AssumptionFlag* heavy_mass = neg.find("mass_2d");
  o.pass = mass && volume && heavy_mass && mass->verdict == Verdict::Satisfied && !volume->warning.empty() &&
           !def.any_blocking() && heavy_mass->verdict == Verdict::Violated && neg.any_blocking();
  o.detail = "default: " + def.compact() + "; heavy: " + neg.compact();
  o.data = {{"default", def.compact()}, {"heavy", neg.compact()}};
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::string out = "acceptance_out";
  // Criteria listed as known failures still print FAIL but do not set the exit status.
  std::set<int> known_failures;
  for (int k = 1; k < argc; ++k) {
    const std::string a = argv[k];
    if (a == "--out" && k + 1 < argc) out = argv[++k];
    else if (a == "--known-failure" && k + 1 < argc) known_failures.insert(std::atoi(argv[++k]));
    else {
      std::fprintf(stderr, "usage: acceptance [--out DIR] [--known-failure ID]...\n");
      return 1;
    }
  }
  fs::create_directories(out);

  json summary = json::object();
  bool all = true;
  bool unexpected = false;
  auto report = [&](int id, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    all = all && o.pass;
    const bool known = known_failures.contains(id);
    unexpected = unexpected || (!o.pass && !known);
    summary[std::to_string(id)] = {{"pass", o.pass}, {"known_failure", known}, {"detail", o.detail}, {"seconds", secs}, {"data", o.data}};
  };

  report(1, restriction_scaling);
  report(2, restriction_structure);
  report(3, bogovskii);
  report(4, taylor_green_verification);
  report(5, coupling);

  AppConfig cfg = default_config();
  cfg.output.dir = (fs::path(out) / "sweep").string();
  SweepReport rep;
  std::string sweep_error;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    rep = run_sweep(cfg);
    write_sweep_outputs(rep, cfg, cfg.output.dir);
  } catch (const std::exception& e) {
    sweep_error = e.what();
  }
  const double sweep_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("default sweep: N=%d, %zu members, %.1fs\n", rep.n, rep.members.size(), sweep_secs);
  auto from_sweep = [&](Outcome (*fn)(const SweepReport&)) {
    return [&, fn] {
      if (!sweep_error.empty()) throw Error("sweep failed: " + sweep_error);
      if (!rep.failures.empty()) throw Error("sweep member failed: " + rep.failures.front());
      return fn(rep);
    };
  };
  report(6, from_sweep(sweep_trend));
  report(7, from_sweep(sweep_relative));
  report(8, from_sweep(sweep_slip));
  report(9, sobolev);
  report(10, assumptions);

  std::ofstream(fs::path(out) / "acceptance.json") << summary.dump(2) << "\n";
  std::printf("acceptance: %s\n", all ? "all criteria pass"
                                   : unexpected ? "some criteria FAIL"
                                                : "only known failures FAIL");
  return unexpected ? 1 : 0;
}
