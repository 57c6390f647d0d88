#include "rigidlim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "rigidlim/field_io.hpp"
#include "rigidlim/restriction.hpp"

namespace rigidlim {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_eps(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

bool strictly_decreasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

double ball_volume(int d, double r) { return d == 3 ? 4.0 / 3.0 * kPi * r * r * r : kPi * r * r; }

AssumptionFlag make_flag(std::string name, std::string expr, bool to_infinity, bool binding,
                         const std::vector<double>& eps_list, const std::function<double(double)>& f) {
  AssumptionFlag fl;
  fl.name = std::move(name);
  fl.expression = std::move(expr);
  fl.to_infinity = to_infinity;
  fl.binding = binding;
  for (double e : eps_list) fl.values.push_back(f(e));
  for (std::size_t k = 1; k < fl.values.size(); ++k)
    fl.ratios.push_back(fl.values[k - 1] != 0.0 ? fl.values[k] / fl.values[k - 1]
                                                 : std::numeric_limits<double>::quiet_NaN());
  fl.verdict = trend_verdict(fl.values, to_infinity);
  return fl;
}

json flag_json(const AssumptionFlag& f) {
  json j;
  j["name"] = f.name;
  j["expression"] = f.expression;
  j["limit"] = f.to_infinity ? "+inf" : "0";
  j["binding"] = f.binding;
  j["values"] = f.values;
  json ratios = json::array();
  for (double r : f.ratios) ratios.push_back(std::isfinite(r) ? json(r) : json(nullptr));
  j["ratios"] = ratios;
  j["verdict"] = to_string(f.verdict);
  if (!f.warning.empty()) j["warning"] = f.warning;
  return j;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json slope_json(const SlopeFit& s) {
  return {{"slope", s.slope}, {"intercept", s.intercept}, {"stderr", s.stderr_slope}};
}

}  // namespace

// ---- Assumptions -------------------------------------------------------

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Satisfied:
      return "satisfied";
    case Verdict::Violated:
      return "violated";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

const AssumptionFlag* AssumptionReport::find(const std::string& name) const {
  for (const auto& f : flags)
    if (f.name == name) return &f;
  return nullptr;
}

bool AssumptionReport::any_blocking() const {
  return std::any_of(flags.begin(), flags.end(), [](const AssumptionFlag& f) { return f.blocking(); });
}

std::vector<std::string> AssumptionReport::warnings() const {
  std::vector<std::string> out;
  for (const auto& f : flags)
    if (!f.warning.empty()) out.push_back(f.name + ": " + f.warning);
  return out;
}

std::string AssumptionReport::compact() const {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f.name + '=' + to_string(f.verdict);
    if (!f.warning.empty()) out += '!';
  }
  return out;
}

Verdict trend_verdict(const std::vector<double>& values, bool to_infinity) {
  if (values.size() < 2) return Verdict::Inconclusive;
  if (!to_infinity && std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; }))
    return Verdict::Satisfied;
  bool up = true, down = true;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (!(values[k] > values[k - 1])) up = false;
    if (!(values[k] < values[k - 1])) down = false;
  }
  if (to_infinity) return up ? Verdict::Satisfied : down ? Verdict::Violated : Verdict::Inconclusive;
  return down ? Verdict::Satisfied : up ? Verdict::Violated : Verdict::Inconclusive;
}

AssumptionReport check_assumptions(const SweepFamily& family, const InitialGapRule& initial_gap) {
  family.validate();
  const auto& eps = family.eps_list;
  const double delta = family.delta, delta_tilde = family.delta_tilde;
  const bool is2 = family.dimension == 2;
  auto area = [&](int d, double e) { return ball_volume(d, family.radius(e)); };
  auto mass = [&](int d, double e) { return family.density(e) * area(d, e); };

  AssumptionReport rep;
  rep.flags.push_back(make_flag("mass_2d", "m/|S|^delta", false, is2, eps,
                                [&](double e) { return mass(2, e) / std::pow(area(2, e), delta); }));
  AssumptionFlag vol2 = make_flag("volume_2d", "|S|/eps^delta_tilde", true, is2, eps,
                                  [&](double e) { return area(2, e) / std::pow(e, delta_tilde); });
  if (vol2.verdict != Verdict::Satisfied)
    vol2.warning =
        "|S|/eps^delta_tilde does not diverge for a body inside B_eps when delta_tilde < 1; the literal "
        "2D volume condition cannot hold and is reported without blocking";
  rep.flags.push_back(std::move(vol2));
  rep.flags.push_back(make_flag("mass_3d", "m/|S|^(1/3)", false, !is2, eps,
                                [&](double e) { return mass(3, e) / std::cbrt(area(3, e)); }));
  rep.flags.push_back(make_flag("volume_3d", "|S|/eps^(9/2)", true, !is2, eps,
                                [&](double e) { return area(3, e) / std::pow(e, 4.5); }));
  if (initial_gap && is2)
    rep.flags.push_back(make_flag("initial_data_2d", "||u_in_eps - u_in||_L2(F)/|S|^delta", false, true, eps,
                                  [&](double e) { return initial_gap(e) / std::pow(area(2, e), delta); }));
  return rep;
}

double restricted_initial_gap(const BackgroundSolution& bg, double eps, double radius, Vec2 center,
                              int cells_per_eps) {
  auto phi = [&](Vec2 x) { return bg.velocity(0.0, x); };
  const Lattice lat{center, eps / cells_per_eps};
  const LocalRestriction r = restrict_local(sampler_from_function(phi, lat), lat, eps, center, phi(center),
                                            RestrictionOptions{static_cast<double>(cells_per_eps), 1e-8});
  const AnnulusMesh& m = r.mesh;
  const PatchField d = r.difference();
  double sum = 0.0;
  for (int j = m.j0(); j < m.j0() + m.ny(); ++j)
    for (int i = m.i0(); i < m.i0() + m.nx(); ++i) {
      const std::size_t k = m.local(i, j);
      if (norm(lat.xface(i, j) - center) > radius) sum += d.u[k] * d.u[k];
      if (norm(lat.yface(i, j) - center) > radius) sum += d.v[k] * d.v[k];
    }
  return std::sqrt(sum * lat.h * lat.h);
}

// ---- Ledger evaluation ---------------------------------------------------

LedgerChecks ledger_checks(const AppConfig& cfg) {
  LedgerChecks c;
  c.dimension = 2;  // the simulation is planar whatever the family's symbolic dimension
  c.delta = cfg.family.delta;
  c.delta_tilde = cfg.family.delta_tilde;
  c.c_growth = cfg.checks.c_growth;
  c.slack = cfg.checks.slack;
  c.energy_tol = cfg.sim.energy_tol;
  return c;
}

LedgerEvaluation evaluate_ledger(const EnergyLedger& ledger, const LedgerChecks& checks) {
  LedgerEvaluation ev;
  ev.energy = energy_inequality_check(ledger, checks.energy_tol);
  if (ledger.radius > 0.0) {
    RestBoundParams rp;
    rp.d = checks.dimension;
    rp.eps = ledger.eps;
    rp.mass = ledger.mass();
    rp.area = ledger.area();
    rp.delta = checks.delta;
    rp.delta_tilde = checks.delta_tilde;
    ev.rest_unit = rest_bound(rp);
    ev.relative = check_relative_energy_inequality(ledger, checks.c_growth, rp, checks.c_rest, checks.slack);
    ev.slip = slip_control_check(ledger, ledger.area(), checks.dimension, checks.delta, checks.c_growth,
                                 ev.relative.c_rest * ev.rest_unit);
  } else {
    // Without a body there is no rest term and no slip; only the energy identity applies.
    ev.relative.pass = true;
    ev.slip.gronwall_holds = true;
  }
  return ev;
}

std::string ledger_report_json(const std::string& run_id, const EnergyLedger& ledger, const LedgerEvaluation& ev) {
  json j;
  j["run_id"] = run_id;
  j["eps"] = ledger.eps;
  j["samples"] = ledger.samples.size();
  j["pass"] = ev.pass();
  j["energy_inequality"] = {{"pass", ev.energy.pass},
                            {"max_violation", finite_or_null(ev.energy.max_violation)},
                            {"max_relative_gap", ev.energy.max_relative_gap},
                            {"tolerance", ev.energy.tolerance}};
  j["relative_energy_inequality"] = {{"pass", ev.relative.pass},
                                     {"c_growth", ev.relative.c_growth},
                                     {"c_rest", ev.relative.c_rest},
                                     {"fitted_c_rest", ev.relative.fitted_c_rest},
                                     {"fitted_c_growth", finite_or_null(ev.relative.fitted_c_growth)},
                                     {"rest_unit", ev.rest_unit},
                                     {"slack_used", finite_or_null(ev.relative.slack_used)},
                                     {"slack_tol", ev.relative.slack_tol}};
  j["slip_control"] = {{"pass", ev.slip.gronwall_holds},
                       {"exponent", ev.slip.exponent},
                       {"slip_sq", ev.slip.slip_sq},
                       {"strain_sq", ev.slip.strain_sq},
                       {"fluid_sq", ev.slip.fluid_sq},
                       {"constant", ev.slip.constant},
                       {"gronwall_bound", ev.slip.gronwall_bound}};
  return j.dump(2);
}

// ---- Time series ---------------------------------------------------------

namespace {

// Rate columns are authoritative; the integral columns are recomputed on read.
const std::vector<std::string> kColumns = {
    "t", "h_x", "h_y", "theta", "ell_x", "ell_y", "omega", "u_at_h_x", "u_at_h_y", "slip", "energy", "rel_energy",
    "dissipation_distance", "rigidity_residual", "energy_dissipation_rate", "rel_energy_fluid", "strain",
    "rel_energy_integral", "energy_dissipation", "slip_sq_integral", "strain_integral", "fluid_rel_integral"};

std::vector<double> row_values(const LedgerSample& s) {
  return {s.t,
          s.position.x,
          s.position.y,
          s.angle,
          s.velocity.x,
          s.velocity.y,
          s.angular_velocity,
          s.background_at_body.x,
          s.background_at_body.y,
          s.slip,
          s.energy,
          s.rel_energy,
          s.dissipation_distance,
          s.rigidity_residual,
          s.energy_dissipation_rate,
          s.rel_energy_fluid,
          s.strain,
          s.rel_energy_integral,
          s.energy_dissipation,
          s.slip_sq_integral,
          s.strain_integral,
          s.fluid_rel_integral};
}

}  // namespace

void write_timeseries(const EnergyLedger& ledger, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw Error("cannot write " + path);
  for (std::size_t c = 0; c < kColumns.size(); ++c) std::fprintf(f, "%s%s", c ? "," : "", kColumns[c].c_str());
  std::fputc('\n', f);
  for (const LedgerSample& s : ledger.samples) {
    const auto v = row_values(s);
    for (std::size_t c = 0; c < v.size(); ++c) std::fprintf(f, "%s%.17g", c ? "," : "", v[c]);
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) throw Error("error writing " + path);
}

std::vector<LedgerSample> read_timeseries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty file");
  std::map<std::string, std::size_t> col;
  {
    std::istringstream hs(line);
    std::string name;
    for (std::size_t k = 0; std::getline(hs, name, ','); ++k) col[name] = k;
  }
  for (const std::string& c : kColumns)
    if (!col.count(c)) throw Error(path + ": missing column " + c);
  std::vector<LedgerSample> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> v;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != col.size()) throw Error(path + ": ragged row");
    auto get = [&](const char* name) { return v[col.at(name)]; };
    LedgerSample s;
    s.t = get("t");
    s.position = {get("h_x"), get("h_y")};
    s.angle = get("theta");
    s.velocity = {get("ell_x"), get("ell_y")};
    s.angular_velocity = get("omega");
    s.background_at_body = {get("u_at_h_x"), get("u_at_h_y")};
    s.slip = get("slip");
    s.energy = get("energy");
    s.rel_energy = get("rel_energy");
    s.rigidity_residual = get("rigidity_residual");
    s.energy_dissipation_rate = get("energy_dissipation_rate");
    s.rel_energy_fluid = get("rel_energy_fluid");
    s.strain = get("strain");
    s.dissipation_distance = get("dissipation_distance");
    s.rel_energy_integral = get("rel_energy_integral");
    s.energy_dissipation = get("energy_dissipation");
    s.slip_sq_integral = get("slip_sq_integral");
    s.strain_integral = get("strain_integral");
    s.fluid_rel_integral = get("fluid_rel_integral");
    rows.push_back(s);
  }
  return rows;
}

// ---- Runs ----------------------------------------------------------------

namespace {

void write_run_json(const RunSummary& r, const AppConfig& cfg, const LedgerChecks& checks, const std::string& path) {
  json j;
  j["run_id"] = r.id;
  j["eps"] = r.eps;
  j["radius"] = r.radius;
  j["density"] = r.density;
  j["mass"] = r.mass;
  j["area"] = r.area;
  j["viscosity"] = cfg.sim.viscosity;
  j["final_time"] = cfg.sim.final_time;
  j["background"] = cfg.sim.background;
  j["has_body"] = cfg.sim.has_body;
  j["n"] = r.n;
  j["side"] = cfg.sim.side;
  j["dt"] = r.dt;
  j["steps"] = r.steps;
  j["sample_every"] = cfg.sim.sample_every;
  j["slip_l2"] = r.slip_l2;
  j["traj_gap_sup"] = r.traj_gap_sup;
  j["tracer_refinement"] = r.tracer_refinement;
  j["max_energy_growth"] = r.max_energy_growth;
  j["max_exchange_residual"] = r.max_exchange_residual;
  j["checks"] = {{"dimension", checks.dimension},   {"delta", checks.delta},   {"delta_tilde", checks.delta_tilde},
                 {"c_growth", checks.c_growth},     {"slack", checks.slack},   {"energy_tol", checks.energy_tol},
                 {"c_rest", checks.c_rest}};
  j["report"] = json::parse(ledger_report_json(r.id, r.ledger, r.eval));
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

RunSummary run_member(const AppConfig& cfg, const BackgroundSolution& bg, const std::string& dir) {
  const SimConfig& sc = cfg.sim;
  if (!dir.empty()) fs::create_directories(dir);

  LedgerRecorder recorder(bg, sc);
  int sample = 0;
  const int dump_every = cfg.output.dump_every;
  SampleObserver observer = [&](const FsiState& s) {
    recorder(s);
    if (!dir.empty() && dump_every > 0 && sample % dump_every == 0) {
      char name[64];
      std::snprintf(name, sizeof name, "u_%06ld.bin", s.step);
      write_field_dump((fs::path(dir) / name).string(), s.u);
    }
    ++sample;
  };
  const RunRecord run =
      run_simulation(sc, bg, observer, dir.empty() ? std::string{} : (fs::path(dir) / "failure_dump.bin").string());

  RunSummary r;
  r.id = sc.has_body ? "eps_" + format_eps(sc.restriction_scale()) : "no_body";
  r.eps = sc.restriction_scale();
  r.radius = sc.has_body ? sc.radius : 0.0;
  r.density = sc.density;
  r.n = sc.n;
  r.dt = run.dt;
  r.steps = run.steps;
  r.max_energy_growth = run.max_energy_growth;
  for (const StepReport& s : run.reports) r.max_exchange_residual = std::max(r.max_exchange_residual, s.exchange_residual);
  r.ledger = recorder.take();
  r.mass = r.ledger.mass();
  r.area = r.ledger.area();
  r.slip_l2 = r.ledger.slip_l2();

  // Reference tracer from the body's start, on a step dividing the flow step.
  const auto& samples = r.ledger.samples;
  if (!samples.empty()) {
    const int sub = std::max(1, static_cast<int>(std::ceil(run.dt / 2e-3)));
    const double tdt = run.dt / sub;
    const Vec2 h0 = samples.front().position;
    const TracerTrajectory coarse = tracer_trajectory(bg, h0, sc.final_time, tdt);
    const TracerTrajectory fine = tracer_trajectory(bg, h0, sc.final_time, tdt / 2);
    const Grid2D grid(sc.n, sc.side);
    for (const LedgerSample& s : samples) {
      const Vec2 ref = trajectory_at(coarse, s.t);
      r.tracer_refinement = std::max(r.tracer_refinement, norm(ref - trajectory_at(fine, s.t)));
      r.traj_gap_sup = std::max(r.traj_gap_sup, norm(grid.min_image(s.position - ref)));
    }
  }

  const LedgerChecks checks = ledger_checks(cfg);
  r.eval = evaluate_ledger(r.ledger, checks);
  if (!dir.empty()) {
    write_timeseries(r.ledger, (fs::path(dir) / "timeseries.csv").string());
    write_run_json(r, cfg, checks, (fs::path(dir) / "run.json").string());
  }
  return r;
}

StoredRun load_run(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream in(root / "run.json");
  if (!in) throw Error("cannot read " + (root / "run.json").string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error((root / "run.json").string() + ": " + e.what());
  }
  StoredRun s;
  try {
    s.id = j.at("run_id").get<std::string>();
    s.ledger.eps = j.at("eps").get<double>();
    s.ledger.radius = j.at("radius").get<double>();
    s.ledger.density = j.at("density").get<double>();
    s.ledger.viscosity = j.at("viscosity").get<double>();
    s.ledger.final_time = j.at("final_time").get<double>();
    const json& c = j.at("checks");
    s.checks.dimension = c.at("dimension").get<int>();
    s.checks.delta = c.at("delta").get<double>();
    s.checks.delta_tilde = c.at("delta_tilde").get<double>();
    s.checks.c_growth = c.at("c_growth").get<double>();
    s.checks.slack = c.at("slack").get<double>();
    s.checks.energy_tol = c.at("energy_tol").get<double>();
    s.checks.c_rest = c.at("c_rest").get<double>();
  } catch (const json::exception& e) {
    throw Error((root / "run.json").string() + ": " + e.what());
  }
  // Cumulative columns are recomputed from the rates rather than trusted from the file.
  for (LedgerSample& row : read_timeseries((root / "timeseries.csv").string())) s.ledger.append(row);
  return s;
}

// ---- Sweeps --------------------------------------------------------------

double constant_spread(const std::vector<double>& c) {
  if (c.empty()) return 0.0;
  const double mean = std::accumulate(c.begin(), c.end(), 0.0) / static_cast<double>(c.size());
  if (mean == 0.0) return 0.0;
  double s = 0.0;
  for (double v : c) s = std::max(s, std::abs(v / mean - 1.0));
  return s;
}

bool SweepReport::pass() const {
  if (!failures.empty() || members.empty()) return false;
  const bool trend = outside_hypotheses || (slip_monotone && gap_monotone);
  return trend && energy_ok && relative_ok && rest_stable && slip_stable;
}

AppConfig member_config(const AppConfig& cfg, double eps, int n) {
  AppConfig m = cfg;
  m.sim.n = n;
  m.sim.has_body = true;
  m.sim.eps = eps;
  m.sim.radius = cfg.family.radius(eps);
  m.sim.density = cfg.family.density(eps);
  return m;
}

SweepReport run_sweep(const AppConfig& cfg, int threads) {
  const SweepFamily& fam = cfg.family;
  fam.validate();
  const BackgroundSolution bg = make_background(cfg.sim.background, cfg.sim.viscosity, cfg.sim.uniform_velocity);

  SweepReport rep;
  rep.assumptions = check_assumptions(fam, [&](double e) {
    return restricted_initial_gap(bg, e, fam.radius(e), cfg.sim.position);
  });
  if (rep.assumptions.any_blocking()) {
    if (!cfg.checks.force)
      throw Error("sweep family violates the scaling assumptions (" + rep.assumptions.compact() +
                  "); rerun with force to proceed");
    rep.outside_hypotheses = true;
  }
  rep.n = cfg.explicit_n ? cfg.sim.n : fam.grid_n(cfg.sim.side);

  const std::size_t count = fam.eps_list.size();
  std::vector<std::optional<RunSummary>> results(count);
  std::vector<std::string> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= count || abort.load()) return;
      const double eps = fam.eps_list[k];
      try {
        const std::string dir =
            cfg.output.dir.empty() ? std::string{} : (fs::path(cfg.output.dir) / ("eps_" + format_eps(eps))).string();
        results[k] = run_member(member_config(cfg, eps, rep.n), bg, dir);
      } catch (const std::exception& e) {
        errors[k] = "eps " + format_eps(eps) + ": " + e.what();
        abort.store(true);
      }
    }
  };
  unsigned nthreads = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
  nthreads = std::min<unsigned>(nthreads, static_cast<unsigned>(count));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Single-threaded reduction in eps_list order.
  for (std::size_t k = 0; k < count; ++k) {
    if (!errors[k].empty()) rep.failures.push_back(errors[k]);
    if (results[k]) rep.members.push_back(std::move(*results[k]));
  }
  if (!rep.failures.empty() || rep.members.size() != count) {
    if (rep.failures.empty()) rep.failures.push_back("sweep aborted before every member ran");
    return rep;
  }

  std::vector<double> slip, gap, c_rest, c_slip;
  rep.energy_ok = true;
  for (const RunSummary& m : rep.members) {
    slip.push_back(m.slip_l2);
    gap.push_back(m.traj_gap_sup);
    c_rest.push_back(m.eval.relative.fitted_c_rest);
    c_slip.push_back(m.eval.slip.constant);
    rep.energy_ok = rep.energy_ok && m.eval.energy.pass;
  }
  rep.slip_monotone = strictly_decreasing(slip);
  rep.gap_monotone = strictly_decreasing(gap);

  rep.shared_c_rest = std::accumulate(c_rest.begin(), c_rest.end(), 0.0) / static_cast<double>(count);
  rep.rest_spread = constant_spread(c_rest);
  rep.rest_stable = rep.rest_spread <= cfg.checks.rest_stability;
  // The verdict uses each member's fitted constant; the shared-constant slack is reported alongside.
  rep.relative_ok = true;
  LedgerChecks shared = ledger_checks(cfg);
  shared.c_rest = rep.shared_c_rest;
  for (const RunSummary& m : rep.members) {
    rep.relative_ok = rep.relative_ok && m.eval.relative.pass;
    rep.shared_relative.push_back(evaluate_ledger(m.ledger, shared).relative);
  }

  rep.shared_slip_constant = std::accumulate(c_slip.begin(), c_slip.end(), 0.0) / static_cast<double>(count);
  rep.slip_spread = constant_spread(c_slip);
  rep.slip_stable = rep.slip_spread <= cfg.checks.slip_stability;

  auto positive = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (count >= 3 && positive(slip) && positive(gap)) {
    std::vector<std::pair<double, double>> ps, pg;
    for (std::size_t k = 0; k < count; ++k) {
      ps.emplace_back(fam.eps_list[k], slip[k]);
      pg.emplace_back(fam.eps_list[k], gap[k]);
    }
    rep.slip_slope = fit_slope(ps);
    rep.gap_slope = fit_slope(pg);
    rep.slopes_available = true;
  }
  return rep;
}

void write_sweep_outputs(const SweepReport& rep, const AppConfig& cfg, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path root(dir);
  {
    std::FILE* f = std::fopen((root / "sweep.csv").string().c_str(), "w");
    if (!f) throw Error("cannot write " + (root / "sweep.csv").string());
    std::fprintf(f, "eps,radius,mass,area,slip_l2,traj_gap_sup,rest_bound,assumption_flags\n");
    const std::string flags = rep.assumptions.compact();
    for (const RunSummary& m : rep.members)
      std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", m.eps, m.radius, m.mass, m.area, m.slip_l2,
                   m.traj_gap_sup, m.eval.rest_unit, flags.c_str());
    if (std::fclose(f) != 0) throw Error("error writing sweep.csv");
  }

  json j;
  j["pass"] = rep.pass();
  j["outside_theorem_hypotheses"] = rep.outside_hypotheses;
  j["n"] = rep.n;
  j["eps_list"] = cfg.family.eps_list;
  j["failures"] = rep.failures;
  json flags = json::array();
  for (const auto& f : rep.assumptions.flags) flags.push_back(flag_json(f));
  j["assumptions"] = {{"flags", flags}, {"warnings", rep.assumptions.warnings()}};
  j["verdicts"] = {{"slip_strictly_decreasing", rep.slip_monotone},
                   {"gap_strictly_decreasing", rep.gap_monotone},
                   {"monotone_required", !rep.outside_hypotheses},
                   {"energy_inequality", rep.energy_ok},
                   {"relative_energy_inequality", rep.relative_ok},
                   {"rest_constant_stable", rep.rest_stable},
                   {"slip_constant_stable", rep.slip_stable}};
  j["constants"] = {{"c_growth", cfg.checks.c_growth},
                    {"shared_c_rest", rep.shared_c_rest},
                    {"rest_spread", rep.rest_spread},
                    {"rest_tolerance", cfg.checks.rest_stability},
                    {"shared_slip_constant", rep.shared_slip_constant},
                    {"slip_spread", rep.slip_spread},
                    {"slip_tolerance", cfg.checks.slip_stability}};
  if (rep.slopes_available)
    j["slopes"] = {{"slip_l2", slope_json(rep.slip_slope)}, {"traj_gap_sup", slope_json(rep.gap_slope)}};
  else
    j["slopes"] = nullptr;
  json members = json::array();
  for (std::size_t k = 0; k < rep.members.size(); ++k) {
    const RunSummary& m = rep.members[k];
    json mj = {{"run_id", m.id},
               {"eps", m.eps},
               {"radius", m.radius},
               {"density", m.density},
               {"mass", m.mass},
               {"n", m.n},
               {"dt", m.dt},
               {"steps", m.steps},
               {"slip_l2", m.slip_l2},
               {"traj_gap_sup", m.traj_gap_sup},
               {"tracer_refinement", m.tracer_refinement},
               {"rest_bound", m.eval.rest_unit},
               {"energy_max_violation", finite_or_null(m.eval.energy.max_violation)},
               {"fitted_c_rest", m.eval.relative.fitted_c_rest},
               {"fitted_c_growth", finite_or_null(m.eval.relative.fitted_c_growth)},
               {"slip_constant", m.eval.slip.constant},
               {"gronwall_holds", m.eval.slip.gronwall_holds}};
    if (k < rep.shared_relative.size())
      mj["shared_slack_used"] = finite_or_null(rep.shared_relative[k].slack_used);
    members.push_back(mj);
  }
  j["members"] = members;
  std::ofstream out(root / "summary.json");
  if (!out) throw Error("cannot write summary.json");
  out << j.dump(2) << '\n';
}

}  // namespace rigidlim
