// Command-line front end: simulations, sweeps and the standalone operator studies.
// Exit codes: 0 all checks pass, 2 a check failed, 1 runtime or usage error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rigidlim/background.hpp"
#include "rigidlim/bogovskii.hpp"
#include "rigidlim/config.hpp"
#include "rigidlim/diagnostics.hpp"
#include "rigidlim/harness.hpp"
#include "rigidlim/restriction.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rigidlim;

namespace {

constexpr int kPass = 0;
constexpr int kRuntimeError = 1;
constexpr int kCheckFailure = 2;

std::vector<double> list_or(const std::string& text, std::vector<double> fallback) {
  return text.empty() ? fallback : parse_list(text);
}

Vec2 parse_point(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() != 2) throw Error("expected a point 'x,y', got '" + text + "'");
  return {v[0], v[1]};
}

/// Writes `body` to dir/name when dir is set, otherwise to stdout.
void emit(const std::string& dir, const std::string& name, const std::string& body) {
  if (dir.empty()) {
    std::cout << body;
    return;
  }
  fs::create_directories(dir);
  std::ofstream out(fs::path(dir) / name);
  if (!out) throw Error("cannot write " + (fs::path(dir) / name).string());
  out << body;
}

AppConfig config_from(const std::string& path) { return path.empty() ? default_config() : load_config(path); }

// ---- operator-check -------------------------------------------------------

struct OperatorArgs {
  std::string eps_list, p_list, background = "taylor_green", center = "1.0,0.7", out;
  int cells_per_eps = 16;
  double tolerance = 0.25;
};

int operator_check(const OperatorArgs& a) {
  const auto eps = list_or(a.eps_list, {0.2, 0.1, 0.05, 0.025});
  const auto ps = list_or(a.p_list, {2, 3, 4});
  const BackgroundSolution bg = make_background(a.background, 0.01);
  const Vec2 center = parse_point(a.center);
  auto phi = [&](Vec2 x) { return bg.velocity(0.0, x); };

  std::ostringstream csv;
  csv << "eps,p,err_lp,err_grad_lp,err_lp_eta,err_grad_lp_eta\n";
  csv.precision(10);
  json studies = json::array();
  bool pass = true;
  for (double p : ps) {
    const ScalingStudy s = restriction_scaling_study(phi, p, eps, center, a.cells_per_eps);
    for (const auto& r : s.rows)
      csv << r.eps << ',' << r.p << ',' << r.err_lp << ',' << r.err_grad_lp << ',' << r.err_lp_eta << ','
          << r.err_grad_lp_eta << '\n';
    const bool ok = std::abs(s.slope_lp.slope - s.theoretical_slope) <= a.tolerance &&
                    std::abs(s.slope_grad_lp.slope - s.theoretical_slope) <= a.tolerance;
    pass = pass && ok;
    auto sj = [](const SlopeFit& f) { return json{{"slope", f.slope}, {"stderr", f.stderr_slope}}; };
    studies.push_back({{"p", p},
                       {"theoretical_slope", s.theoretical_slope},
                       {"slope_err_lp", sj(s.slope_lp)},
                       {"slope_err_grad_lp", sj(s.slope_grad_lp)},
                       {"slope_err_lp_eta", sj(s.slope_lp_eta)},
                       {"slope_err_grad_lp_eta", sj(s.slope_grad_lp_eta)},
                       {"within_tolerance", ok}});
  }
  json summary = {{"background", bg.name},
                  {"center", {center.x, center.y}},
                  {"cells_per_eps", a.cells_per_eps},
                  {"tolerance", a.tolerance},
                  {"studies", studies},
                  {"pass", pass}};
  emit(a.out, "operator_check.csv", csv.str());
  emit(a.out, "operator_check.json", summary.dump(2) + "\n");
  return pass ? kPass : kCheckFailure;
}

// ---- bogovskii-check ------------------------------------------------------

struct BogovskiiArgs {
  int resolution = 16;
  int num_random = 20;
  std::string eps_list, out;
  unsigned long long seed = 20240601ULL;
  double residual_tol = 1e-6, trace_tol = 1e-8, spread_tol = 0.10;
};

int bogovskii_check(const BogovskiiArgs& a) {
  const auto eps = list_or(a.eps_list, {0.2, 0.1, 0.05});
  if (a.num_random < 1) throw Error("--num-random must be positive");
  std::ostringstream csv;
  csv << "eps,resolution,residual,trace_max,norm_ratio_p2\n";
  csv.precision(10);
  double worst_residual = 0.0, worst_trace = 0.0, hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (double e : eps) {
    const BogovskiiSolver solver(AnnulusMesh::scaled(a.resolution, e));
    const AnnulusMesh& m = solver.mesh();
    double residual = 0.0, trace = 0.0, ratio = 0.0;
    for (int k = 0; k < a.num_random; ++k) {
      const auto f = random_annulus_source(solver, a.seed + static_cast<unsigned long long>(k));
      const BogovskiiSolution s = solver.solve(f);
      residual = std::max(residual, s.residual);
      trace = std::max(trace, s.trace_max);
      const double l2 = m.l2_faces(s.field), grad = m.gradient_l2(s.field);
      ratio = std::max(ratio, std::sqrt(l2 * l2 + grad * grad) / m.l2_cells(f));
    }
    csv << e << ',' << a.resolution << ',' << residual << ',' << trace << ',' << ratio << '\n';
    worst_residual = std::max(worst_residual, residual);
    worst_trace = std::max(worst_trace, trace);
    hi = std::max(hi, ratio);
    lo = std::min(lo, ratio);
  }
  const double spread = hi / lo - 1.0;
  const bool pass = worst_residual <= a.residual_tol && worst_trace <= a.trace_tol && spread <= a.spread_tol;
  json summary = {{"constant", hi},           {"spread", spread},         {"max_residual", worst_residual},
                  {"max_trace", worst_trace}, {"num_random", a.num_random}, {"resolution", a.resolution},
                  {"pass", pass}};
  emit(a.out, "bogovskii_check.csv", csv.str());
  emit(a.out, "bogovskii_check.json", summary.dump(2) + "\n");
  return pass ? kPass : kCheckFailure;
}

// ---- sobolev-check --------------------------------------------------------

struct SobolevArgs {
  int n = 256;
  int fields = 50;
  double p = 4.0;
  std::string eps_list, center = "3.14159265358979,3.14159265358979", out;
  unsigned long long seed = 20240601ULL;
  double spread_tol = 0.25;
};

int sobolev_check(const SobolevArgs& a) {
  const auto eps = list_or(a.eps_list, {0.2, 0.1, 0.05});
  const SobolevStudy st = sobolev_study(Grid2D(a.n, 2.0 * kPi), eps, a.fields, a.p, a.seed, parse_point(a.center));
  std::ostringstream csv;
  csv << "eps,max_ratio,min_ratio\n";
  csv.precision(10);
  for (const auto& r : st.rows) csv << r.eps << ',' << r.max_ratio << ',' << r.min_ratio << '\n';
  const bool pass = st.spread <= a.spread_tol;
  json summary = {{"constant", st.constant}, {"spread", st.spread}, {"p", a.p},
                  {"fields", a.fields},      {"n", a.n},            {"pass", pass}};
  emit(a.out, "sobolev_check.csv", csv.str());
  emit(a.out, "sobolev_check.json", summary.dump(2) + "\n");
  return pass ? kPass : kCheckFailure;
}

// ---- simulate / sweep / report -------------------------------------------

struct RunArgs {
  std::string config, out, eps_list;
  int n = 0;
  int threads = 0;
  bool force = false;
};

void apply_overrides(AppConfig& cfg, const RunArgs& a) {
  if (!a.out.empty()) cfg.output.dir = a.out;
  if (a.n > 0) {
    cfg.sim.n = a.n;
    cfg.explicit_n = true;
  }
  if (!a.eps_list.empty()) cfg.family.eps_list = parse_list(a.eps_list);
  if (a.force) cfg.checks.force = true;
}

int simulate(const RunArgs& a) {
  AppConfig cfg = config_from(a.config);
  apply_overrides(cfg, a);
  const BackgroundSolution bg = make_background(cfg.sim.background, cfg.sim.viscosity, cfg.sim.uniform_velocity);
  const RunSummary r = run_member(cfg, bg, cfg.output.dir);
  std::printf("run %s: N=%d dt=%.6g steps=%ld slip_l2=%.6e traj_gap_sup=%.6e\n", r.id.c_str(), r.n, r.dt, r.steps,
              r.slip_l2, r.traj_gap_sup);
  std::printf("energy inequality: %s (max violation %.3e)\n", r.eval.energy.pass ? "pass" : "FAIL",
              r.eval.energy.max_violation);
  if (cfg.sim.has_body)
    std::printf("relative energy: %s (fitted C_rest %.4e, slack %.3e); slip constant %.4e\n",
                r.eval.relative.pass ? "pass" : "FAIL", r.eval.relative.fitted_c_rest, r.eval.relative.slack_used,
                r.eval.slip.constant);
  std::printf("outputs in %s\n", cfg.output.dir.c_str());
  return r.eval.pass() ? kPass : kCheckFailure;
}

int sweep(const RunArgs& a) {
  AppConfig cfg = config_from(a.config);
  apply_overrides(cfg, a);
  const SweepReport rep = run_sweep(cfg, a.threads);
  write_sweep_outputs(rep, cfg, cfg.output.dir);
  for (const auto& w : rep.assumptions.warnings()) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (rep.outside_hypotheses) std::printf("family is outside the theorem hypotheses (forced run)\n");
  std::printf("%-8s %-10s %-14s %-14s %-12s %-12s\n", "eps", "N", "slip_l2", "traj_gap_sup", "C_rest", "C_slip");
  for (const auto& m : rep.members)
    std::printf("%-8g %-10d %-14.6e %-14.6e %-12.4e %-12.4e\n", m.eps, m.n, m.slip_l2, m.traj_gap_sup,
                m.eval.relative.fitted_c_rest, m.eval.slip.constant);
  for (const auto& f : rep.failures) std::fprintf(stderr, "member failed: %s\n", f.c_str());
  if (!rep.failures.empty()) return kRuntimeError;
  std::printf("slip decreasing: %s, gap decreasing: %s, energy: %s\n", rep.slip_monotone ? "yes" : "no",
              rep.gap_monotone ? "yes" : "no", rep.energy_ok ? "pass" : "FAIL");
  std::printf("relative energy at shared C_rest %.4e: %s; spread %.3f (%s)\n", rep.shared_c_rest,
              rep.relative_ok ? "pass" : "FAIL", rep.rest_spread, rep.rest_stable ? "stable" : "UNSTABLE");
  std::printf("slip constant %.4e spread %.3f (%s)\n", rep.shared_slip_constant, rep.slip_spread,
              rep.slip_stable ? "stable" : "UNSTABLE");
  std::printf("sweep %s; outputs in %s\n", rep.pass() ? "pass" : "FAIL", cfg.output.dir.c_str());
  return rep.pass() ? kPass : kCheckFailure;
}

int report(const std::string& run_dir, const std::string& out) {
  const StoredRun run = load_run(run_dir);
  const LedgerEvaluation ev = evaluate_ledger(run.ledger, run.checks);
  const std::string text = ledger_report_json(run.id, run.ledger, ev) + "\n";
  if (out.empty())
    std::cout << text;
  else {
    std::ofstream f(out);
    if (!f) throw Error("cannot write " + out);
    f << text;
  }
  return ev.pass() ? kPass : kCheckFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small rigid body in a viscous fluid: simulations, eps-sweeps and operator checks"};
  app.require_subcommand(1);

  OperatorArgs op;
  auto* c_op = app.add_subcommand("operator-check", "Scaling of the restriction operator against eps");
  c_op->add_option("--eps-list", op.eps_list, "Comma-separated eps values (default 0.2,0.1,0.05,0.025)");
  c_op->add_option("--p-list", op.p_list, "Comma-separated exponents p (default 2,3,4)");
  c_op->add_option("--background", op.background, "Background field")->capture_default_str();
  c_op->add_option("--center", op.center, "Body center 'x,y'")->capture_default_str();
  c_op->add_option("--cells-per-eps", op.cells_per_eps, "Lattice cells across eps")->capture_default_str();
  c_op->add_option("--tolerance", op.tolerance, "Allowed slope deviation")->capture_default_str();
  c_op->add_option("--out", op.out, "Output directory (stdout if omitted)");

  BogovskiiArgs bo;
  auto* c_bo = app.add_subcommand("bogovskii-check", "Residual, trace and operator norm of the annulus solver");
  c_bo->add_option("--resolution", bo.resolution, "Cells across the annulus gap")->capture_default_str();
  c_bo->add_option("--num-random", bo.num_random, "Random sources per eps")->capture_default_str();
  c_bo->add_option("--eps-list", bo.eps_list, "Comma-separated eps values (default 0.2,0.1,0.05)");
  c_bo->add_option("--seed", bo.seed, "Random seed")->capture_default_str();
  c_bo->add_option("--out", bo.out, "Output directory (stdout if omitted)");

  SobolevArgs so;
  auto* c_so = app.add_subcommand("sobolev-check", "Embedding ratio over random fields and fluid masks");
  c_so->add_option("--n", so.n, "Grid cells per side")->capture_default_str();
  c_so->add_option("--fields", so.fields, "Number of random fields")->capture_default_str();
  c_so->add_option("--p", so.p, "Lebesgue exponent")->capture_default_str();
  c_so->add_option("--eps-list", so.eps_list, "Comma-separated mask radii (default 0.2,0.1,0.05)");
  c_so->add_option("--center", so.center, "Mask center 'x,y'");
  c_so->add_option("--seed", so.seed, "Random seed")->capture_default_str();
  c_so->add_option("--out", so.out, "Output directory (stdout if omitted)");

  RunArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "One coupled run with its energy ledger");
  c_sim->add_option("--config", sim.config, "INI configuration file")->check(CLI::ExistingFile);
  c_sim->add_option("--out", sim.out, "Output directory (overrides [output] dir)");
  c_sim->add_option("--n", sim.n, "Grid cells per side (overrides [grid] n)");

  RunArgs sw;
  auto* c_sw = app.add_subcommand("sweep", "Family of runs with decreasing eps");
  c_sw->add_option("--config", sw.config, "INI configuration file")->check(CLI::ExistingFile);
  c_sw->add_option("--out", sw.out, "Output directory (overrides [output] dir)");
  c_sw->add_option("--n", sw.n, "Grid cells per side for every member (default: family rule)");
  c_sw->add_option("--eps-list", sw.eps_list, "Comma-separated eps values (overrides [sweep] eps_list)");
  c_sw->add_option("--threads", sw.threads, "Concurrent members (0: hardware threads)")->capture_default_str();
  c_sw->add_flag("--force", sw.force, "Run even if the family violates the scaling assumptions");

  std::string run_dir, report_out;
  auto* c_rep = app.add_subcommand("report", "Re-evaluate a run directory's ledger and print JSON");
  c_rep->add_option("run_dir", run_dir, "Directory holding run.json and timeseries.csv")->required();
  c_rep->add_option("--out", report_out, "Write the JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kRuntimeError;
  }

  try {
    if (*c_op) return operator_check(op);
    if (*c_bo) return bogovskii_check(bo);
    if (*c_so) return sobolev_check(so);
    if (*c_sim) return simulate(sim);
    if (*c_sw) return sweep(sw);
    if (*c_rep) return report(run_dir, report_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
  return kRuntimeError;
}
