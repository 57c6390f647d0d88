#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rigidlim/config.hpp"
#include "rigidlim/diagnostics.hpp"
#include "rigidlim/stats.hpp"

namespace rigidlim {

// ---- Assumption checker ------------------------------------------------

enum class Verdict { Satisfied, Violated, Inconclusive };
const char* to_string(Verdict v);

/// One limit expression evaluated along eps_list.
struct AssumptionFlag {
  std::string name;
  std::string expression;
  bool to_infinity = false;  // limit target: +infinity, otherwise 0
  /// Whether the flag belongs to the family's dimension (others are informational).
  bool binding = true;
  std::vector<double> values;
  std::vector<double> ratios;  // values[k + 1] / values[k]
  Verdict verdict = Verdict::Inconclusive;
  /// Set when a violation is reported without blocking the sweep.
  std::string warning;
  bool blocking() const { return binding && verdict == Verdict::Violated && warning.empty(); }
};

struct AssumptionReport {
  std::vector<AssumptionFlag> flags;
  const AssumptionFlag* find(const std::string& name) const;
  bool any_blocking() const;
  std::vector<std::string> warnings() const;
  /// "name=verdict" entries joined by ';', warnings suffixed with '!'.
  std::string compact() const;
};

/// Trend of a sequence along decreasing eps: strictly monotone toward the target
/// is satisfied, strictly monotone away from it is violated, anything else (or
/// fewer than two values) is inconclusive. An identically zero sequence satisfies
/// a limit 0.
Verdict trend_verdict(const std::vector<double>& values, bool to_infinity);

/// ||u^in_eps - u^in||_{L^2(F_eps)} as a function of eps.
using InitialGapRule = std::function<double(double eps)>;

/// Evaluates the scaling conditions in 2D and 3D and, when `initial_gap` is
/// given, the 2D initial-data condition. Pure function of its inputs.
AssumptionReport check_assumptions(const SweepFamily& family, const InitialGapRule& initial_gap = {});

/// ||R_eps(u(0)) - u(0)||_{L^2} outside the disk of the given radius, on a
/// lattice with `cells_per_eps` cells across eps.
double restricted_initial_gap(const BackgroundSolution& bg, double eps, double radius, Vec2 center,
                              int cells_per_eps = 16);

// ---- Ledger evaluation ---------------------------------------------------

/// Parameters of the per-run inequality checks.
struct LedgerChecks {
  int dimension = 2;
  double delta = 0.25;
  double delta_tilde = 0.5;
  double c_growth = 2.0;
  double slack = 0.10;
  double energy_tol = 1e-6;
  /// Rest constant for the relative-energy verdict; negative uses the fitted one.
  double c_rest = -1.0;
};

LedgerChecks ledger_checks(const AppConfig& cfg);

struct LedgerEvaluation {
  double rest_unit = 0.0;  // rest bound with C = 1
  EnergyInequalityReport energy;
  RelativeEnergyReport relative;
  SlipControlReport slip;
  bool pass() const { return energy.pass && relative.pass && slip.gronwall_holds; }
};

LedgerEvaluation evaluate_ledger(const EnergyLedger& ledger, const LedgerChecks& checks);

/// JSON rendering of an evaluation: {run_id, pass/fail per inequality, fitted constants, slack used}.
std::string ledger_report_json(const std::string& run_id, const EnergyLedger& ledger, const LedgerEvaluation& ev);

// ---- Runs and sweeps -----------------------------------------------------

struct RunSummary {
  std::string id;
  double eps = 0.0, radius = 0.0, density = 0.0, mass = 0.0, area = 0.0;
  int n = 0;
  double dt = 0.0;
  long steps = 0;
  double slip_l2 = 0.0;
  double traj_gap_sup = 0.0;
  /// sup_t |h(dt) - h(dt/2)| of the reference tracer.
  double tracer_refinement = 0.0;
  double max_energy_growth = 0.0;
  double max_exchange_residual = 0.0;
  LedgerEvaluation eval;
  EnergyLedger ledger;
};

/// One simulation of cfg.sim with its ledger, tracer comparison and checks.
/// Writes timeseries.csv, run.json and optional field dumps into `dir` unless empty.
RunSummary run_member(const AppConfig& cfg, const BackgroundSolution& bg, const std::string& dir);

struct SweepReport {
  std::vector<RunSummary> members;  // aligned with eps_list
  std::vector<std::string> failures;
  AssumptionReport assumptions;
  bool outside_hypotheses = false;
  int n = 0;

  bool slip_monotone = false;
  bool gap_monotone = false;
  bool energy_ok = false;

  /// Mean of the fitted rest constants and their spread.
  double shared_c_rest = 0.0;
  double rest_spread = 0.0;
  std::vector<RelativeEnergyReport> shared_relative;  // each member at shared_c_rest (informational)
  bool relative_ok = false;  // every member passes at its fitted constant
  bool rest_stable = false;

  double shared_slip_constant = 0.0;
  double slip_spread = 0.0;
  bool slip_stable = false;

  bool slopes_available = false;
  SlopeFit slip_slope, gap_slope;

  /// Monotone decrease is only demanded inside the theorem's hypotheses.
  bool pass() const;
};

/// max_k |c_k / mean(c) - 1|; 0 for an empty or all-zero list.
double constant_spread(const std::vector<double>& c);

/// Simulation config of one family member on an n x n grid.
AppConfig member_config(const AppConfig& cfg, double eps, int n);

/// Runs every member (at most `threads` concurrently; 0 picks the hardware
/// count) and reduces the sweep checks. Blocking assumption violations throw
/// unless checks.force. A failing member stops further launches; the failure is
/// listed and the remaining report is partial.
SweepReport run_sweep(const AppConfig& cfg, int threads = 0);

/// sweep.csv and summary.json in `dir`.
void write_sweep_outputs(const SweepReport& rep, const AppConfig& cfg, const std::string& dir);

/// Columns: t,h_x,h_y,theta,ell_x,ell_y,omega,u_at_h_x,u_at_h_y,slip,energy,rel_energy,
/// dissipation_distance,rigidity_residual, then the remaining rate and integral columns.
void write_timeseries(const EnergyLedger& ledger, const std::string& path);
/// Reads the rows back as written, cumulative columns included.
std::vector<LedgerSample> read_timeseries(const std::string& path);

/// Ledger of a run directory (run.json metadata plus timeseries.csv) and the checks it was run with.
struct StoredRun {
  std::string id;
  EnergyLedger ledger;
  LedgerChecks checks;
};
StoredRun load_run(const std::string& dir);

}  // namespace rigidlim
