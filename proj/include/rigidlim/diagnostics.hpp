#pragma once

#include <string>
#include <vector>

#include "rigidlim/background.hpp"
#include "rigidlim/fsi.hpp"
#include "rigidlim/restriction.hpp"

namespace rigidlim {

/// Background velocity sampled on the state's grid at the state's time.
VectorField2D sample_background(const BackgroundSolution& bg, const Grid2D& grid, double t);

/// R_eps of the background at the body position for the state's time.
RestrictionResult restricted_background(const FsiState& s, const BackgroundSolution& bg, double eps,
                                        const RestrictionOptions& opts = {});

/// int rho |a|^2 with rho = 1 + (density - 1) * (face coverage).
double weighted_energy(const FsiState& s, const VectorField2D& a);

/// int rho_eps |u_eps - R_eps(u)|^2.
double relative_energy(const FsiState& s, const BackgroundSolution& bg, double eps, const RestrictionOptions& opts = {});
/// Instantaneous dissipation distance rate 4 nu int |D(u_eps - R_eps(u))|^2.
double dissipation_distance(const FsiState& s, const BackgroundSolution& bg, double eps, double viscosity,
                            const RestrictionOptions& opts = {});

/// One ledger row. Rates are instantaneous; the cumulative columns integrate
/// them with the trapezoid rule over the sample times.
struct LedgerSample {
  double t = 0.0;
  Vec2 position;
  double angle = 0.0;
  Vec2 velocity;
  double angular_velocity = 0.0;
  Vec2 background_at_body;  // u(t, h_eps(t))
  double slip = 0.0;        // |velocity - background_at_body|
  double energy = 0.0;      // int rho |u_eps|^2
  double energy_dissipation_rate = 0.0;  // 4 nu int |D(u_eps)|^2
  double rel_energy = 0.0;               // int rho |w|^2, w = u_eps - R_eps(u)
  double rel_energy_fluid = 0.0;         // int_{F_eps} |w|^2
  double strain = 0.0;                   // int |D(w)|^2
  double rigidity_residual = 0.0;

  // Cumulative from t = 0.
  double dissipation_distance = 0.0;  // 4 nu int int |D(w)|^2
  double rel_energy_integral = 0.0;   // int int rho |w|^2
  double energy_dissipation = 0.0;    // 4 nu int int |D(u_eps)|^2
  double slip_sq_integral = 0.0;      // int |slip|^2
  double strain_integral = 0.0;       // int int |D(w)|^2
  double fluid_rel_integral = 0.0;    // int int_{F_eps} |w|^2
};

struct EnergyLedger {
  double eps = 0.0;
  double radius = 0.0;
  double density = 1.0;
  double viscosity = 0.0;
  double final_time = 0.0;
  std::vector<LedgerSample> samples;

  double area() const { return kPi * radius * radius; }
  double mass() const { return density * area(); }
  /// Starts at t = 0 and reaches final_time.
  bool complete() const;
  double initial_rel_energy() const { return samples.empty() ? 0.0 : samples.front().rel_energy; }
  /// ||l_eps - u(t, h_eps(t))||_{L^2(0, T)}.
  double slip_l2() const;
  /// Appends a row and fills its cumulative columns.
  void append(LedgerSample row);
};

/// Builds ledger rows from simulation samples.
class LedgerRecorder {
 public:
  LedgerRecorder(const BackgroundSolution& bg, const SimConfig& cfg);
  void operator()(const FsiState& s);
  const EnergyLedger& ledger() const { return ledger_; }
  EnergyLedger take() { return std::move(ledger_); }

 private:
  const BackgroundSolution& bg_;
  RestrictionOptions opts_;
  EnergyLedger ledger_;
};

// ---- Rest bound -------------------------------------------------------

struct RestBoundParams {
  int d = 2;
  double eps = 0.0;
  double mass = 0.0;
  double area = 0.0;          // |S_eps|
  double initial_area = 0.0;  // |S_eps^in|; 0 means equal to area
  double delta = 0.25;
  double delta_tilde = 0.5;
  double C = 1.0;
};

struct RestBoundTerms {
  double mass = 0.0, area = 0.0, eps_power = 0.0, cross = 0.0;
  double total = 0.0;  // C * (sum of the terms)
};

/// d = 3: C (m + |S| + eps^{3/2} + eps^3 |S^in|^{-1/3});
/// d = 2: C (m + |S| + eps^{dt} + eps^{1 + dt} |S^in|^{-delta}).
RestBoundTerms rest_bound_terms(const RestBoundParams& p);
double rest_bound(const RestBoundParams& p);

// ---- Inequality checks -----------------------------------------------

struct RelativeEnergyReport {
  bool pass = false;
  double c_growth = 0.0;
  double c_rest = 0.0;         // constant used for the verdict
  double fitted_c_rest = 0.0;  // minimal C_rest at the given C_growth
  double fitted_c_growth = 0.0;  // minimal C_growth with C_rest = 0 (infinite if impossible)
  double rest_unit = 0.0;      // rest bound with C = 1
  double slack_used = 0.0;     // max_t (LHS - RHS)_+ / RHS
  double slack_tol = 0.0;
  double max_lhs = 0.0;
  std::vector<double> lhs, rhs;
};

/// LHS(t) = RE(t) + DD(t) against RHS(t) = RE(0) + C_growth int_0^t RE + C_rest Rest_unit.
/// A negative c_rest uses the fitted minimal constant.
RelativeEnergyReport check_relative_energy_inequality(const EnergyLedger& ledger, double c_growth,
                                                      const RestBoundParams& rest, double c_rest = -1.0,
                                                      double slack_tol = 0.10);

struct SlipControlReport {
  double exponent = 0.0;         // 2 delta in 2D, 1/3 in 3D
  double slip_sq = 0.0;          // ||slip||^2_{L^2_t}
  double strain_sq = 0.0;        // ||D(w)||^2_{L^2_t L^2}
  double fluid_sq = 0.0;         // ||w||^2_{L^2_t L^2(F)} (2D only)
  double lhs = 0.0;              // |S^in|^exponent * slip_sq
  double constant = 0.0;         // lhs / (strain_sq + fluid_sq)
  double gronwall_bound = 0.0;   // (|S|^{-delta} (RE(0) + C_rest Rest)) e^{C_growth T}
  bool gronwall_holds = false;   // slip_sq <= gronwall_bound
};

SlipControlReport slip_control_check(const EnergyLedger& ledger, double area, int d = 2, double delta = 0.25,
                                     double c_growth = 0.0, double c_rest_times_rest = 0.0);

/// ||u||_{L^p} / (||grad u||_{L^2} + ||u||_{L^2(mask)}); 0 for u = 0.
double sobolev_ratio(const VectorField2D& u, const RegionMask& mask, double p);

/// Random band-limited vector field: sum of Fourier modes with |k| <= kmax.
VectorField2D random_band_limited_field(const Grid2D& grid, unsigned long long seed, int kmax = 4, int modes = 12);

struct SobolevStudyRow {
  double eps = 0.0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};
struct SobolevStudy {
  std::vector<SobolevStudyRow> rows;
  double constant = 0.0;  // max over all rows
  double spread = 0.0;    // max_ratio spread across eps: max/min - 1
};
SobolevStudy sobolev_study(const Grid2D& grid, const std::vector<double>& eps_list, int fields, double p,
                           unsigned long long seed, Vec2 center);

struct EnergyInequalityReport {
  bool pass = false;
  double max_violation = 0.0;  // max_t (E(t) + diss(t) - E(0)) / E(0)
  double tolerance = 0.0;
  double max_relative_gap = 0.0;  // max_t |E(t) + diss(t) - E(0)| / E(0)
};
/// E(t) + 4 nu int_0^t int |D(u)|^2 <= E(0) (1 + tol) at every sample.
EnergyInequalityReport energy_inequality_check(const EnergyLedger& ledger, double tol = 1e-6);

}  // namespace rigidlim
