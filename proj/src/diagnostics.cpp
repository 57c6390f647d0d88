#include "rigidlim/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace rigidlim {

namespace {

// Face-difference Dirichlet energy int |grad v|^2.
double dirichlet_energy(const VectorField2D& v) {
  const Grid2D& g = v.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double ux = (v.uw(i + 1, j) - v.u(i, j)) * inv_h, uy = (v.uw(i, j + 1) - v.u(i, j)) * inv_h;
      const double vx = (v.vw(i + 1, j) - v.v(i, j)) * inv_h, vy = (v.vw(i, j + 1) - v.v(i, j)) * inv_h;
      s += ux * ux + uy * uy + vx * vx + vy * vy;
    }
  return s * g.cell_area();
}

// int (1 - chi) |a|^2 over faces.
double fluid_energy(const FsiState& s, const VectorField2D& a) {
  double acc = 0.0;
  const auto& au = a.u_data();
  const auto& av = a.v_data();
  for (std::size_t k = 0; k < au.size(); ++k)
    acc += (1.0 - s.xface_mask[k]) * au[k] * au[k] + (1.0 - s.yface_mask[k]) * av[k] * av[k];
  return acc * a.grid().cell_area();
}

}  // namespace

VectorField2D sample_background(const BackgroundSolution& bg, const Grid2D& grid, double t) {
  return VectorField2D::sample(grid, [&](Vec2 x) { return bg.velocity(t, x); });
}

RestrictionResult restricted_background(const FsiState& s, const BackgroundSolution& bg, double eps,
                                        const RestrictionOptions& opts) {
  return restrict_field(sample_background(bg, s.u.grid(), s.t), eps, s.body.position, opts);
}

double weighted_energy(const FsiState& s, const VectorField2D& a) {
  require_same_grid(s.u.grid(), a.grid());
  const double excess = s.body.radius > 0.0 ? s.body.density - 1.0 : 0.0;
  double acc = 0.0;
  const auto& au = a.u_data();
  const auto& av = a.v_data();
  for (std::size_t k = 0; k < au.size(); ++k)
    acc += (1.0 + excess * s.xface_mask[k]) * au[k] * au[k] + (1.0 + excess * s.yface_mask[k]) * av[k] * av[k];
  return acc * a.grid().cell_area();
}

double relative_energy(const FsiState& s, const BackgroundSolution& bg, double eps, const RestrictionOptions& opts) {
  const RestrictionResult r = restricted_background(s, bg, eps, opts);
  return weighted_energy(s, s.u - r.field);
}

double dissipation_distance(const FsiState& s, const BackgroundSolution& bg, double eps, double viscosity,
                            const RestrictionOptions& opts) {
  const RestrictionResult r = restricted_background(s, bg, eps, opts);
  return 4.0 * viscosity * strain_energy(s.u - r.field);
}

// ---- EnergyLedger ----------------------------------------------------

bool EnergyLedger::complete() const {
  if (samples.size() < 2) return false;
  const double tol = 1e-9 * std::max(1.0, final_time);
  return std::abs(samples.front().t) <= tol && std::abs(samples.back().t - final_time) <= tol;
}

double EnergyLedger::slip_l2() const { return samples.empty() ? 0.0 : std::sqrt(samples.back().slip_sq_integral); }

void EnergyLedger::append(LedgerSample row) {
  if (!samples.empty()) {
    const LedgerSample& p = samples.back();
    if (!(row.t > p.t)) throw Error("EnergyLedger: sample times must increase");
    const double dt = row.t - p.t;
    auto trap = [dt](double a, double b) { return 0.5 * dt * (a + b); };
    const double rate_now = 4.0 * viscosity * row.strain, rate_prev = 4.0 * viscosity * p.strain;
    row.dissipation_distance = p.dissipation_distance + trap(rate_prev, rate_now);
    row.rel_energy_integral = p.rel_energy_integral + trap(p.rel_energy, row.rel_energy);
    row.energy_dissipation = p.energy_dissipation + trap(p.energy_dissipation_rate, row.energy_dissipation_rate);
    row.slip_sq_integral = p.slip_sq_integral + trap(p.slip * p.slip, row.slip * row.slip);
    row.strain_integral = p.strain_integral + trap(p.strain, row.strain);
    row.fluid_rel_integral = p.fluid_rel_integral + trap(p.rel_energy_fluid, row.rel_energy_fluid);
  }
  samples.push_back(row);
}

LedgerRecorder::LedgerRecorder(const BackgroundSolution& bg, const SimConfig& cfg) : bg_(bg) {
  opts_.min_resolution = cfg.min_restriction_resolution;
  ledger_.eps = cfg.restriction_scale();
  ledger_.radius = cfg.has_body ? cfg.radius : 0.0;
  ledger_.density = cfg.density;
  ledger_.viscosity = cfg.viscosity;
  ledger_.final_time = cfg.final_time;
}

void LedgerRecorder::operator()(const FsiState& s) {
  LedgerSample row;
  row.t = s.t;
  row.position = s.body.position;
  row.angle = s.body.angle;
  row.velocity = s.body.velocity;
  row.angular_velocity = s.body.angular_velocity;
  row.background_at_body = bg_.velocity(s.t, s.body.position);
  row.slip = norm(row.velocity - row.background_at_body);
  row.energy = s.energy();
  row.energy_dissipation_rate = 4.0 * ledger_.viscosity * strain_energy(s.u);
  if (s.body.radius > 0.0) {
    const RestrictionResult r = restricted_background(s, bg_, ledger_.eps, opts_);
    const VectorField2D w = s.u - r.field;
    row.rel_energy = weighted_energy(s, w);
    row.rel_energy_fluid = fluid_energy(s, w);
    row.strain = strain_energy(w);
    row.rigidity_residual = rigidity_residual(s);
  } else {
    const VectorField2D w = s.u - sample_background(bg_, s.u.grid(), s.t);
    row.rel_energy = face_energy(w);
    row.rel_energy_fluid = row.rel_energy;
    row.strain = strain_energy(w);
  }
  ledger_.append(row);
}

// ---- Rest bound ------------------------------------------------------

RestBoundTerms rest_bound_terms(const RestBoundParams& p) {
  if (p.d != 2 && p.d != 3) throw Error("rest_bound: dimension must be 2 or 3");
  if (!(p.eps > 0.0)) throw Error("rest_bound: eps must be positive");
  if (p.mass < 0.0 || !(p.area > 0.0)) throw Error("rest_bound: mass must be nonnegative and area positive");
  if (p.C < 0.0) throw Error("rest_bound: calibration constant must be nonnegative");
  const double s_in = p.initial_area > 0.0 ? p.initial_area : p.area;
  RestBoundTerms t;
  t.mass = p.mass;
  t.area = p.area;
  if (p.d == 3) {
    t.eps_power = std::pow(p.eps, 1.5);
    t.cross = std::pow(p.eps, 3.0) * std::pow(s_in, -1.0 / 3.0);
  } else {
    if (!(p.delta > 0.0) || !(p.delta_tilde > 0.0 && p.delta_tilde < 1.0))
      throw Error("rest_bound: d = 2 needs delta > 0 and 0 < delta_tilde < 1");
    t.eps_power = std::pow(p.eps, p.delta_tilde);
    t.cross = std::pow(p.eps, 1.0 + p.delta_tilde) * std::pow(s_in, -p.delta);
  }
  t.total = p.C * (t.mass + t.area + t.eps_power + t.cross);
  return t;
}

double rest_bound(const RestBoundParams& p) { return rest_bound_terms(p).total; }

// ---- Checks ----------------------------------------------------------

RelativeEnergyReport check_relative_energy_inequality(const EnergyLedger& ledger, double c_growth,
                                                      const RestBoundParams& rest, double c_rest, double slack_tol) {
  if (!ledger.complete()) throw Error("relative energy check: ledger is incomplete");
  if (c_growth < 0.0) throw Error("relative energy check: growth constant must be nonnegative");
  RelativeEnergyReport rep;
  rep.c_growth = c_growth;
  rep.slack_tol = slack_tol;
  RestBoundParams unit = rest;
  unit.C = 1.0;
  rep.rest_unit = rest_bound(unit);
  const double re0 = ledger.initial_rel_energy();

  double need_rest = 0.0, need_growth = 0.0;
  for (const LedgerSample& s : ledger.samples) {
    const double lhs = s.rel_energy + s.dissipation_distance;
    rep.max_lhs = std::max(rep.max_lhs, lhs);
    need_rest = std::max(need_rest, (lhs - re0 - c_growth * s.rel_energy_integral) / rep.rest_unit);
    const double excess = lhs - re0;
    if (excess > 0.0)
      need_growth = s.rel_energy_integral > 0.0 ? std::max(need_growth, excess / s.rel_energy_integral)
                                                : std::numeric_limits<double>::infinity();
  }
  rep.fitted_c_rest = need_rest;
  rep.fitted_c_growth = need_growth;
  rep.c_rest = c_rest < 0.0 ? need_rest : c_rest;

  for (const LedgerSample& s : ledger.samples) {
    const double lhs = s.rel_energy + s.dissipation_distance;
    const double rhs = re0 + c_growth * s.rel_energy_integral + rep.c_rest * rep.rest_unit;
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    if (lhs > rhs) rep.slack_used = std::max(rep.slack_used, rhs > 0.0 ? (lhs - rhs) / rhs : std::numeric_limits<double>::infinity());
  }
  rep.pass = rep.slack_used <= slack_tol;
  return rep;
}

SlipControlReport slip_control_check(const EnergyLedger& ledger, double area, int d, double delta, double c_growth,
                                     double c_rest_times_rest) {
  if (!ledger.complete()) throw Error("slip control check: ledger is incomplete");
  if (!(area > 0.0)) throw Error("slip control check: body area must be positive");
  SlipControlReport rep;
  const LedgerSample& last = ledger.samples.back();
  rep.exponent = d == 3 ? 1.0 / 3.0 : 2.0 * delta;
  rep.slip_sq = last.slip_sq_integral;
  rep.strain_sq = last.strain_integral;
  rep.fluid_sq = d == 2 ? last.fluid_rel_integral : 0.0;
  rep.lhs = std::pow(area, rep.exponent) * rep.slip_sq;
  const double denom = rep.strain_sq + rep.fluid_sq;
  rep.constant = denom > 0.0 ? rep.lhs / denom : 0.0;
  const double weight = std::pow(area, -(d == 3 ? 1.0 / 3.0 : delta));
  rep.gronwall_bound = weight * (ledger.initial_rel_energy() + c_rest_times_rest) * std::exp(c_growth * ledger.final_time);
  rep.gronwall_holds = rep.slip_sq <= rep.gronwall_bound;
  return rep;
}

double sobolev_ratio(const VectorField2D& u, const RegionMask& mask, double p) {
  if (!(p >= 2.0 && p <= 64.0)) throw Error("sobolev_ratio: p must lie in [2, 64]");
  require_same_grid(u.grid(), mask.grid());
  const double num = lp_norm(u, p);
  if (num == 0.0) return 0.0;
  const double den = std::sqrt(dirichlet_energy(u)) + lp_norm(u, 2.0, &mask);
  if (den == 0.0) throw Error("sobolev_ratio: zero denominator for a nonzero field");
  return num / den;
}

VectorField2D random_band_limited_field(const Grid2D& grid, unsigned long long seed, int kmax, int modes) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> kd(-kmax, kmax);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  struct Mode {
    double kx, ky, ax, ay, px, py;
  };
  std::vector<Mode> ms;
  const double base = 2.0 * kPi / grid.side();
  while (static_cast<int>(ms.size()) < modes) {
    const int kx = kd(rng), ky = kd(rng);
    if (kx * kx + ky * ky > kmax * kmax) continue;
    ms.push_back({base * kx, base * ky, amp(rng), amp(rng), phase(rng), phase(rng)});
  }
  return VectorField2D::sample(grid, [&](Vec2 x) {
    Vec2 v{};
    for (const Mode& m : ms) {
      const double arg = m.kx * x.x + m.ky * x.y;
      v.x += m.ax * std::cos(arg + m.px);
      v.y += m.ay * std::cos(arg + m.py);
    }
    return v;
  });
}

SobolevStudy sobolev_study(const Grid2D& grid, const std::vector<double>& eps_list, int fields, double p,
                           unsigned long long seed, Vec2 center) {
  if (fields < 1) throw Error("sobolev_study: need at least one field");
  std::vector<VectorField2D> us;
  us.reserve(static_cast<std::size_t>(fields));
  for (int f = 0; f < fields; ++f) us.push_back(random_band_limited_field(grid, seed + static_cast<unsigned long long>(f)));
  SobolevStudy st;
  for (double eps : eps_list) {
    const RegionMask fluid = RegionMask::disk_complement(grid, center, eps);
    SobolevStudyRow row{eps, 0.0, std::numeric_limits<double>::infinity()};
    for (const auto& u : us) {
      const double r = sobolev_ratio(u, fluid, p);
      row.max_ratio = std::max(row.max_ratio, r);
      row.min_ratio = std::min(row.min_ratio, r);
    }
    st.rows.push_back(row);
    st.constant = std::max(st.constant, row.max_ratio);
  }
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& r : st.rows) lo = std::min(lo, r.max_ratio);
  st.spread = lo > 0.0 ? st.constant / lo - 1.0 : 0.0;
  return st;
}

EnergyInequalityReport energy_inequality_check(const EnergyLedger& ledger, double tol) {
  EnergyInequalityReport rep;
  rep.tolerance = tol;
  if (ledger.samples.empty()) {
    rep.pass = true;
    return rep;
  }
  const double e0 = ledger.samples.front().energy;
  for (const LedgerSample& s : ledger.samples) {
    const double total = s.energy + s.energy_dissipation;
    if (e0 > 0.0) {
      rep.max_violation = std::max(rep.max_violation, (total - e0) / e0);
      rep.max_relative_gap = std::max(rep.max_relative_gap, std::abs(total - e0) / e0);
    } else if (total > 0.0) {
      rep.max_violation = std::numeric_limits<double>::infinity();
    }
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

}  // namespace rigidlim
