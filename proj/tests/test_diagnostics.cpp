#include <cmath>

#include "doctest.h"
#include "rigidlim/diagnostics.hpp"

using namespace rigidlim;

namespace {

SimConfig diag_config() {
  SimConfig c;
  c.n = 128;
  c.viscosity = 0.01;
  c.final_time = 0.1;
  c.radius = 0.5;
  c.density = 3.0;
  c.position = {2.2, 1.9};
  c.sample_every = 1;
  return c;
}

RestrictionOptions diag_opts() {
  RestrictionOptions o;
  o.min_resolution = 4.0;
  return o;
}

// Ledger with prescribed rates at t = 0, 0.5, 1.
EnergyLedger synthetic_ledger(const std::vector<double>& rel, const std::vector<double>& strain, double nu = 0.25) {
  EnergyLedger L;
  L.eps = 0.1;
  L.radius = 0.1;
  L.density = 2.0;
  L.viscosity = nu;
  L.final_time = 1.0;
  for (std::size_t k = 0; k < rel.size(); ++k) {
    LedgerSample s;
    s.t = 0.5 * static_cast<double>(k);
    s.rel_energy = rel[k];
    s.rel_energy_fluid = 0.5 * rel[k];
    s.strain = strain[k];
    s.energy = 1.0;
    s.slip = 0.1 * static_cast<double>(k);
    L.append(s);
  }
  return L;
}

}  // namespace

TEST_CASE("relative energy vanishes for the restricted initial state") {
  const SimConfig c = diag_config();
  const BackgroundSolution bg = taylor_green(c.viscosity);
  const FsiState s = initial_state(c, bg);
  CHECK(relative_energy(s, bg, c.radius, diag_opts()) <= 1e-24);
  CHECK(dissipation_distance(s, bg, c.radius, c.viscosity, diag_opts()) <= 1e-24);
}

TEST_CASE("relative energy of a constant offset") {
  SimConfig c = diag_config();
  c.density = 1.0;
  c.background = "uniform";
  c.initial = InitialField::Background;
  const BackgroundSolution bg = uniform_flow({0.3, 0.0}, c.viscosity);
  FsiState s = initial_state(c, bg);
  for (auto& x : s.u.u_data()) x += 0.2;
  const double L = c.side;
  CHECK(relative_energy(s, bg, c.radius, diag_opts()) == doctest::Approx(0.04 * L * L).epsilon(1e-10));
}

TEST_CASE("relative energy equals the expanded quadratic form") {
  const SimConfig c = diag_config();
  const BackgroundSolution bg = taylor_green(c.viscosity);
  FsiState s = initial_state(c, bg);
  FsiSolver solver(c, s, select_time_step(c, s));
  for (int k = 0; k < 5; ++k) solver.step();
  const FsiState& st = solver.state();
  const VectorField2D R = restricted_background(st, bg, c.radius, diag_opts()).field;
  // E(u) - 2 <u, R>_rho + E(R), with the face density written out.
  double cross = 0.0;
  const double ex = st.body.density - 1.0;
  for (std::size_t k = 0; k < R.u_data().size(); ++k)
    cross += (1.0 + ex * st.xface_mask[k]) * st.u.u_data()[k] * R.u_data()[k] +
             (1.0 + ex * st.yface_mask[k]) * st.u.v_data()[k] * R.v_data()[k];
  cross *= st.u.grid().cell_area();
  const double expanded = weighted_energy(st, st.u) - 2.0 * cross + weighted_energy(st, R);
  const double direct = relative_energy(st, bg, c.radius, diag_opts());
  CHECK(direct > 0.0);
  CHECK(std::abs(direct - expanded) <= 1e-8 * weighted_energy(st, st.u));
}

TEST_CASE("rigid motions have zero strain") {
  const Grid2D g(64, 2 * kPi);
  const VectorField2D u = VectorField2D::sample(g, [](Vec2) { return Vec2{0.3, -0.7}; });
  CHECK(strain_energy(u) == 0.0);
}

TEST_CASE("rest bound") {
  SUBCASE("three-dimensional example") {
    RestBoundParams p;
    p.d = 3;
    p.eps = 0.1;
    p.mass = 1e-4;
    p.area = 1e-3;
    const RestBoundTerms t = rest_bound_terms(p);
    CHECK(t.eps_power == doctest::Approx(std::pow(0.1, 1.5)));
    CHECK(t.cross == doctest::Approx(0.01));
    CHECK(t.total == doctest::Approx(1e-4 + 1e-3 + 0.0316227766 + 0.01).epsilon(1e-8));
    p.C = 2.0;
    CHECK(rest_bound(p) == doctest::Approx(2.0 * t.total));
  }
  SUBCASE("two-dimensional terms") {
    RestBoundParams p;
    p.eps = 0.04;
    p.mass = 0.01;
    p.area = 0.002;
    const RestBoundTerms t = rest_bound_terms(p);
    CHECK(t.eps_power == doctest::Approx(0.2));
    CHECK(t.cross == doctest::Approx(std::pow(0.04, 1.5) * std::pow(0.002, -0.25)));
  }
  SUBCASE("monotone in every argument") {
    RestBoundParams p;
    p.eps = 0.1;
    p.mass = 0.01;
    p.area = 0.01;
    const double b = rest_bound(p);
    RestBoundParams q = p;
    q.mass *= 2;
    CHECK(rest_bound(q) > b);
    q = p;
    q.eps *= 2;
    CHECK(rest_bound(q) > b);
    q = p;
    q.initial_area = 0.5 * p.area;
    CHECK(rest_bound(q) > b);
  }
  SUBCASE("invalid parameters") {
    RestBoundParams p;
    p.eps = 0.1;
    p.area = 0.01;
    RestBoundParams q = p;
    q.d = 4;
    CHECK_THROWS_AS(rest_bound(q), Error);
    q = p;
    q.eps = 0.0;
    CHECK_THROWS_AS(rest_bound(q), Error);
    q = p;
    q.area = 0.0;
    CHECK_THROWS_AS(rest_bound(q), Error);
    q = p;
    q.delta_tilde = 1.0;
    CHECK_THROWS_AS(rest_bound(q), Error);
  }
}

TEST_CASE("energy ledger cumulative columns") {
  const EnergyLedger L = synthetic_ledger({1.0, 2.0, 4.0}, {0.0, 2.0, 4.0});
  CHECK(L.complete());
  const LedgerSample& last = L.samples.back();
  CHECK(last.rel_energy_integral == doctest::Approx(0.25 * (1 + 2) + 0.25 * (2 + 4)));
  CHECK(last.strain_integral == doctest::Approx(0.25 * 2 + 0.25 * 6));
  CHECK(last.dissipation_distance == doctest::Approx(4 * 0.25 * last.strain_integral));
  CHECK(last.slip_sq_integral == doctest::Approx(0.25 * 0.01 + 0.25 * (0.01 + 0.04)));
  CHECK(L.slip_l2() == doctest::Approx(std::sqrt(last.slip_sq_integral)));
  for (std::size_t k = 1; k < L.samples.size(); ++k) {
    CHECK(L.samples[k].dissipation_distance >= L.samples[k - 1].dissipation_distance);
    CHECK(L.samples[k].rel_energy_integral >= L.samples[k - 1].rel_energy_integral);
  }
  EnergyLedger bad = L;
  LedgerSample s;
  s.t = 0.5;
  CHECK_THROWS_AS(bad.append(s), Error);
}

TEST_CASE("relative energy inequality checker") {
  RestBoundParams rest;
  rest.eps = 0.1;
  rest.mass = 0.01;
  rest.area = 0.03;
  SUBCASE("constant relative energy passes with no rest") {
    const EnergyLedger L = synthetic_ledger({1.0, 1.0, 1.0}, {0.0, 0.0, 0.0});
    const RelativeEnergyReport r = check_relative_energy_inequality(L, 0.0, rest, 0.0);
    CHECK(r.pass);
    CHECK(r.fitted_c_rest == 0.0);
    CHECK(r.slack_used == 0.0);
  }
  SUBCASE("growth is absorbed by the Gronwall term") {
    const EnergyLedger L = synthetic_ledger({1.0, 1.2, 1.5}, {0.0, 0.0, 0.0});
    CHECK(check_relative_energy_inequality(L, 2.0, rest, 0.0).pass);
    CHECK(check_relative_energy_inequality(L, 2.0, rest).fitted_c_rest == 0.0);
  }
  SUBCASE("doubled left-hand side fails") {
    const EnergyLedger L = synthetic_ledger({1.0, 2.0, 2.0}, {0.0, 0.0, 0.0});
    const RelativeEnergyReport r = check_relative_energy_inequality(L, 0.0, rest, 0.0);
    CHECK_FALSE(r.pass);
    CHECK(r.slack_used == doctest::Approx(1.0));
    // The fitted rest constant closes the gap exactly.
    const RelativeEnergyReport f = check_relative_energy_inequality(L, 0.0, rest);
    CHECK(f.pass);
    CHECK(f.fitted_c_rest * f.rest_unit == doctest::Approx(1.0));
    CHECK(f.fitted_c_growth == doctest::Approx(1.0 / 0.75));
  }
  SUBCASE("incomplete ledger is rejected") {
    EnergyLedger L = synthetic_ledger({1.0, 1.0}, {0.0, 0.0});
    CHECK_THROWS_AS(check_relative_energy_inequality(L, 0.0, rest), Error);
  }
}

TEST_CASE("slip control checker") {
  SUBCASE("zero slip") {
    EnergyLedger L = synthetic_ledger({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    for (auto& s : L.samples) s.slip = s.slip_sq_integral = 0.0;
    const SlipControlReport r = slip_control_check(L, 0.03);
    CHECK(r.constant == 0.0);
    CHECK(r.gronwall_holds);
  }
  SUBCASE("constant and exponent") {
    const EnergyLedger L = synthetic_ledger({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    const SlipControlReport r = slip_control_check(L, 0.04, 2, 0.25);
    CHECK(r.exponent == 0.5);
    CHECK(r.fluid_sq == doctest::Approx(0.5));
    CHECK(r.constant == doctest::Approx(0.2 * r.slip_sq / 1.5));
    const SlipControlReport r3 = slip_control_check(L, 0.04, 3);
    CHECK(r3.exponent == doctest::Approx(1.0 / 3.0));
    CHECK(r3.fluid_sq == 0.0);
  }
}

TEST_CASE("Sobolev ratio") {
  const Grid2D g(64, 2 * kPi);
  const RegionMask all(g, 1.0);
  CHECK(sobolev_ratio(VectorField2D(g), all, 4.0) == 0.0);
  const VectorField2D one = VectorField2D::sample(g, [](Vec2) { return Vec2{1.0, 0.0}; });
  const double A = 4 * kPi * kPi;
  CHECK(sobolev_ratio(one, all, 4.0) == doctest::Approx(std::pow(A, 0.25 - 0.5)));
  CHECK_THROWS_AS(sobolev_ratio(one, all, 1.0), Error);
  CHECK_THROWS_AS(sobolev_ratio(one, RegionMask(g, 0.0), 4.0), Error);
  const SobolevStudy st = sobolev_study(g, {0.8, 0.4}, 4, 4.0, 7, {kPi, kPi});
  CHECK(st.rows.size() == 2);
  for (const auto& r : st.rows) CHECK((r.min_ratio > 0.0 && r.min_ratio <= r.max_ratio));
  CHECK(st.spread >= 0.0);
}

TEST_CASE("energy inequality check") {
  SUBCASE("quiescent ledger") {
    EnergyLedger L;
    L.final_time = 1.0;
    for (double t : {0.0, 0.5, 1.0}) {
      LedgerSample s;
      s.t = t;
      L.append(s);
    }
    CHECK(energy_inequality_check(L).pass);
  }
  SUBCASE("simulated run satisfies it and a corrupted ledger fails") {
    const SimConfig c = diag_config();
    const BackgroundSolution bg = taylor_green(c.viscosity);
    LedgerRecorder rec(bg, c);
    run_simulation(c, bg, [&](const FsiState& s) { rec(s); });
    EnergyLedger L = rec.take();
    CHECK(L.complete());
    const EnergyInequalityReport ok = energy_inequality_check(L, 1e-6);
    MESSAGE("energy inequality violation: " << ok.max_violation);
    CHECK(ok.pass);
    L.samples.back().energy *= 1.01;
    CHECK_FALSE(energy_inequality_check(L, 1e-6).pass);
  }
}
