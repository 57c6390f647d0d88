#include <cmath>
#include <random>

#include "doctest.h"
#include "rigidlim/background.hpp"

using namespace rigidlim;

TEST_CASE("Taylor-Green is an exact solution") {
  const BackgroundSolution bg = taylor_green(0.01);
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> X(0.0, 2 * kPi), T(0.0, 2.0);
  for (int k = 0; k < 100; ++k) {
    const double t = T(rng);
    const Vec2 x{X(rng), X(rng)};
    const auto g = bg.velocity_gradient(t, x);
    CHECK(std::abs(g[0] + g[3]) <= 1e-14);
    CHECK(norm(momentum_residual(bg, t, x)) <= 1e-8);
  }
}

TEST_CASE("Taylor-Green closed forms") {
  const double nu = 0.01;
  const BackgroundSolution bg = taylor_green(nu);
  const Vec2 v = bg(0.5, {0.3, 1.1});
  CHECK(v.x == doctest::Approx(std::sin(0.3) * std::cos(1.1) * std::exp(-2 * nu * 0.5)));
  CHECK(v.y == doctest::Approx(-std::cos(0.3) * std::sin(1.1) * std::exp(-2 * nu * 0.5)));
  CHECK(bg.pressure(0.5, {0.3, 1.1}) ==
        doctest::Approx(0.25 * (std::cos(0.6) + std::cos(2.2)) * std::exp(-4 * nu * 0.5)));
  // (1/2) int |u|^2 by midpoint quadrature, compared with pi^2 e^{-4 nu t}.
  const int n = 200;
  const double h = 2 * kPi / n;
  double e = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Vec2 u = bg(1.0, {(i + 0.5) * h, (j + 0.5) * h});
      e += 0.5 * dot(u, u) * h * h;
    }
  CHECK(e == doctest::Approx(kPi * kPi * std::exp(-4 * nu)).epsilon(1e-10));
  CHECK(bg.kinetic_energy(1.0) == doctest::Approx(kPi * kPi * std::exp(-4 * nu)));
  CHECK_THROWS_AS(taylor_green(0.0), Error);
}

TEST_CASE("background registry") {
  CHECK(make_background("taylor_green", 0.01).name == "taylor_green");
  const BackgroundSolution u = make_background("uniform", 0.01, {0.5, -0.2});
  CHECK(u(3.0, {1.0, 2.0}).x == 0.5);
  CHECK(norm(momentum_residual(u, 0.3, {1.0, 1.0})) <= 1e-12);
  CHECK_THROWS_AS(make_background("couette", 0.01), Error);
}

TEST_CASE("tracer trajectories") {
  SUBCASE("zero flow keeps the start") {
    const TracerTrajectory tr = tracer_trajectory(uniform_flow({0.0, 0.0}, 0.01), {1.0, 2.0}, 1.0, 0.1);
    for (const Vec2& p : tr.position) CHECK(norm(p - Vec2{1.0, 2.0}) == 0.0);
  }
  SUBCASE("uniform flow translates") {
    const TracerTrajectory tr = tracer_trajectory(uniform_flow({1.0, 0.0}, 0.01), {1.0, 2.0}, 1.3, 0.1);
    CHECK(tr.t.back() == doctest::Approx(1.3));
    for (std::size_t k = 0; k < tr.t.size(); ++k) CHECK(norm(tr.position[k] - Vec2{1.0 + tr.t[k], 2.0}) <= 1e-13);
  }
  const BackgroundSolution bg = taylor_green(0.01);
  SUBCASE("stagnation point stays fixed") {
    const TracerTrajectory tr = tracer_trajectory(bg, {kPi / 2, kPi / 2}, 2.0, 1e-2);
    for (const Vec2& p : tr.position) CHECK(norm(p - Vec2{kPi / 2, kPi / 2}) <= 1e-10);
  }
  SUBCASE("refinement: invariance under halving and fourth order") {
    const Vec2 h0{kPi / 2 + 0.3, kPi / 2};
    const TracerTrajectory a = tracer_trajectory(bg, h0, 2.0, 4e-2), b = tracer_trajectory(bg, h0, 2.0, 2e-2),
                           c = tracer_trajectory(bg, h0, 2.0, 1e-2), d = tracer_trajectory(bg, h0, 2.0, 5e-3);
    auto sup = [](const TracerTrajectory& x, const TracerTrajectory& y) {
      double m = 0.0;
      for (double t = 0.0; t <= 2.0 + 1e-12; t += 0.04) m = std::max(m, norm(trajectory_at(x, t) - trajectory_at(y, t)));
      return m;
    };
    const double e1 = sup(a, b), e2 = sup(b, c);
    CHECK(std::log2(e1 / e2) >= 3.5);
    CHECK(sup(c, d) <= 1e-8);
  }
  SUBCASE("velocity column is the background along the path") {
    const TracerTrajectory tr = tracer_trajectory(bg, {2.0, 1.0}, 0.5, 0.05);
    for (std::size_t k = 0; k < tr.t.size(); ++k) CHECK(norm(tr.velocity[k] - bg(tr.t[k], tr.position[k])) <= 1e-15);
  }
  SUBCASE("invalid steps") {
    CHECK_THROWS_AS(tracer_trajectory(bg, {0, 0}, 1.0, 0.0), Error);
    CHECK_THROWS_AS(tracer_trajectory(bg, {0, 0}, -1.0, 0.1), Error);
  }
}
