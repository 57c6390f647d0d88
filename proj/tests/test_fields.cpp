#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "rigidlim/field_io.hpp"
#include "rigidlim/fields.hpp"
#include "rigidlim/spectral.hpp"

using namespace rigidlim;

namespace {

// Random band-limited streamfunction and its exact discrete perp-gradient:
// u = (psi(node above) - psi(node below)) / h is divergence free by construction.
VectorField2D discrete_curl_of_random_psi(const Grid2D& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> a(0.0, 1.0);
  double c[5][5];
  for (auto& row : c)
    for (double& x : row) x = a(rng);
  auto psi = [&](double x, double y) {
    double s = 0.0;
    for (int kx = 0; kx < 5; ++kx)
      for (int ky = 0; ky < 5; ++ky) s += c[kx][ky] * std::sin(kx * x + 0.3) * std::cos(ky * y + 0.7);
    return s;
  };
  const double h = g.spacing();
  VectorField2D v(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      v.u(i, j) = (psi(i * h, (j + 1) * h) - psi(i * h, j * h)) / h;
      v.v(i, j) = -(psi((i + 1) * h, j * h) - psi(i * h, j * h)) / h;
    }
  return v;
}

double max_abs_tensor(const TensorField2D& t) {
  double m = 0.0;
  for (const auto* c : {&t.xx, &t.xy, &t.yx, &t.yy})
    for (double x : *c) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS_AS(Grid2D(8, 1.0), Error);
  CHECK_THROWS_AS(Grid2D(17, 1.0), Error);
  CHECK_THROWS_AS(Grid2D(16, -1.0), Error);
  const Grid2D g(16, 2.0);
  CHECK(g.spacing() == doctest::Approx(0.125));
  CHECK(g.wrap(-1) == 15);
  const Vec2 w = g.wrap(Vec2{-0.25, 2.5});
  CHECK(w.x == doctest::Approx(1.75));
  CHECK(w.y == doctest::Approx(0.5));
  const Vec2 d = g.min_image(Vec2{1.9, -1.2});
  CHECK(d.x == doctest::Approx(-0.1));
  CHECK(d.y == doctest::Approx(0.8));
}

TEST_CASE("cross-grid operations are rejected") {
  VectorField2D a(Grid2D(16, 1.0)), b(Grid2D(32, 1.0));
  CHECK_THROWS_AS(a += b, Error);
  CHECK_THROWS_AS(a - b, Error);
}

TEST_CASE("divergence") {
  const Grid2D g(64, 2 * kPi);
  SUBCASE("constant field has zero divergence") {
    CHECK(max_abs(divergence(VectorField2D(g, {1.3, -0.4}))) == 0.0);
  }
  SUBCASE("second-order accurate on sin x") {
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
      const Grid2D gn(n, 2 * kPi);
      const ScalarField2D d = divergence(VectorField2D::sample(gn, [](Vec2 x) { return Vec2{std::sin(x.x), 0.0}; }));
      double err = 0.0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(d(i, j) - std::cos(gn.center(i, j).x)));
      if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.05));
      prev = err;
    }
  }
  SUBCASE("discrete perp-gradient is solenoidal to round-off") {
    const VectorField2D v = discrete_curl_of_random_psi(g, 7);
    CHECK(max_abs(divergence(v)) * g.spacing() <= 1e-10 * max_abs(v));
  }
}

TEST_CASE("symmetric gradient") {
  const Grid2D g(64, 2 * kPi);
  SUBCASE("constant field") { CHECK(max_abs_tensor(symmetric_gradient(VectorField2D(g, {2.0, 1.0}))) == 0.0); }
  SUBCASE("rigid rotation has zero strain") {
    const Vec2 c{kPi, kPi};
    // Rotation about a point well inside the box; the periodic seam is excluded.
    const VectorField2D v = VectorField2D::sample(g, [&](Vec2 x) { return Vec2{0.5, -0.2} + perp(x - c); });
    const TensorField2D d = symmetric_gradient(v);
    double m = 0.0;
    for (int j = 2; j < g.n() - 2; ++j)
      for (int i = 2; i < g.n() - 2; ++i) {
        const std::size_t k = g.index(i, j);
        m = std::max({m, std::abs(d.xx[k]), std::abs(d.xy[k]), std::abs(d.yy[k])});
      }
    CHECK(m <= 1e-10);
  }
  SUBCASE("shear component of (sin y, 0)") {
    double prev = 0.0;
    for (int n : {32, 64, 128}) {
      const Grid2D gn(n, 2 * kPi);
      const TensorField2D d = symmetric_gradient(VectorField2D::sample(gn, [](Vec2 x) { return Vec2{std::sin(x.y), 0.0}; }));
      double err = 0.0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) err = std::max(err, std::abs(d.xy[gn.index(i, j)] - 0.5 * std::cos(gn.center(i, j).y)));
      if (prev > 0.0) CHECK(prev / err > 3.5);
      prev = err;
    }
  }
}

TEST_CASE("operators are linear") {
  const Grid2D g(32, 2 * kPi);
  const VectorField2D f = discrete_curl_of_random_psi(g, 1) + VectorField2D::sample(g, [](Vec2 x) {
                            return Vec2{std::cos(2 * x.y), std::sin(x.x + x.y)};
                          });
  const VectorField2D h = discrete_curl_of_random_psi(g, 2);
  const double a = 1.7, b = -0.6;
  const VectorField2D comb = a * f + b * h;
  const ScalarField2D lhs = divergence(comb);
  ScalarField2D rhs = divergence(f);
  rhs *= a;
  ScalarField2D dh = divergence(h);
  dh *= b;
  rhs += dh;
  double err = 0.0;
  for (std::size_t k = 0; k < lhs.data().size(); ++k) err = std::max(err, std::abs(lhs.data()[k] - rhs.data()[k]));
  CHECK(err <= 1e-12 * std::max(1.0, max_abs(lhs)));

  const TensorField2D sl = symmetric_gradient(comb), sf = symmetric_gradient(f), sh = symmetric_gradient(h);
  double terr = 0.0;
  for (std::size_t k = 0; k < sl.xy.size(); ++k) terr = std::max(terr, std::abs(sl.xy[k] - (a * sf.xy[k] + b * sh.xy[k])));
  CHECK(terr <= 1e-12 * std::max(1.0, max_abs_tensor(sl)));
}

TEST_CASE("lp norms") {
  SUBCASE("zero field") { CHECK(lp_norm(ScalarField2D(Grid2D(16, 1.0)), 2.0) == 0.0); }
  SUBCASE("unit field on a box of side 2") { CHECK(lp_norm(ScalarField2D(Grid2D(16, 2.0), 1.0), 2.0) == doctest::Approx(2.0)); }
  SUBCASE("sin x on the 2 pi box") {
    const Grid2D g(128, 2 * kPi);
    ScalarField2D f(g);
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) f(i, j) = std::sin(g.center(i, j).x);
    // int_0^{2pi} int_0^{2pi} sin^2 x = 2 pi^2.
    CHECK(lp_norm(f, 2.0) == doctest::Approx(std::sqrt(2.0) * kPi).epsilon(1e-3));
  }
  SUBCASE("monotone in the mask") {
    const Grid2D g(64, 2 * kPi);
    ScalarField2D f(g);
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) f(i, j) = std::cos(g.center(i, j).x) + 0.3;
    const RegionMask small = RegionMask::disk(g, {3.0, 3.0}, 0.5), big = RegionMask::disk(g, {3.0, 3.0}, 1.5);
    CHECK(lp_norm(f, 3.0, &small) <= lp_norm(f, 3.0, &big));
    CHECK(lp_norm(f, 3.0, &big) <= lp_norm(f, 3.0));
  }
  SUBCASE("p below one is rejected") { CHECK_THROWS_AS(lp_norm(ScalarField2D(Grid2D(16, 1.0)), 0.5), Error); }
}

TEST_CASE("lp norms approach the maximum as p grows") {
  // Unit box, so ||f||_p <= ||f||_inf; a broad maximum makes p = 64 within 1%.
  const Grid2D g(128, 1.0);
  ScalarField2D f(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const Vec2 x = g.center(i, j);
      f(i, j) = 1.0 - 0.5 * std::exp(-((x.x - 0.5) * (x.x - 0.5) + (x.y - 0.5) * (x.y - 0.5)) / 0.01);
    }
  const double inf = lp_norm(f, INFINITY);
  double prev = 0.0;
  for (double p : {2.0, 4.0, 16.0, 64.0}) {
    const double v = lp_norm(f, p);
    CHECK(v > prev);
    CHECK(v <= inf);
    prev = v;
  }
  CHECK(lp_norm(f, 64.0) / inf == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("region masks") {
  const Grid2D g(128, 2 * kPi);
  const RegionMask d = RegionMask::disk(g, {1.0, 1.0}, 0.5);
  CHECK(d.area() == doctest::Approx(kPi * 0.25).epsilon(2e-3));
  for (double x : d.data()) CHECK((x >= 0.0 && x <= 1.0));
  const RegionMask c = RegionMask::disk_complement(g, {1.0, 1.0}, 0.5);
  CHECK(c.area() + d.area() == doctest::Approx(4 * kPi * kPi));
  // A disk straddling the periodic seam keeps its area.
  CHECK(RegionMask::disk(g, {0.05, 6.2}, 0.5).area() == doctest::Approx(d.area()).epsilon(1e-3));
}

TEST_CASE("interpolation") {
  const Grid2D g(32, 2 * kPi);
  SUBCASE("constant") {
    const Vec2 v = interpolate(VectorField2D(g, {1.5, -2.0}), {4.1, 0.3});
    CHECK(v.x == doctest::Approx(1.5));
    CHECK(v.y == doctest::Approx(-2.0));
  }
  SUBCASE("exact on linear fields away from the seam") {
    const Grid2D unit(32, 1.0);
    const VectorField2D lin = VectorField2D::sample(unit, [](Vec2 x) { return Vec2{x.x, -x.y}; });
    const Vec2 v = interpolate(lin, {0.3, 0.4});
    CHECK(std::abs(v.x - 0.3) <= 1e-12);
    CHECK(std::abs(v.y + 0.4) <= 1e-12);
  }
  SUBCASE("Taylor-Green field, second order") {
    auto tg = [](Vec2 x) { return Vec2{std::sin(x.x) * std::cos(x.y), -std::cos(x.x) * std::sin(x.y)}; };
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(0.0, 2 * kPi);
    double e1 = 0.0, e2 = 0.0;
    const VectorField2D a = VectorField2D::sample(Grid2D(32, 2 * kPi), tg);
    const VectorField2D b = VectorField2D::sample(Grid2D(64, 2 * kPi), tg);
    for (int k = 0; k < 100; ++k) {
      const Vec2 p{U(rng), U(rng)};
      e1 = std::max(e1, norm(interpolate(a, p) - tg(p)));
      e2 = std::max(e2, norm(interpolate(b, p) - tg(p)));
    }
    CHECK(e1 < 0.01);
    CHECK(e1 / e2 > 3.0);
  }
}

TEST_CASE("Leray projection") {
  const Grid2D g(64, 2 * kPi);
  const VectorField2D v = VectorField2D::sample(g, [](Vec2 x) {
    return Vec2{std::sin(x.x) + 0.3 * std::cos(2 * x.y), std::cos(x.x) * std::sin(3 * x.y)};
  });
  const VectorField2D p = leray_project(v);
  CHECK(max_abs(divergence(p)) * g.spacing() <= 1e-10 * max_abs(p));
  const VectorField2D pp = leray_project(p);
  CHECK(max_abs(pp - p) <= 1e-10 * max_abs(v));
  SUBCASE("solenoidal input is a fixed point") {
    const VectorField2D s = discrete_curl_of_random_psi(g, 5);
    CHECK(max_abs(leray_project(s) - s) <= 1e-10 * max_abs(s));
  }
  SUBCASE("gradient input is removed") {
    ScalarField2D phi(g);
    for (int j = 0; j < g.n(); ++j)
      for (int i = 0; i < g.n(); ++i) phi(i, j) = std::sin(g.center(i, j).x + 2 * g.center(i, j).y);
    CHECK(max_abs(leray_project(gradient(phi))) <= 1e-10);
  }
}

TEST_CASE("spectral diffusion and Poisson") {
  const Grid2D g(32, 2 * kPi);
  SpectralOps ops(g);
  ScalarField2D rhs(g);
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) rhs(i, j) = std::cos(g.center(i, j).x) * std::sin(2 * g.center(i, j).y);
  const ScalarField2D phi = ops.solve_poisson(rhs);
  const ScalarField2D back = laplacian(phi);
  double err = 0.0;
  for (std::size_t k = 0; k < back.data().size(); ++k) err = std::max(err, std::abs(back.data()[k] - rhs.data()[k]));
  CHECK(err <= 1e-12);
  VectorField2D v(g, {1.0, 2.0});
  ops.diffuse(v, 0.3);
  CHECK(max_abs(v - VectorField2D(g, {1.0, 2.0})) <= 1e-13);
}

TEST_CASE("strain energy equals half the Dirichlet energy for solenoidal fields") {
  const Grid2D g(64, 2 * kPi);
  const VectorField2D v = discrete_curl_of_random_psi(g, 11);
  double dir = 0.0;
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i)
      for (int c = 0; c < 2; ++c) {
        const auto& d = v.component(c);
        const double x = d[g.index(i, j)];
        const double dx = d[g.wrapped_index(i + 1, j)] - x, dy = d[g.wrapped_index(i, j + 1)] - x;
        dir += dx * dx + dy * dy;
      }
  // sum (dx / h)^2 h^2 = sum dx^2: the face-difference Dirichlet energy.
  CHECK(2.0 * strain_energy(v) == doctest::Approx(dir).epsilon(1e-10));
}

TEST_CASE("field dumps round-trip") {
  const Grid2D g(16, 3.0);
  const VectorField2D v = VectorField2D::sample(g, [](Vec2 x) { return Vec2{x.x * x.y, std::sin(x.x)}; });
  const auto path = (std::filesystem::temp_directory_path() / "rigidlim_dump_test.bin").string();
  write_field_dump(path, v);
  const FieldDump d = read_field_dump(path);
  CHECK(d.n == 16);
  CHECK(d.side == 3.0);
  REQUIRE(d.components.size() == 2);
  CHECK(d.components[0] == v.u_data());
  CHECK(d.components[1] == v.v_data());
  std::filesystem::remove(path);
}
