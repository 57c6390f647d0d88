#include "rigidlim/background.hpp"

#include <algorithm>
#include <cmath>

namespace rigidlim {

BackgroundSolution taylor_green(double nu) {
  if (!(nu > 0.0)) throw Error("taylor_green: viscosity must be positive");
  BackgroundSolution bg;
  bg.name = "taylor_green";
  bg.viscosity = nu;
  bg.box_side = 2.0 * kPi;
  bg.velocity = [nu](double t, Vec2 x) {
    const double a = std::exp(-2.0 * nu * t);
    return Vec2{a * std::sin(x.x) * std::cos(x.y), -a * std::cos(x.x) * std::sin(x.y)};
  };
  bg.pressure = [nu](double t, Vec2 x) {
    return 0.25 * (std::cos(2.0 * x.x) + std::cos(2.0 * x.y)) * std::exp(-4.0 * nu * t);
  };
  bg.velocity_gradient = [nu](double t, Vec2 x) {
    const double a = std::exp(-2.0 * nu * t);
    const double cx = std::cos(x.x), sx = std::sin(x.x), cy = std::cos(x.y), sy = std::sin(x.y);
    return std::array<double, 4>{a * cx * cy, -a * sx * sy, a * sx * sy, -a * cx * cy};
  };
  bg.kinetic_energy = [nu](double t) { return kPi * kPi * std::exp(-4.0 * nu * t); };
  bg.max_gradient = 1.0;
  return bg;
}

BackgroundSolution uniform_flow(Vec2 U, double nu, double box_side) {
  BackgroundSolution bg;
  bg.name = "uniform";
  bg.viscosity = nu;
  bg.box_side = box_side;
  bg.velocity = [U](double, Vec2) { return U; };
  bg.pressure = [](double, Vec2) { return 0.0; };
  bg.velocity_gradient = [](double, Vec2) { return std::array<double, 4>{0.0, 0.0, 0.0, 0.0}; };
  bg.kinetic_energy = [U, box_side](double) { return 0.5 * dot(U, U) * box_side * box_side; };
  bg.max_gradient = 0.0;
  return bg;
}

BackgroundSolution make_background(const std::string& name, double nu, Vec2 U) {
  if (name == "taylor_green") return taylor_green(nu);
  if (name == "uniform") return uniform_flow(U, nu);
  throw Error("unknown background '" + name + "'");
}

Vec2 momentum_residual(const BackgroundSolution& bg, double t, Vec2 x, double fd) {
  // Fourth-order centered differences.
  auto d1 = [fd](auto f, double s) { return (-f(s + 2 * fd) + 8 * f(s + fd) - 8 * f(s - fd) + f(s - 2 * fd)) / (12 * fd); };
  auto d2 = [fd](auto f, double s) {
    return (-f(s + 2 * fd) + 16 * f(s + fd) - 30 * f(s) + 16 * f(s - fd) - f(s - 2 * fd)) / (12 * fd * fd);
  };
  const Vec2 u = bg.velocity(t, x);
  Vec2 r{};
  for (int c = 0; c < 2; ++c) {
    auto comp = [&](double tt, Vec2 p) { return c == 0 ? bg.velocity(tt, p).x : bg.velocity(tt, p).y; };
    const double dt = d1([&](double s) { return comp(s, x); }, t);
    const double dx = d1([&](double s) { return comp(t, {s, x.y}); }, x.x);
    const double dy = d1([&](double s) { return comp(t, {x.x, s}); }, x.y);
    const double lap = d2([&](double s) { return comp(t, {s, x.y}); }, x.x) + d2([&](double s) { return comp(t, {x.x, s}); }, x.y);
    const double dp = c == 0 ? d1([&](double s) { return bg.pressure(t, {s, x.y}); }, x.x)
                             : d1([&](double s) { return bg.pressure(t, {x.x, s}); }, x.y);
    const double val = dt + u.x * dx + u.y * dy - bg.viscosity * lap + dp;
    (c == 0 ? r.x : r.y) = val;
  }
  return r;
}

TracerTrajectory tracer_trajectory(const BackgroundSolution& bg, Vec2 h0, double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw Error("tracer_trajectory: T and dt must be positive");
  TracerTrajectory tr;
  const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  tr.t.reserve(steps + 1);
  Vec2 h = h0;
  double t = 0.0;
  tr.t.push_back(t);
  tr.position.push_back(h);
  tr.velocity.push_back(bg.velocity(t, h));
  for (long n = 0; n < steps; ++n) {
    const double tn = std::min(T, (n + 1) * dt);
    const double k = tn - t;
    const Vec2 k1 = bg.velocity(t, h);
    const Vec2 k2 = bg.velocity(t + 0.5 * k, h + (0.5 * k) * k1);
    const Vec2 k3 = bg.velocity(t + 0.5 * k, h + (0.5 * k) * k2);
    const Vec2 k4 = bg.velocity(t + k, h + k * k3);
    h = h + (k / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = tn;
    tr.t.push_back(t);
    tr.position.push_back(h);
    tr.velocity.push_back(bg.velocity(t, h));
  }
  return tr;
}

Vec2 trajectory_at(const TracerTrajectory& tr, double t) {
  if (tr.t.empty()) throw Error("trajectory_at: empty trajectory");
  if (t <= tr.t.front()) return tr.position.front();
  if (t >= tr.t.back()) return tr.position.back();
  const auto it = std::upper_bound(tr.t.begin(), tr.t.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - tr.t.begin()) - 1;
  const double dt = tr.t[k + 1] - tr.t[k];
  const double s = (t - tr.t[k]) / dt;
  const double h00 = 2 * s * s * s - 3 * s * s + 1, h10 = s * s * s - 2 * s * s + s;
  const double h01 = -2 * s * s * s + 3 * s * s, h11 = s * s * s - s * s;
  return h00 * tr.position[k] + (h10 * dt) * tr.velocity[k] + h01 * tr.position[k + 1] + (h11 * dt) * tr.velocity[k + 1];
}

}  // namespace rigidlim
