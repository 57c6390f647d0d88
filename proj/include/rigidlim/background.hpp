#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "rigidlim/geometry.hpp"

namespace rigidlim {

/// Closed-form solution of the incompressible Navier-Stokes equations on a
/// periodic box. Velocity and pressure are evaluated pointwise.
struct BackgroundSolution {
  std::string name;
  double viscosity = 0.0;
  double box_side = 0.0;
  std::function<Vec2(double t, Vec2 x)> velocity;
  std::function<double(double t, Vec2 x)> pressure;
  /// Velocity gradient: {d_x u, d_y u, d_x v, d_y v}.
  std::function<std::array<double, 4>(double t, Vec2 x)> velocity_gradient;
  /// (1/2) int |u|^2 over the box, when known in closed form.
  std::function<double(double t)> kinetic_energy;
  /// sup_x |grad u(t, x)| (operator norm bound used for the growth constant).
  double max_gradient = 0.0;

  Vec2 operator()(double t, Vec2 x) const { return velocity(t, x); }
};

/// u = (sin x cos y, -cos x sin y) e^{-2 nu t}, p = (cos 2x + cos 2y) e^{-4 nu t} / 4, box 2 pi.
BackgroundSolution taylor_green(double nu);
/// Steady uniform flow u = U, p = 0 on a box of the given side.
BackgroundSolution uniform_flow(Vec2 U, double nu, double box_side = 2.0 * kPi);
/// Background by config name: "taylor_green" or "uniform" (uniform uses `U`).
BackgroundSolution make_background(const std::string& name, double nu, Vec2 U = {1.0, 0.0});

/// Residual of the momentum equation d_t u + (u . grad) u - nu lap u + grad p at (t, x),
/// from centered finite differences with step `fd` (fourth-order stencils).
Vec2 momentum_residual(const BackgroundSolution& bg, double t, Vec2 x, double fd = 1e-3);

struct TracerTrajectory {
  std::vector<double> t;
  std::vector<Vec2> position;  // unwrapped
  std::vector<Vec2> velocity;  // u(t, h(t))
};

/// Classical RK4 for h' = u(t, h) from h0 over [0, T] with step dt (the last
/// step is shortened to land on T).
TracerTrajectory tracer_trajectory(const BackgroundSolution& bg, Vec2 h0, double T, double dt);

/// Position at time t by cubic Hermite interpolation between samples.
Vec2 trajectory_at(const TracerTrajectory& tr, double t);

}  // namespace rigidlim
