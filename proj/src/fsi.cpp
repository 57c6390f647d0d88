#include "rigidlim/fsi.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "rigidlim/field_io.hpp"
#include "rigidlim/restriction.hpp"
#include "rigidlim/spectral.hpp"

namespace rigidlim {

namespace {

// Coverage at x/y faces near the disk: (storage index, coverage) for coverage > 0.
struct FaceCoverage {
  std::vector<std::pair<std::size_t, double>> x, y;
};

FaceCoverage face_coverage(const Grid2D& grid, Vec2 center, double radius) {
  FaceCoverage fc;
  const double h = grid.spacing();
  const int n = grid.n();
  const Vec2 c = grid.wrap(center);
  const int reach = static_cast<int>(std::ceil(radius / h)) + 2;
  const bool whole = 2 * reach + 1 >= n;
  const int ic = static_cast<int>(std::floor(c.x / h)), jc = static_cast<int>(std::floor(c.y / h));
  const int ilo = whole ? 0 : ic - reach, ihi = whole ? n - 1 : ic + reach;
  const int jlo = whole ? 0 : jc - reach, jhi = whole ? n - 1 : jc + reach;
  for (int j = jlo; j <= jhi; ++j)
    for (int i = ilo; i <= ihi; ++i) {
      const std::size_t k = grid.wrapped_index(i, j);
      if (const double w = disk_coverage(grid, grid.xface(i, j), h, c, radius); w > 0.0) fc.x.emplace_back(k, w);
      if (const double w = disk_coverage(grid, grid.yface(i, j), h, c, radius); w > 0.0) fc.y.emplace_back(k, w);
    }
  return fc;
}

bool all_finite(const VectorField2D& v) {
  for (double x : v.u_data())
    if (!std::isfinite(x)) return false;
  for (double x : v.v_data())
    if (!std::isfinite(x)) return false;
  return true;
}

void rebuild_masks(FsiState& s) {
  const Grid2D& g = s.u.grid();
  if (s.body.radius <= 0.0) return;
  s.mask = RegionMask::disk(g, s.body.position, s.body.radius);
  face_masks(g, s.body.position, s.body.radius, s.xface_mask, s.yface_mask);
}

}  // namespace

double FsiState::energy() const {
  return face_energy(u) + body.excess_mass() * dot(body.velocity, body.velocity) +
         body.excess_inertia() * body.angular_velocity * body.angular_velocity;
}

Vec2 FsiState::momentum() const { return rigidlim::momentum(u) + body.excess_mass() * body.velocity; }

void face_masks(const Grid2D& grid, Vec2 center, double radius, std::vector<double>& xmask, std::vector<double>& ymask) {
  xmask.assign(grid.size(), 0.0);
  ymask.assign(grid.size(), 0.0);
  const FaceCoverage fc = face_coverage(grid, center, radius);
  for (const auto& [k, w] : fc.x) xmask[k] = w;
  for (const auto& [k, w] : fc.y) ymask[k] = w;
}

namespace {
constexpr int kMaxRigidInitIterations = 2000;
constexpr double kRigidInitTol = 1e-6;
}  // namespace

FsiState initial_state(const SimConfig& cfg, const BackgroundSolution& bg) {
  const Grid2D grid(cfg.n, cfg.side);
  if (!(cfg.viscosity > 0.0)) throw Error("config: viscosity must be positive");
  if (!(cfg.final_time > 0.0)) throw Error("config: final time must be positive");
  if (cfg.has_body) {
    if (!(cfg.radius > 0.0)) throw Error("config: body radius must be positive");
    if (cfg.density < 1.0) throw Error("config: body density below the fluid density is not supported");
    if (cfg.radius > cfg.restriction_scale()) throw Error("config: body radius exceeds the restriction scale eps");
  }
  if (std::abs(bg.box_side - cfg.side) > 1e-12 * cfg.side) throw Error("config: background box does not match the grid");

  FsiState s{0.0, 0, VectorField2D(grid), ScalarField2D(grid), RigidBodyState{}, RegionMask(grid), {}, {}};
  s.xface_mask.assign(grid.size(), 0.0);
  s.yface_mask.assign(grid.size(), 0.0);
  const VectorField2D bg0 = VectorField2D::sample(grid, [&](Vec2 x) { return bg.velocity(0.0, x); });

  RigidBodyState& b = s.body;
  b.position = grid.wrap(cfg.position);
  b.angle = cfg.angle;
  b.radius = cfg.has_body ? cfg.radius : 0.0;
  b.density = cfg.density;
  b.angular_velocity = cfg.angular_velocity;

  switch (cfg.initial) {
    case InitialField::Quiescent:
      b.velocity = {};
      break;
    case InitialField::Background:
      s.u = bg0;
      b.velocity = interpolate(bg0, b.position);
      break;
    case InitialField::Restricted:
      if (cfg.has_body) {
        RestrictionOptions opts;
        opts.min_resolution = cfg.min_restriction_resolution;
        RestrictionResult r = restrict_field(bg0, cfg.restriction_scale(), b.position, opts);
        s.u = std::move(r.field);
        b.velocity = r.body_value;
      } else {
        s.u = bg0;
        b.velocity = interpolate(bg0, b.position);
      }
      break;
  }
  if (cfg.body_velocity_set) b.velocity = cfg.body_velocity;

  if (cfg.has_body) {
    rebuild_masks(s);
    // Compatibility: the fluid inside the body moves with it.
    const bool rigid_override = cfg.body_velocity_set || cfg.angular_velocity != 0.0 ||
                                cfg.initial != InitialField::Restricted;
    if (rigid_override) {
      // Alternating projections onto {u = u_S on the body} and {div u = 0}.
      const int n = grid.n();
      SpectralOps ops(grid);
      const double scale = std::max({max_abs(s.u), norm(b.velocity) + std::abs(b.angular_velocity) * b.radius, 1e-300});
      for (int it = 0; it < kMaxRigidInitIterations; ++it) {
        double dev = 0.0;
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            const std::size_t k = grid.index(i, j);
            if (const double w = s.xface_mask[k]; w > 0.0) {
              const double us = b.rigid_velocity(grid.min_image(grid.xface(i, j) - b.position)).x;
              if (w >= 1.0) dev = std::max(dev, std::abs(s.u.u_data()[k] - us));
              s.u.u_data()[k] = (1.0 - w) * s.u.u_data()[k] + w * us;
            }
            if (const double w = s.yface_mask[k]; w > 0.0) {
              const double us = b.rigid_velocity(grid.min_image(grid.yface(i, j) - b.position)).y;
              if (w >= 1.0) dev = std::max(dev, std::abs(s.u.v_data()[k] - us));
              s.u.v_data()[k] = (1.0 - w) * s.u.v_data()[k] + w * us;
            }
          }
        ops.project(s.u);
        if (it > 0 && dev <= kRigidInitTol * scale) break;
      }
    }
  }
  return s;
}

double select_time_step(const SimConfig& cfg, const FsiState& s0) {
  const double h = s0.u.grid().spacing();
  if (cfg.dt > 0.0) return cfg.dt;
  if (!(cfg.cfl > 0.0)) throw Error("config: CFL number must be positive");
  const double umax = std::max({max_abs(s0.u), std::abs(s0.body.velocity.x), std::abs(s0.body.velocity.y)});
  // Headroom for transient speed-up above the initial maximum.
  const double dt_cfl = 0.8 * cfg.cfl * h / (umax > 0.0 ? umax : 1.0);
  return cfg.final_time / std::ceil(cfg.final_time / dt_cfl);
}

// ---- FsiSolver -----------------------------------------------------------

FsiSolver::FsiSolver(const SimConfig& cfg, FsiState state, double dt)
    : cfg_(cfg), state_(std::move(state)), dt_(dt), penalty_(cfg.penalty > 0.0 ? cfg.penalty : dt),
      ops_(std::make_unique<SpectralOps>(state_.u.grid())) {
  if (!(dt > 0.0)) throw Error("FsiSolver: time step must be positive");
}

FsiSolver::~FsiSolver() = default;
FsiSolver::FsiSolver(FsiSolver&&) noexcept = default;

void FsiSolver::advect() {
  VectorField2D& u = state_.u;
  VectorField2D mid = u;
  mid.axpy(-0.5 * dt_, advection_term(u));
  ops_->project(mid);
  u.axpy(-dt_, advection_term(mid));
}

double FsiSolver::penalize() {
  FsiState& s = state_;
  RigidBodyState& b = s.body;
  const Grid2D& g = s.u.grid();
  const int n = g.n();
  const double area = g.cell_area();
  const double a = dt_ / penalty_;
  const FaceCoverage fc = face_coverage(g, b.position, b.radius);

  // Implicit relaxation u' = u + w (U* - u), w = a chi / (1 + a chi), coupled
  // with the body through exact momentum and angular-momentum exchange.
  struct Face {
    std::size_t k;
    double w;
    double arm;  // -r_y for x-faces, r_x for y-faces
  };
  std::vector<Face> xf, yf;
  xf.reserve(fc.x.size());
  yf.reserve(fc.y.size());
  for (const auto& [k, chi] : fc.x) {
    const int i = static_cast<int>(k % n), j = static_cast<int>(k / n);
    xf.push_back({k, a * chi / (1.0 + a * chi), -g.min_image(g.xface(i, j) - b.position).y});
  }
  for (const auto& [k, chi] : fc.y) {
    const int i = static_cast<int>(k % n), j = static_cast<int>(k / n);
    yf.push_back({k, a * chi / (1.0 + a * chi), g.min_image(g.yface(i, j) - b.position).x});
  }
  double wx = 0, wy = 0, rx = 0, ry = 0, qx = 0, qy = 0, ux = 0, uy = 0, tx = 0, ty = 0;
  auto& uu = s.u.u_data();
  auto& vv = s.u.v_data();
  for (const Face& f : xf) {
    wx += f.w;
    rx += f.w * f.arm;
    qx += f.w * f.arm * f.arm;
    ux += f.w * uu[f.k];
    tx += f.w * f.arm * uu[f.k];
  }
  for (const Face& f : yf) {
    wy += f.w;
    ry += f.w * f.arm;
    qy += f.w * f.arm * f.arm;
    uy += f.w * vv[f.k];
    ty += f.w * f.arm * vv[f.k];
  }
  const double m = b.excess_mass(), J = b.excess_inertia();
  Eigen::Matrix3d A;
  A << m + area * wx, 0.0, area * rx, 0.0, m + area * wy, area * ry, area * rx, area * ry, J + area * (qx + qy);
  const Eigen::Vector3d rhs(m * b.velocity.x + area * ux, m * b.velocity.y + area * uy,
                            J * b.angular_velocity + area * (tx + ty));
  if (A.diagonal().minCoeff() <= 0.0) return 0.0;  // body covers no face
  const Eigen::Vector3d x = A.ldlt().solve(rhs);
  const Vec2 ell{x[0], x[1]};
  const double om = x[2];

  Vec2 dp{};
  double dl = 0.0, scale = 0.0;
  for (const Face& f : xf) {
    const double du = f.w * (ell.x + om * f.arm - uu[f.k]);
    scale += area * (std::abs(uu[f.k]) + std::abs(uu[f.k] + du));
    uu[f.k] += du;
    dp.x += area * du;
    dl += area * f.arm * du;
  }
  for (const Face& f : yf) {
    const double dv = f.w * (ell.y + om * f.arm - vv[f.k]);
    scale += area * (std::abs(vv[f.k]) + std::abs(vv[f.k] + dv));
    vv[f.k] += dv;
    dp.y += area * dv;
    dl += area * f.arm * dv;
  }
  const Vec2 body_dp = m * (ell - b.velocity);
  const double body_dl = J * (om - b.angular_velocity);
  scale += m * (norm(ell) + norm(b.velocity)) + J * (std::abs(om) + std::abs(b.angular_velocity)) / std::max(b.radius, 1e-300);
  b.velocity = ell;
  b.angular_velocity = om;
  if (scale == 0.0) return 0.0;
  const double res = std::max(norm(dp + body_dp), std::abs(dl + body_dl) / std::max(b.radius, 1e-300));
  return res / scale;
}

void FsiSolver::move_body() {
  RigidBodyState& b = state_.body;
  const Grid2D& g = state_.u.grid();
  b.position = g.wrap(b.position + dt_ * b.velocity);
  b.angle += dt_ * b.angular_velocity;
  rebuild_masks(state_);
}

StepReport FsiSolver::step() {
  FsiState& s = state_;
  const Grid2D& g = s.u.grid();
  StepReport r;
  r.energy_before = s.energy();
  r.max_speed = std::max({max_abs(s.u), std::abs(s.body.velocity.x), std::abs(s.body.velocity.y)});
  if (dt_ * r.max_speed > cfg_.cfl * g.spacing())
    throw Error("CFL violated at t = " + std::to_string(s.t) + ": dt |u|/h = " +
                std::to_string(dt_ * r.max_speed / g.spacing()) + " exceeds " + std::to_string(cfg_.cfl));

  advect();
  ops_->diffuse(s.u, cfg_.viscosity * dt_);
  if (s.body.radius > 0.0) r.exchange_residual = penalize();
  ScalarField2D phi = ops_->project(s.u);
  phi *= 1.0 / dt_;
  s.pressure = std::move(phi);
  if (s.body.radius > 0.0) move_body();
  s.t += dt_;
  ++s.step;
  r.energy_after = s.energy();
  if (!std::isfinite(r.energy_after) || !all_finite(s.u) || !std::isfinite(s.body.position.x) ||
      !std::isfinite(s.body.velocity.x) || !std::isfinite(s.body.velocity.y))
    throw Error("non-finite state at t = " + std::to_string(s.t));
  return r;
}

double rigidity_residual(const FsiState& s) {
  const RigidBodyState& b = s.body;
  if (b.radius <= 0.0) return 0.0;
  const Grid2D& g = s.u.grid();
  const int n = g.n();
  const double full = 1.0 - 1e-12;
  const TensorField2D D = symmetric_gradient(s.u);
  double res = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      if (s.mask(i, j) < full) continue;
      const Vec2 us = b.rigid_velocity(g.min_image(g.center(i, j) - b.position));
      res = std::max(res, norm(s.u.center_value(i, j) - us));
      bool interior = true;
      for (int dj = -1; dj <= 1 && interior; ++dj)
        for (int di = -1; di <= 1; ++di)
          if (s.mask(g.wrap(i + di), g.wrap(j + dj)) < full) {
            interior = false;
            break;
          }
      if (!interior) continue;
      const std::size_t k = g.index(i, j);
      res = std::max(res, std::sqrt(D.xx[k] * D.xx[k] + D.xy[k] * D.xy[k] + D.yx[k] * D.yx[k] + D.yy[k] * D.yy[k]));
    }
  return res;
}

RunRecord run_simulation(const SimConfig& cfg, const BackgroundSolution& bg, const SampleObserver& observer,
                         const std::string& dump_on_failure) {
  FsiState s0 = initial_state(cfg, bg);
  const double dt = select_time_step(cfg, s0);
  FsiSolver solver(cfg, std::move(s0), dt);
  const long steps = std::lround(cfg.final_time / dt);
  const int every = std::max(1, cfg.sample_every);
  std::vector<StepReport> reports;
  reports.reserve(static_cast<std::size_t>(steps));
  double growth = 0.0;
  if (observer) observer(solver.state());
  for (long n = 0; n < steps; ++n) {
    StepReport r;
    try {
      r = solver.step();
    } catch (const Error&) {
      if (!dump_on_failure.empty()) write_field_dump(dump_on_failure, solver.state().u);
      throw;
    }
    const double g = r.energy_before > 0.0 ? (r.energy_after - r.energy_before) / r.energy_before : 0.0;
    growth = std::max(growth, g);
    reports.push_back(r);
    if (g > cfg.energy_tol) {
      if (!dump_on_failure.empty()) write_field_dump(dump_on_failure, solver.state().u);
      throw Error("energy inequality violated at t = " + std::to_string(solver.state().t) +
                  " (relative growth " + std::to_string(g) + ")");
    }
    if (observer && ((n + 1) % every == 0 || n + 1 == steps)) observer(solver.state());
  }
  return RunRecord{dt, steps, std::move(reports), solver.state(), growth};
}

}  // namespace rigidlim
