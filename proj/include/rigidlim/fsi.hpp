#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rigidlim/background.hpp"
#include "rigidlim/fields.hpp"

namespace rigidlim {

class SpectralOps;

/// Rigid disk. Mass and inertia are derived from (radius, density).
struct RigidBodyState {
  Vec2 position;  // center of mass, wrapped into the box
  double angle = 0.0;
  Vec2 velocity;  // translational velocity
  double angular_velocity = 0.0;
  double radius = 0.0;
  double density = 1.0;

  double area() const { return kPi * radius * radius; }
  double mass() const { return density * area(); }
  double inertia() const { return 0.5 * mass() * radius * radius; }
  /// Mass and inertia in excess of the unit-density fluid the grid already carries.
  double excess_mass() const { return (density - 1.0) * area(); }
  double excess_inertia() const { return 0.5 * excess_mass() * radius * radius; }
  /// Rigid velocity u_S(x) = velocity + angular_velocity (x - position)^perp at a displacement.
  Vec2 rigid_velocity(Vec2 rel) const { return velocity + angular_velocity * perp(rel); }
};

/// How the initial fluid field is built from the background at t = 0.
enum class InitialField { Restricted, Background, Quiescent };

struct SimConfig {
  int n = 128;
  double side = 2.0 * kPi;
  double viscosity = 0.01;
  double final_time = 1.0;
  /// Fixed time step; 0 selects T / ceil(T / dt_cfl) from the initial velocity.
  double dt = 0.0;
  double cfl = 0.5;
  /// Penalty relaxation time; 0 selects dt.
  double penalty = 0.0;

  bool has_body = true;
  double radius = 0.1;
  double density = 1.0;
  Vec2 position{kPi / 2 + 0.5, kPi / 2};
  double angle = 0.0;
  /// Initial body velocity; when unset it is the background velocity at the start point.
  bool body_velocity_set = false;
  Vec2 body_velocity{};
  double angular_velocity = 0.0;

  std::string background = "taylor_green";
  Vec2 uniform_velocity{1.0, 0.0};
  InitialField initial = InitialField::Restricted;
  /// Scale of the restriction used for the initial field and the diagnostics (0: radius).
  double eps = 0.0;
  /// Cells across the restriction annulus gap below which the run is rejected.
  double min_restriction_resolution = 4.0;

  /// Relative per-step energy growth tolerated before the run fails.
  double energy_tol = 1e-6;
  int sample_every = 5;

  double restriction_scale() const { return eps > 0.0 ? eps : radius; }
};

struct FsiState {
  double t = 0.0;
  long step = 0;
  VectorField2D u;
  ScalarField2D pressure;
  RigidBodyState body;
  RegionMask mask;  // cell coverage of the body
  /// Body coverage at x- and y-faces (same layout as the velocity components).
  std::vector<double> xface_mask, yface_mask;

  /// int rho |u|^2 with rho = 1 in the fluid and density in the body.
  double energy() const;
  /// int rho u.
  Vec2 momentum() const;
};

/// Per-step bookkeeping.
struct StepReport {
  double energy_before = 0.0;
  double energy_after = 0.0;
  /// |fluid momentum change + body momentum change| over the exchange, relative
  /// to the momentum carried by the penalized faces and the body.
  double exchange_residual = 0.0;
  double max_speed = 0.0;
};

/// Coverage of the disk at every x- and y-face (4x4 sub-sampling of a face-centered cell).
void face_masks(const Grid2D& grid, Vec2 center, double radius, std::vector<double>& xmask, std::vector<double>& ymask);

/// Builds the initial state from the configuration and background.
FsiState initial_state(const SimConfig& cfg, const BackgroundSolution& bg);

/// Time step used for the configuration: cfg.dt if set, otherwise CFL-limited.
double select_time_step(const SimConfig& cfg, const FsiState& s0);

/// Penalized fluid/rigid-body integrator on the periodic box.
class FsiSolver {
 public:
  FsiSolver(const SimConfig& cfg, FsiState state, double dt);
  ~FsiSolver();
  FsiSolver(FsiSolver&&) noexcept;

  const FsiState& state() const { return state_; }
  const SimConfig& config() const { return cfg_; }
  double dt() const { return dt_; }
  double penalty() const { return penalty_; }

  /// Advection (midpoint), exact diffusion, implicit penalization with momentum
  /// exchange, projection, body motion.
  StepReport step();

 private:
  void advect();
  double penalize();
  void move_body();

  SimConfig cfg_;
  FsiState state_;
  double dt_;
  double penalty_;
  std::unique_ptr<SpectralOps> ops_;
};

/// max over fully covered cells of |u - u_S| and, on cells whose neighbors are
/// also covered, of |D(u)|.
double rigidity_residual(const FsiState& s);

struct RunRecord {
  double dt = 0.0;
  long steps = 0;
  std::vector<StepReport> reports;
  FsiState final_state;
  double max_energy_growth = 0.0;  // max over steps of (E_{n+1} - E_n) / E_n
};

/// Callback at sample times (t = 0, every sample_every steps, and T).
using SampleObserver = std::function<void(const FsiState&)>;

/// Integrates to T. Throws if the energy grows by more than energy_tol in a
/// step or the state becomes non-finite; `dump_on_failure` (if non-empty) is the
/// path of a field dump written before throwing.
RunRecord run_simulation(const SimConfig& cfg, const BackgroundSolution& bg, const SampleObserver& observer = {},
                         const std::string& dump_on_failure = {});

}  // namespace rigidlim
