#include "rigidlim/bogovskii.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "rigidlim/cutoff.hpp"

namespace rigidlim {

namespace {

struct Classified {
  double weight;
  bool active;
  bool outer;
};

// rin2/rout2 in lattice units squared; d2 likewise.
Classified classify(double d2, double rin, double rout) {
  if (d2 <= rin * rin) return {1.0, false, false};
  if (d2 >= rout * rout) return {0.0, false, true};
  return {Cutoff::profile(std::sqrt(d2) / rin), true, false};
}

}  // namespace

// ---- AnnulusMesh ---------------------------------------------------------

AnnulusMesh::AnnulusMesh(const Lattice& lattice, Vec2 center, double inner_radius, double min_resolution)
    : lattice_(lattice), center_(center), inner_(inner_radius) {
  if (!(lattice.h > 0.0)) throw Error("AnnulusMesh: lattice spacing must be positive");
  if (!(inner_radius > 0.0)) throw Error("AnnulusMesh: inner radius must be positive");
  const double h = lattice.h;
  const double cx = (center.x - lattice.origin.x) / h;
  const double cy = (center.y - lattice.origin.y) / h;
  const double rin = inner_radius / h;
  const double rout = 2.0 * rin;
  if (rin < min_resolution - 1e-9)
    throw Error("AnnulusMesh: resolution " + std::to_string(rin) + " cells across the gap is below " +
                std::to_string(min_resolution));

  i0_ = static_cast<int>(std::floor(cx - rout)) - 2;
  j0_ = static_cast<int>(std::floor(cy - rout)) - 2;
  nx_ = static_cast<int>(std::ceil(cx + rout)) + 2 - i0_ + 1;
  ny_ = static_cast<int>(std::ceil(cy + rout)) + 2 - j0_ + 1;

  const std::size_t nc = cells();
  xface_id_.assign(nc, -1);
  yface_id_.assign(nc, -1);
  cell_id_.assign(nc, -1);
  xweight_.assign(nc, 0.0);
  yweight_.assign(nc, 0.0);
  cweight_.assign(nc, 0.0);
  xouter_.assign(nc, 0);
  youter_.assign(nc, 0);
  cannulus_.assign(nc, 0);

  int next = 0;
  std::vector<char> xact(nc, 0), yact(nc, 0);
  for (int b = 0; b < ny_; ++b)
    for (int a = 0; a < nx_; ++a) {
      const std::size_t k = static_cast<std::size_t>(b) * nx_ + a;
      const int i = i0_ + a, j = j0_ + b;
      {
        const double dx = i - cx, dy = j + 0.5 - cy;
        const auto c = classify(dx * dx + dy * dy, rin, rout);
        xweight_[k] = c.weight;
        xouter_[k] = c.outer;
        xact[k] = c.active;
      }
      {
        const double dx = i + 0.5 - cx, dy = j - cy;
        const auto c = classify(dx * dx + dy * dy, rin, rout);
        yweight_[k] = c.weight;
        youter_[k] = c.outer;
        yact[k] = c.active;
      }
      {
        const double dx = i + 0.5 - cx, dy = j + 0.5 - cy;
        const auto c = classify(dx * dx + dy * dy, rin, rout);
        cweight_[k] = c.weight;
        cannulus_[k] = c.active;
      }
    }
  for (std::size_t k = 0; k < nc; ++k)
    if (xact[k]) xface_id_[k] = next++;
  for (std::size_t k = 0; k < nc; ++k)
    if (yact[k]) yface_id_[k] = next++;
  n_faces_ = static_cast<std::size_t>(next);

  // Constraint cells own at least one active face.
  auto active_x = [&](int a, int b) { return a >= 0 && a < nx_ && b >= 0 && b < ny_ && xact[b * nx_ + a]; };
  auto active_y = [&](int a, int b) { return a >= 0 && a < nx_ && b >= 0 && b < ny_ && yact[b * nx_ + a]; };
  int ncell = 0;
  for (int b = 0; b < ny_; ++b)
    for (int a = 0; a < nx_; ++a)
      if (active_x(a, b) || active_x(a + 1, b) || active_y(a, b) || active_y(a, b + 1))
        cell_id_[static_cast<std::size_t>(b) * nx_ + a] = ncell++;
  n_cells_ = static_cast<std::size_t>(ncell);

  // The constraint cells must form one component through active faces,
  // otherwise the pinned saddle system is singular.
  std::vector<char> seen(nc, 0);
  std::deque<std::pair<int, int>> queue;
  for (int b = 0; b < ny_ && queue.empty(); ++b)
    for (int a = 0; a < nx_; ++a)
      if (cell_id_[static_cast<std::size_t>(b) * nx_ + a] >= 0) {
        queue.emplace_back(a, b);
        seen[static_cast<std::size_t>(b) * nx_ + a] = 1;
        break;
      }
  std::size_t reached = 0;
  while (!queue.empty()) {
    auto [a, b] = queue.front();
    queue.pop_front();
    ++reached;
    auto visit = [&](int a2, int b2) {
      const std::size_t k2 = static_cast<std::size_t>(b2) * nx_ + a2;
      if (!seen[k2]) {
        seen[k2] = 1;
        queue.emplace_back(a2, b2);
      }
    };
    if (active_x(a, b)) visit(a - 1, b);
    if (active_x(a + 1, b)) visit(a + 1, b);
    if (active_y(a, b)) visit(a, b - 1);
    if (active_y(a, b + 1)) visit(a, b + 1);
  }
  if (reached != n_cells_) throw Error("AnnulusMesh: constraint cells are not connected");
}

AnnulusMesh AnnulusMesh::reference(int resolution) { return scaled(resolution, 1.0); }

AnnulusMesh AnnulusMesh::scaled(int resolution, double eps) {
  return AnnulusMesh(Lattice{{0.0, 0.0}, eps / resolution}, {0.0, 0.0}, eps);
}

double AnnulusMesh::divergence(const PatchField& f, std::size_t k) const {
  const int a = static_cast<int>(k % nx_), b = static_cast<int>(k / nx_);
  const double ue = a + 1 < nx_ ? f.u[k + 1] : 0.0;
  const double vn = b + 1 < ny_ ? f.v[k + nx_] : 0.0;
  return (ue - f.u[k] + vn - f.v[k]) / lattice_.h;
}

double AnnulusMesh::l2_cells(const std::vector<double>& f) const {
  double s = 0.0;
  for (double x : f) s += x * x;
  return std::sqrt(s) * lattice_.h;
}

double AnnulusMesh::l2_faces(const PatchField& f) const {
  double s = 0.0;
  for (std::size_t k = 0; k < cells(); ++k) s += f.u[k] * f.u[k] + f.v[k] * f.v[k];
  return std::sqrt(s) * lattice_.h;
}

double AnnulusMesh::gradient_l2(const PatchField& f) const {
  // Zero extension outside the window; h^2 * (diff / h)^2 = diff^2.
  auto comp = [&](const std::vector<double>& c) {
    auto at = [&](int a, int b) {
      return (a >= 0 && a < nx_ && b >= 0 && b < ny_) ? c[static_cast<std::size_t>(b) * nx_ + a] : 0.0;
    };
    double s = 0.0;
    for (int b = 0; b < ny_; ++b)
      for (int a = -1; a < nx_; ++a) {
        const double d = at(a + 1, b) - at(a, b);
        s += d * d;
      }
    for (int b = -1; b < ny_; ++b)
      for (int a = 0; a < nx_; ++a) {
        const double d = at(a, b + 1) - at(a, b);
        s += d * d;
      }
    return s;
  };
  return std::sqrt(comp(f.u) + comp(f.v));
}

double AnnulusMesh::lp_faces(const PatchField& f, double p) const {
  if (!(p >= 1.0)) throw Error("lp norm requires p >= 1");
  std::vector<double> mag(cells(), 0.0);
  double peak = 0.0;
  for (int b = 0; b < ny_; ++b)
    for (int a = 0; a < nx_; ++a) {
      const std::size_t k = static_cast<std::size_t>(b) * nx_ + a;
      const double ux = 0.5 * (f.u[k] + (a + 1 < nx_ ? f.u[k + 1] : 0.0));
      const double vy = 0.5 * (f.v[k] + (b + 1 < ny_ ? f.v[k + nx_] : 0.0));
      mag[k] = std::hypot(ux, vy);
      peak = std::max(peak, mag[k]);
    }
  if (std::isinf(p) || peak == 0.0) return peak;
  double s = 0.0;
  for (double m : mag) s += std::pow(m / peak, p);
  return peak * std::pow(s * lattice_.h * lattice_.h, 1.0 / p);
}

// ---- BogovskiiSolver -----------------------------------------------------

BogovskiiSolver::BogovskiiSolver(AnnulusMesh mesh) : mesh_(std::move(mesh)) {
  const std::size_t nf = mesh_.num_face_unknowns();
  const std::size_t nc = mesh_.num_constraint_cells();
  if (nc < 2) throw Error("BogovskiiSolver: empty annulus");
  const int nx = mesh_.nx(), ny = mesh_.ny();
  const std::size_t pinned = nc - 1;

  constraint_cells_.assign(nc, 0);
  for (std::size_t k = 0; k < mesh_.cells(); ++k)
    if (mesh_.cell_constraint(k) >= 0) constraint_cells_[static_cast<std::size_t>(mesh_.cell_constraint(k))] = k;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(nf * 7);
  auto xid = [&](int a, int b) { return (a >= 0 && a < nx && b >= 0 && b < ny) ? mesh_.xface_unknown(b * nx + a) : -1; };
  auto yid = [&](int a, int b) { return (a >= 0 && a < nx && b >= 0 && b < ny) ? mesh_.yface_unknown(b * nx + a) : -1; };
  auto cid = [&](int a, int b) { return (a >= 0 && a < nx && b >= 0 && b < ny) ? mesh_.cell_constraint(b * nx + a) : -1; };
  auto couple = [&](int face, int cell, double coeff) {
    if (cell < 0 || static_cast<std::size_t>(cell) == pinned) return;
    const auto row = static_cast<int>(nf) + cell;
    trip.emplace_back(face, row, coeff);
    trip.emplace_back(row, face, coeff);
  };
  for (int b = 0; b < ny; ++b)
    for (int a = 0; a < nx; ++a) {
      if (const int f = xid(a, b); f >= 0) {
        trip.emplace_back(f, f, 4.0);
        for (int nb : {xid(a - 1, b), xid(a + 1, b), xid(a, b - 1), xid(a, b + 1)})
          if (nb >= 0) trip.emplace_back(f, nb, -1.0);
        couple(f, cid(a, b), -1.0);
        couple(f, cid(a - 1, b), 1.0);
      }
      if (const int f = yid(a, b); f >= 0) {
        trip.emplace_back(f, f, 4.0);
        for (int nb : {yid(a - 1, b), yid(a + 1, b), yid(a, b - 1), yid(a, b + 1)})
          if (nb >= 0) trip.emplace_back(f, nb, -1.0);
        couple(f, cid(a, b), -1.0);
        couple(f, cid(a, b - 1), 1.0);
      }
    }
  const auto dim = static_cast<Eigen::Index>(nf + nc - 1);
  Eigen::SparseMatrix<double> kkt(dim, dim);
  kkt.setFromTriplets(trip.begin(), trip.end());
  kkt.makeCompressed();
  lu_ = std::make_shared<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>>();
  lu_->compute(kkt);
  if (lu_->info() != Eigen::Success) throw Error("BogovskiiSolver: factorization failed");
}

std::vector<double> BogovskiiSolver::sample_cells(const std::function<double(Vec2)>& f) const {
  std::vector<double> out(mesh_.cells(), 0.0);
  const int nx = mesh_.nx();
  for (std::size_t k : constraint_cells_) {
    const int a = static_cast<int>(k % nx), b = static_cast<int>(k / nx);
    out[k] = f(mesh_.lattice().center(mesh_.i0() + a, mesh_.j0() + b));
  }
  return out;
}

std::vector<double> BogovskiiSolver::remove_mean(std::vector<double> f) const {
  double s = 0.0;
  for (std::size_t k : constraint_cells_) s += f[k];
  const double mean = s / static_cast<double>(constraint_cells_.size());
  for (std::size_t k : constraint_cells_) f[k] -= mean;
  return f;
}

BogovskiiSolution BogovskiiSolver::solve(const std::vector<double>& f, double mean_tol) const {
  if (f.size() != mesh_.cells()) throw Error("BogovskiiSolver: source size does not match the mesh window");
  const std::size_t nf = mesh_.num_face_unknowns();
  const std::size_t nc = constraint_cells_.size();

  double sum = 0.0, sq = 0.0;
  for (std::size_t k : constraint_cells_) {
    sum += f[k];
    sq += f[k] * f[k];
  }
  BogovskiiSolution sol{mesh_.zero_faces(), 0.0, 0.0};
  if (sq == 0.0) return sol;
  const double mean = sum / static_cast<double>(nc);
  const double rms = std::sqrt(sq / static_cast<double>(nc));
  if (std::abs(mean) > mean_tol * rms)
    throw Error("BogovskiiSolver: source has nonzero mean (|mean|/rms = " + std::to_string(std::abs(mean) / rms) + ")");

  const double h = mesh_.lattice().h;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nf + nc - 1));
  for (std::size_t c = 0; c + 1 < nc; ++c) rhs[static_cast<Eigen::Index>(nf + c)] = h * (f[constraint_cells_[c]] - mean);
  const Eigen::VectorXd x = lu_->solve(rhs);
  if (lu_->info() != Eigen::Success) throw Error("BogovskiiSolver: solve failed");

  for (std::size_t k = 0; k < mesh_.cells(); ++k) {
    if (const int id = mesh_.xface_unknown(k); id >= 0) sol.field.u[k] = x[id];
    if (const int id = mesh_.yface_unknown(k); id >= 0) sol.field.v[k] = x[id];
  }

  double res = 0.0, ref = 0.0;
  for (std::size_t k : constraint_cells_) {
    const double target = f[k] - mean;
    const double d = mesh_.divergence(sol.field, k) - target;
    res += d * d;
    ref += target * target;
  }
  sol.residual = ref > 0.0 ? std::sqrt(res / ref) : 0.0;
  for (std::size_t k = 0; k < mesh_.cells(); ++k) {
    if (mesh_.xface_unknown(k) < 0) sol.trace_max = std::max(sol.trace_max, std::abs(sol.field.u[k]));
    if (mesh_.yface_unknown(k) < 0) sol.trace_max = std::max(sol.trace_max, std::abs(sol.field.v[k]));
  }
  return sol;
}

BogovskiiSolution BogovskiiSolver::solve_divergence_form(const PatchField& F, double trace_tol) const {
  if (F.u.size() != mesh_.cells() || F.v.size() != mesh_.cells())
    throw Error("BogovskiiSolver: vector field size does not match the mesh window");
  double peak = 0.0;
  for (std::size_t k = 0; k < mesh_.cells(); ++k) peak = std::max({peak, std::abs(F.u[k]), std::abs(F.v[k])});
  const int nx = mesh_.nx(), ny = mesh_.ny();
  // Normal trace: non-active faces bounding a constraint cell.
  for (std::size_t k : constraint_cells_) {
    const int a = static_cast<int>(k % nx), b = static_cast<int>(k / nx);
    auto check = [&](bool inside, int id, double value) {
      if (inside && id < 0 && std::abs(value) > trace_tol * peak)
        throw Error("BogovskiiSolver: vector field has nonzero normal trace on the annulus boundary");
    };
    check(true, mesh_.xface_unknown(k), F.u[k]);
    check(true, mesh_.yface_unknown(k), F.v[k]);
    check(a + 1 < nx, a + 1 < nx ? mesh_.xface_unknown(k + 1) : 0, a + 1 < nx ? F.u[k + 1] : 0.0);
    check(b + 1 < ny, b + 1 < ny ? mesh_.yface_unknown(k + nx) : 0, b + 1 < ny ? F.v[k + nx] : 0.0);
  }
  std::vector<double> g(mesh_.cells(), 0.0);
  double sum = 0.0;
  for (std::size_t k : constraint_cells_) {
    g[k] = mesh_.divergence(F, k);
    sum += g[k];
  }
  // With zero normal trace the cell divergences telescope to zero; what remains is
  // rounding at the scale of peak / h, not of g itself (g may vanish identically).
  const double mean = sum / static_cast<double>(constraint_cells_.size());
  if (std::abs(mean) > 1e-10 * peak / mesh_.lattice().h)
    throw Error("BogovskiiSolver: divergence of the vector field has nonzero mean");
  double sq = 0.0;
  for (std::size_t k : constraint_cells_) {
    g[k] -= mean;
    sq += g[k] * g[k];
  }
  if (std::sqrt(sq / static_cast<double>(constraint_cells_.size())) <= 1e-12 * peak / mesh_.lattice().h)
    return BogovskiiSolution{mesh_.zero_faces(), 0.0, 0.0};
  return solve(g, 1e-8);
}

std::vector<double> random_annulus_source(const BogovskiiSolver& solver, unsigned long long seed,
                                          double max_wavenumber, int modes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  struct Mode {
    double kx, ky, amp, ph;
  };
  std::vector<Mode> ms;
  while (static_cast<int>(ms.size()) < modes) {
    const double kx = max_wavenumber * unit(rng), ky = max_wavenumber * unit(rng);
    if (kx * kx + ky * ky > max_wavenumber * max_wavenumber) continue;
    ms.push_back({kx, ky, unit(rng), phase(rng)});
  }
  const AnnulusMesh& m = solver.mesh();
  const Vec2 c = m.center();
  const double r = m.inner_radius();
  auto f = solver.sample_cells([&](Vec2 x) {
    const Vec2 y = (1.0 / r) * (x - c);
    double s = 0.0;
    for (const auto& md : ms) s += md.amp * std::cos(md.kx * y.x + md.ky * y.y + md.ph);
    return s;
  });
  return solver.remove_mean(std::move(f));
}

}  // namespace rigidlim
