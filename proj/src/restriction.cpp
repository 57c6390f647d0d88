#include "rigidlim/restriction.hpp"

#include <algorithm>
#include <cmath>

namespace rigidlim {

namespace {

// Cell-centered gradient of a window face field: (d_x u, d_y u, d_x v, d_y v).
// Defined for interior window cells; boundary cells read zero.
struct PatchGradient {
  std::vector<double> xx, xy, yx, yy;
};

PatchGradient patch_gradient(const AnnulusMesh& m, const PatchField& f) {
  const int nx = m.nx(), ny = m.ny();
  const double h = m.lattice().h;
  const std::size_t nc = m.cells();
  PatchGradient g{std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.0), std::vector<double>(nc, 0.0),
                  std::vector<double>(nc, 0.0)};
  auto at = [&](const std::vector<double>& c, int a, int b) { return c[static_cast<std::size_t>(b) * nx + a]; };
  auto uc = [&](int a, int b) { return 0.5 * (at(f.u, a, b) + at(f.u, a + 1, b)); };
  auto vc = [&](int a, int b) { return 0.5 * (at(f.v, a, b) + at(f.v, a, b + 1)); };
  for (int b = 1; b + 1 < ny; ++b)
    for (int a = 1; a + 1 < nx; ++a) {
      const std::size_t k = static_cast<std::size_t>(b) * nx + a;
      g.xx[k] = (at(f.u, a + 1, b) - at(f.u, a, b)) / h;
      g.yy[k] = (at(f.v, a, b + 1) - at(f.v, a, b)) / h;
      g.xy[k] = (uc(a, b + 1) - uc(a, b - 1)) / (2.0 * h);
      g.yx[k] = (vc(a + 1, b) - vc(a - 1, b)) / (2.0 * h);
    }
  return g;
}

double lp_values(const std::vector<double>& mag, double p, double h) {
  if (!(p >= 1.0)) throw Error("lp norm requires p >= 1");
  const double peak = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (std::isinf(p) || peak == 0.0) return peak;
  double s = 0.0;
  for (double m : mag) s += std::pow(m / peak, p);
  return peak * std::pow(s * h * h, 1.0 / p);
}

}  // namespace

PatchField LocalRestriction::difference() const {
  PatchField d = restricted;
  for (std::size_t k = 0; k < d.u.size(); ++k) {
    d.u[k] -= phi.u[k];
    d.v[k] -= phi.v[k];
  }
  return d;
}

LocalRestriction restrict_local(const FaceSampler& phi, const Lattice& lattice, double eps, Vec2 center,
                                Vec2 body_value, const RestrictionOptions& opts) {
  if (!(eps > 0.0)) throw Error("restrict: eps must be positive");
  const BogovskiiSolver solver(AnnulusMesh(lattice, center, eps, opts.min_resolution));
  const AnnulusMesh& m = solver.mesh();
  const std::size_t nc = m.cells();
  const int nx = m.nx();

  LocalRestriction r{m, body_value, m.zero_faces(), m.zero_faces(), m.zero_faces(), m.zero_faces(), 0.0};
  for (std::size_t k = 0; k < nc; ++k) {
    const int i = m.i0() + static_cast<int>(k % nx), j = m.j0() + static_cast<int>(k / nx);
    r.phi.u[k] = phi(0, i, j);
    r.phi.v[k] = phi(1, i, j);
    const double wx = m.xface_weight(k), wy = m.yface_weight(k);
    r.blended.u[k] = (1.0 - wx) * r.phi.u[k] + wx * body_value.x;
    r.blended.v[k] = (1.0 - wy) * r.phi.v[k] + wy * body_value.y;
  }

  std::vector<double> g(nc, 0.0);
  for (std::size_t k = 0; k < nc; ++k)
    if (m.cell_constraint(k) >= 0) g[k] = m.divergence(r.blended, k);
  const BogovskiiSolution b = solver.solve(g, opts.mean_tol);
  r.correction = b.field;
  r.bogovskii_residual = b.residual;
  r.restricted = r.blended;
  for (std::size_t k = 0; k < nc; ++k) {
    r.restricted.u[k] -= r.correction.u[k];
    r.restricted.v[k] -= r.correction.v[k];
  }
  return r;
}

FaceSampler sampler_from_function(const std::function<Vec2(Vec2)>& phi, const Lattice& lattice) {
  return [phi, lattice](int c, int i, int j) { return c == 0 ? phi(lattice.xface(i, j)).x : phi(lattice.yface(i, j)).y; };
}

RestrictionResult restrict_field(const VectorField2D& phi, double eps, Vec2 center, const RestrictionOptions& opts) {
  const Grid2D& grid = phi.grid();
  const double h = grid.spacing();
  if (!(eps > 0.0)) throw Error("restrict: eps must be positive");
  if (!(2.0 * eps < grid.side() / 4.0)) throw Error("restrict: the outer disk 2 eps must be below a quarter of the box");

  const double peak = max_abs(phi);
  const double div_max = max_abs(divergence(phi));
  if (div_max * h > kDivTol * std::max(peak, 1e-300) && div_max > 0.0)
    throw Error("restrict: input field is not discretely solenoidal (max |div| h / max |phi| = " +
                std::to_string(div_max * h / peak) + ")");

  const Vec2 c = grid.wrap(center);
  const Vec2 body = interpolate(phi, c);
  const LocalRestriction loc = restrict_local(
      [&phi](int comp, int i, int j) { return comp == 0 ? phi.uw(i, j) : phi.vw(i, j); }, Lattice{{0.0, 0.0}, h}, eps, c,
      body, opts);
  const AnnulusMesh& m = loc.mesh;
  if (m.nx() > grid.n() || m.ny() > grid.n()) throw Error("restrict: annulus window exceeds the periodic box");

  RestrictionResult out{phi, body, 0.0, 0.0};
  const int nx = m.nx();
  for (std::size_t k = 0; k < m.cells(); ++k) {
    const int i = m.i0() + static_cast<int>(k % nx), j = m.j0() + static_cast<int>(k / nx);
    out.field.u_data()[grid.wrapped_index(i, j)] = loc.restricted.u[k];
    out.field.v_data()[grid.wrapped_index(i, j)] = loc.restricted.v[k];
    if (m.xface_inner(k)) out.rigidity_residual = std::max(out.rigidity_residual, std::abs(loc.restricted.u[k] - body.x));
    if (m.yface_inner(k)) out.rigidity_residual = std::max(out.rigidity_residual, std::abs(loc.restricted.v[k] - body.y));
  }
  out.divergence_residual = peak > 0.0 ? max_abs(divergence(out.field)) * h / peak : 0.0;
  return out;
}

RestrictionNorms restriction_norms(const LocalRestriction& r, double p) {
  const AnnulusMesh& m = r.mesh;
  const double h = m.lattice().h;
  const std::size_t nc = m.cells();
  const PatchField d = r.difference();

  // R - (1 - eta) phi = eta phibar - B on faces.
  PatchField d_eta = m.zero_faces();
  for (std::size_t k = 0; k < nc; ++k) {
    d_eta.u[k] = r.restricted.u[k] - (1.0 - m.xface_weight(k)) * r.phi.u[k];
    d_eta.v[k] = r.restricted.v[k] - (1.0 - m.yface_weight(k)) * r.phi.v[k];
  }

  const PatchGradient gd = patch_gradient(m, d);
  const PatchGradient gphi = patch_gradient(m, r.phi);
  std::vector<double> mag(nc), mag_eta(nc);
  for (std::size_t k = 0; k < nc; ++k) {
    mag[k] = std::sqrt(gd.xx[k] * gd.xx[k] + gd.xy[k] * gd.xy[k] + gd.yx[k] * gd.yx[k] + gd.yy[k] * gd.yy[k]);
    // grad R - (1 - eta) grad phi = grad (R - phi) + eta grad phi.
    const double w = m.center_weight(k);
    const double a = gd.xx[k] + w * gphi.xx[k], b = gd.xy[k] + w * gphi.xy[k];
    const double c = gd.yx[k] + w * gphi.yx[k], e = gd.yy[k] + w * gphi.yy[k];
    mag_eta[k] = std::sqrt(a * a + b * b + c * c + e * e);
  }
  return {m.inner_radius(), p, m.lp_faces(d, p), lp_values(mag, p, h), m.lp_faces(d_eta, p), lp_values(mag_eta, p, h)};
}

ScalingStudy restriction_scaling_study(const std::function<Vec2(Vec2)>& phi, double p,
                                       const std::vector<double>& eps_list, Vec2 center, int cells_per_eps) {
  if (eps_list.size() < 3) throw Error("scaling study needs at least three eps values");
  if (cells_per_eps < 1) throw Error("scaling study: cells_per_eps must be positive");
  ScalingStudy s;
  s.p = p;
  s.theoretical_slope = std::isinf(p) ? 0.0 : 2.0 / p;
  for (double eps : eps_list) {
    // Lattice nodes sit on the center so every eps sees the same scaled mesh.
    const Lattice lat{center, eps / cells_per_eps};
    const Vec2 body = phi(center);
    const LocalRestriction r = restrict_local(sampler_from_function(phi, lat), lat, eps, center, body,
                                              RestrictionOptions{static_cast<double>(cells_per_eps), 1e-8});
    s.rows.push_back(restriction_norms(r, p));
  }
  auto fit = [&](double RestrictionNorms::*col) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& row : s.rows) pts.emplace_back(row.eps, row.*col);
    return fit_slope(pts);
  };
  s.slope_lp = fit(&RestrictionNorms::err_lp);
  s.slope_grad_lp = fit(&RestrictionNorms::err_grad_lp);
  s.slope_lp_eta = fit(&RestrictionNorms::err_lp_eta);
  s.slope_grad_lp_eta = fit(&RestrictionNorms::err_grad_lp_eta);
  return s;
}

}  // namespace rigidlim
