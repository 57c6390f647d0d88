#include "rigidlim/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rigidlim {

namespace {

void check_p(double p) {
  if (!(p >= 1.0)) throw Error("lp_norm: p must be >= 1");
}

// Generic masked L^p over per-cell magnitudes.
template <class MagFn>
double masked_lp(const Grid2D& g, double p, const RegionMask* mask, MagFn mag) {
  check_p(p);
  if (mask) require_same_grid(g, mask->grid());
  const int n = g.n();
  double peak = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double w = mask ? (*mask)(i, j) : 1.0;
      if (w > 0.0) peak = std::max(peak, mag(i, j));
    }
  if (std::isinf(p) || peak == 0.0) return peak;
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double w = mask ? (*mask)(i, j) : 1.0;
      if (w > 0.0) acc += w * std::pow(mag(i, j) / peak, p);
    }
  return peak * std::pow(acc * g.cell_area(), 1.0 / p);
}

}  // namespace

// ---- ScalarField2D -------------------------------------------------------

ScalarField2D::ScalarField2D(const Grid2D& grid, double value) : grid_(grid), data_(grid.size(), value) {}

ScalarField2D& ScalarField2D::operator+=(const ScalarField2D& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
  return *this;
}
ScalarField2D& ScalarField2D::operator-=(const ScalarField2D& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
  return *this;
}
ScalarField2D& ScalarField2D::operator*=(double s) {
  for (double& x : data_) x *= s;
  return *this;
}

// ---- VectorField2D -------------------------------------------------------

VectorField2D::VectorField2D(const Grid2D& grid, Vec2 value)
    : grid_(grid), u_(grid.size(), value.x), v_(grid.size(), value.y) {}

VectorField2D VectorField2D::sample(const Grid2D& grid, const std::function<Vec2(Vec2)>& f) {
  VectorField2D out(grid);
  const int n = grid.n();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      out.u(i, j) = f(grid.xface(i, j)).x;
      out.v(i, j) = f(grid.yface(i, j)).y;
    }
  return out;
}

Vec2 VectorField2D::center_value(int i, int j) const {
  return {0.5 * (uw(i, j) + uw(i + 1, j)), 0.5 * (vw(i, j) + vw(i, j + 1))};
}

VectorField2D& VectorField2D::operator+=(const VectorField2D& o) { return axpy(1.0, o); }
VectorField2D& VectorField2D::operator-=(const VectorField2D& o) { return axpy(-1.0, o); }
VectorField2D& VectorField2D::operator*=(double s) {
  for (double& x : u_) x *= s;
  for (double& x : v_) x *= s;
  return *this;
}
VectorField2D& VectorField2D::axpy(double s, const VectorField2D& o) {
  require_same_grid(grid_, o.grid_);
  for (std::size_t k = 0; k < u_.size(); ++k) {
    u_[k] += s * o.u_[k];
    v_[k] += s * o.v_[k];
  }
  return *this;
}

VectorField2D operator+(VectorField2D a, const VectorField2D& b) { return a += b; }
VectorField2D operator-(VectorField2D a, const VectorField2D& b) { return a -= b; }
VectorField2D operator*(double s, VectorField2D a) { return a *= s; }

TensorField2D::TensorField2D(const Grid2D& g)
    : grid(g), xx(g.size(), 0.0), xy(g.size(), 0.0), yx(g.size(), 0.0), yy(g.size(), 0.0) {}

// ---- RegionMask ----------------------------------------------------------

RegionMask::RegionMask(const Grid2D& grid, double value) : grid_(grid), data_(grid.size(), value) {
  if (value < 0.0 || value > 1.0) throw Error("RegionMask: values must lie in [0, 1]");
}

double disk_coverage(const Grid2D& grid, Vec2 p, double box, Vec2 center, double radius) {
  const Vec2 d = grid.min_image(p - center);
  const double half_diag = box * std::sqrt(0.5);
  const double dist = norm(d);
  if (dist + half_diag <= radius) return 1.0;
  if (dist - half_diag >= radius) return 0.0;
  int inside = 0;
  const double r2 = radius * radius;
  for (int b = 0; b < 4; ++b)
    for (int a = 0; a < 4; ++a) {
      const double sx = d.x + (a + 0.5) * box / 4.0 - 0.5 * box;
      const double sy = d.y + (b + 0.5) * box / 4.0 - 0.5 * box;
      if (sx * sx + sy * sy < r2) ++inside;
    }
  return inside / 16.0;
}

RegionMask RegionMask::disk(const Grid2D& grid, Vec2 center, double radius) {
  RegionMask m(grid);
  const int n = grid.n();
  const double h = grid.spacing();
  const Vec2 c = grid.wrap(center);
  const int reach = static_cast<int>(std::ceil(radius / h)) + 2;
  const int ic = static_cast<int>(std::floor(c.x / h));
  const int jc = static_cast<int>(std::floor(c.y / h));
  if (2 * reach + 1 >= n) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m(i, j) = disk_coverage(grid, grid.center(i, j), h, c, radius);
    return m;
  }
  for (int j = jc - reach; j <= jc + reach; ++j)
    for (int i = ic - reach; i <= ic + reach; ++i)
      m(grid.wrap(i), grid.wrap(j)) = disk_coverage(grid, grid.center(i, j), h, c, radius);
  return m;
}

RegionMask RegionMask::disk_complement(const Grid2D& grid, Vec2 center, double radius) {
  RegionMask m = disk(grid, center, radius);
  for (double& x : m.data_) x = 1.0 - x;
  return m;
}

double RegionMask::area() const {
  double s = 0.0;
  for (double x : data_) s += x;
  return s * grid_.cell_area();
}

// ---- operators -----------------------------------------------------------

ScalarField2D divergence(const VectorField2D& v) {
  const Grid2D& g = v.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  ScalarField2D out(g);
  for (int j = 0; j < n; ++j) {
    const int jp = j + 1 == n ? 0 : j + 1;
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      out(i, j) = (v.u(ip, j) - v.u(i, j)) * inv_h + (v.v(i, jp) - v.v(i, j)) * inv_h;
    }
  }
  return out;
}

VectorField2D gradient(const ScalarField2D& s) {
  const Grid2D& g = s.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  VectorField2D out(g);
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    for (int i = 0; i < n; ++i) {
      const int im = i == 0 ? n - 1 : i - 1;
      out.u(i, j) = (s(i, j) - s(im, j)) * inv_h;
      out.v(i, j) = (s(i, j) - s(i, jm)) * inv_h;
    }
  }
  return out;
}

namespace {
void five_point(const Grid2D& g, const std::vector<double>& in, std::vector<double>& out) {
  const int n = g.n();
  const double inv_h2 = 1.0 / g.cell_area();
  for (int j = 0; j < n; ++j) {
    const int jm = j == 0 ? n - 1 : j - 1;
    const int jp = j + 1 == n ? 0 : j + 1;
    for (int i = 0; i < n; ++i) {
      const int im = i == 0 ? n - 1 : i - 1;
      const int ip = i + 1 == n ? 0 : i + 1;
      out[g.index(i, j)] = (in[g.index(ip, j)] + in[g.index(im, j)] + in[g.index(i, jp)] + in[g.index(i, jm)] -
                            4.0 * in[g.index(i, j)]) *
                           inv_h2;
    }
  }
}
}  // namespace

ScalarField2D laplacian(const ScalarField2D& s) {
  ScalarField2D out(s.grid());
  five_point(s.grid(), s.data(), out.data());
  return out;
}

VectorField2D laplacian(const VectorField2D& v) {
  VectorField2D out(v.grid());
  five_point(v.grid(), v.u_data(), out.u_data());
  five_point(v.grid(), v.v_data(), out.v_data());
  return out;
}

TensorField2D velocity_gradient(const VectorField2D& v) {
  const Grid2D& g = v.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  TensorField2D t(g);
  auto uc = [&](int i, int j) { return 0.5 * (v.uw(i, j) + v.uw(i + 1, j)); };
  auto vc = [&](int i, int j) { return 0.5 * (v.vw(i, j) + v.vw(i, j + 1)); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const std::size_t k = g.index(i, j);
      t.xx[k] = (v.uw(i + 1, j) - v.u(i, j)) * inv_h;
      t.yy[k] = (v.vw(i, j + 1) - v.v(i, j)) * inv_h;
      t.xy[k] = (uc(i, j + 1) - uc(i, j - 1)) * 0.5 * inv_h;
      t.yx[k] = (vc(i + 1, j) - vc(i - 1, j)) * 0.5 * inv_h;
    }
  return t;
}

TensorField2D symmetric_gradient(const VectorField2D& v) {
  TensorField2D t = velocity_gradient(v);
  for (std::size_t k = 0; k < t.xy.size(); ++k) {
    const double s = 0.5 * (t.xy[k] + t.yx[k]);
    t.xy[k] = s;
    t.yx[k] = s;
  }
  return t;
}

VectorField2D advection_term(const VectorField2D& v) {
  const Grid2D& g = v.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  VectorField2D out(g);
  // x-momentum at x-faces, y-momentum at y-faces; fluxes at centers and nodes.
  auto uc = [&](int i, int j) { return 0.5 * (v.uw(i, j) + v.uw(i + 1, j)); };
  auto vc = [&](int i, int j) { return 0.5 * (v.vw(i, j) + v.vw(i, j + 1)); };
  auto un = [&](int i, int j) { return 0.5 * (v.uw(i, j - 1) + v.uw(i, j)); };
  auto vn = [&](int i, int j) { return 0.5 * (v.vw(i - 1, j) + v.vw(i, j)); };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double ucc = uc(i, j), ucm = uc(i - 1, j);
      const double fu = (ucc * ucc - ucm * ucm) * inv_h +
                        (un(i, j + 1) * vn(i, j + 1) - un(i, j) * vn(i, j)) * inv_h;
      const double vcc = vc(i, j), vcm = vc(i, j - 1);
      const double fv = (un(i + 1, j) * vn(i + 1, j) - un(i, j) * vn(i, j)) * inv_h +
                        (vcc * vcc - vcm * vcm) * inv_h;
      out.u(i, j) = fu;
      out.v(i, j) = fv;
    }
  return out;
}

double lp_norm(const ScalarField2D& f, double p, const RegionMask* mask) {
  return masked_lp(f.grid(), p, mask, [&](int i, int j) { return std::abs(f(i, j)); });
}

double lp_norm(const VectorField2D& v, double p, const RegionMask* mask) {
  return masked_lp(v.grid(), p, mask, [&](int i, int j) { return norm(v.center_value(i, j)); });
}

double lp_norm(const TensorField2D& t, double p, const RegionMask* mask) {
  const Grid2D& g = t.grid;
  return masked_lp(g, p, mask, [&](int i, int j) {
    const std::size_t k = g.index(i, j);
    return std::sqrt(t.xx[k] * t.xx[k] + t.xy[k] * t.xy[k] + t.yx[k] * t.yx[k] + t.yy[k] * t.yy[k]);
  });
}

double strain_energy(const VectorField2D& v) {
  const Grid2D& g = v.grid();
  const int n = g.n();
  const double inv_h = 1.0 / g.spacing();
  double centers = 0.0, nodes = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double ux = (v.uw(i + 1, j) - v.u(i, j)) * inv_h;
      const double vy = (v.vw(i, j + 1) - v.v(i, j)) * inv_h;
      centers += ux * ux + vy * vy;
      const double shear = (v.u(i, j) - v.uw(i, j - 1)) * inv_h + (v.v(i, j) - v.vw(i - 1, j)) * inv_h;
      nodes += shear * shear;
    }
  return (centers + 0.5 * nodes) * g.cell_area();
}

double face_energy(const VectorField2D& v) {
  double s = 0.0;
  for (double x : v.u_data()) s += x * x;
  for (double x : v.v_data()) s += x * x;
  return s * v.grid().cell_area();
}

double max_abs(const ScalarField2D& f) {
  double m = 0.0;
  for (double x : f.data()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs(const VectorField2D& v) {
  double m = 0.0;
  for (double x : v.u_data()) m = std::max(m, std::abs(x));
  for (double x : v.v_data()) m = std::max(m, std::abs(x));
  return m;
}

Vec2 interpolate(const VectorField2D& v, Vec2 point) {
  const Grid2D& g = v.grid();
  const Vec2 p = g.wrap(point);
  const double h = g.spacing();
  auto bilinear = [&](double fx, double fy, bool xcomp) {
    const double fx0 = std::floor(fx), fy0 = std::floor(fy);
    const int i0 = static_cast<int>(fx0), j0 = static_cast<int>(fy0);
    const double tx = fx - fx0, ty = fy - fy0;
    auto at = [&](int i, int j) { return xcomp ? v.uw(i, j) : v.vw(i, j); };
    return (1 - tx) * (1 - ty) * at(i0, j0) + tx * (1 - ty) * at(i0 + 1, j0) + (1 - tx) * ty * at(i0, j0 + 1) +
           tx * ty * at(i0 + 1, j0 + 1);
  };
  return {bilinear(p.x / h, p.y / h - 0.5, true), bilinear(p.x / h - 0.5, p.y / h, false)};
}

Vec2 momentum(const VectorField2D& v) {
  double sx = 0.0, sy = 0.0;
  for (double x : v.u_data()) sx += x;
  for (double x : v.v_data()) sy += x;
  const double a = v.grid().cell_area();
  return {sx * a, sy * a};
}

}  // namespace rigidlim
