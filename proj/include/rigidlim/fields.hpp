#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "rigidlim/grid.hpp"

namespace rigidlim {

/// Cell-centered scalar samples.
class ScalarField2D {
 public:
  explicit ScalarField2D(const Grid2D& grid, double value = 0.0);

  const Grid2D& grid() const { return grid_; }
  double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
  double at(int i, int j) const { return data_[grid_.wrapped_index(i, j)]; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  ScalarField2D& operator+=(const ScalarField2D& o);
  ScalarField2D& operator-=(const ScalarField2D& o);
  ScalarField2D& operator*=(double s);

 private:
  Grid2D grid_;
  std::vector<double> data_;
};

/// Staggered velocity: x component on x-faces, y component on y-faces.
class VectorField2D {
 public:
  explicit VectorField2D(const Grid2D& grid, Vec2 value = {});

  /// Samples a closed-form field at the face positions.
  static VectorField2D sample(const Grid2D& grid, const std::function<Vec2(Vec2)>& f);

  const Grid2D& grid() const { return grid_; }
  double& u(int i, int j) { return u_[grid_.index(i, j)]; }
  double u(int i, int j) const { return u_[grid_.index(i, j)]; }
  double& v(int i, int j) { return v_[grid_.index(i, j)]; }
  double v(int i, int j) const { return v_[grid_.index(i, j)]; }
  double uw(int i, int j) const { return u_[grid_.wrapped_index(i, j)]; }
  double vw(int i, int j) const { return v_[grid_.wrapped_index(i, j)]; }
  std::vector<double>& u_data() { return u_; }
  const std::vector<double>& u_data() const { return u_; }
  std::vector<double>& v_data() { return v_; }
  const std::vector<double>& v_data() const { return v_; }
  /// Component c (0 = x, 1 = y) storage.
  std::vector<double>& component(int c) { return c == 0 ? u_ : v_; }
  const std::vector<double>& component(int c) const { return c == 0 ? u_ : v_; }

  /// Cell-center reconstruction (average of the two faces per component).
  Vec2 center_value(int i, int j) const;

  VectorField2D& operator+=(const VectorField2D& o);
  VectorField2D& operator-=(const VectorField2D& o);
  VectorField2D& operator*=(double s);
  /// this += s * o
  VectorField2D& axpy(double s, const VectorField2D& o);

 private:
  Grid2D grid_;
  std::vector<double> u_;
  std::vector<double> v_;
};

VectorField2D operator+(VectorField2D a, const VectorField2D& b);
VectorField2D operator-(VectorField2D a, const VectorField2D& b);
VectorField2D operator*(double s, VectorField2D a);

/// Cell-centered 2x2 tensor, components stored separately.
struct TensorField2D {
  explicit TensorField2D(const Grid2D& grid);
  Grid2D grid;
  std::vector<double> xx, xy, yx, yy;
};

/// Indicator samples in [0, 1] per cell (fractional on cut cells).
class RegionMask {
 public:
  explicit RegionMask(const Grid2D& grid, double value = 0.0);

  /// Coverage of the disk B_radius(center) with 4x4 sub-cell sampling.
  static RegionMask disk(const Grid2D& grid, Vec2 center, double radius);
  /// 1 - disk: the fluid-region proxy.
  static RegionMask disk_complement(const Grid2D& grid, Vec2 center, double radius);

  const Grid2D& grid() const { return grid_; }
  double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
  const std::vector<double>& data() const { return data_; }
  double area() const;

 private:
  Grid2D grid_;
  std::vector<double> data_;
};

/// Fraction of the axis-aligned box of side `box` centered at `p` that lies in
/// the disk, by 4x4 midpoint sub-sampling. Distances use the periodic image.
double disk_coverage(const Grid2D& grid, Vec2 p, double box, Vec2 center, double radius);

// Differential operators. All are second-order centered and periodic.

ScalarField2D divergence(const VectorField2D& v);
/// Face-located gradient of a cell-centered scalar (the negative adjoint of divergence).
VectorField2D gradient(const ScalarField2D& s);
ScalarField2D laplacian(const ScalarField2D& s);
/// Componentwise 5-point Laplacian on the staggered layout.
VectorField2D laplacian(const VectorField2D& v);
/// Full velocity gradient at cell centers: xx = d_x u, xy = d_y u, yx = d_x v, yy = d_y v.
TensorField2D velocity_gradient(const VectorField2D& v);
/// D(v) = (grad v + grad v^T) / 2 at cell centers.
TensorField2D symmetric_gradient(const VectorField2D& v);
/// Conservative staggered discretization of DIV(u (x) u).
VectorField2D advection_term(const VectorField2D& v);

/// (sum mask |f|^p h^2)^(1/p); p = infinity gives the masked max.
double lp_norm(const ScalarField2D& f, double p, const RegionMask* mask = nullptr);
/// Norm of the cell-center reconstruction |v|.
double lp_norm(const VectorField2D& v, double p, const RegionMask* mask = nullptr);
/// Frobenius magnitude per cell.
double lp_norm(const TensorField2D& t, double p, const RegionMask* mask = nullptr);

/// int |D(v)|^2 with diagonal strain at centers and shear at nodes. For
/// discretely solenoidal v, 2 * strain_energy(v) equals the face-difference
/// Dirichlet energy, so 4 nu * strain_energy is the exact viscous dissipation rate.
double strain_energy(const VectorField2D& v);

/// Face-sum quadrature of |v|^2 (the norm in which projection is orthogonal).
double face_energy(const VectorField2D& v);
double max_abs(const ScalarField2D& f);
double max_abs(const VectorField2D& v);

/// Bilinear interpolation of each staggered component at a point (periodic wrap).
Vec2 interpolate(const VectorField2D& v, Vec2 point);

/// Sum over faces of h^2 * component: the discrete momentum.
Vec2 momentum(const VectorField2D& v);

}  // namespace rigidlim
