#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>
#include <vector>

#include "rigidlim/geometry.hpp"

namespace rigidlim {

/// Uniform lattice in the plane: node (i, j) sits at origin + (i h, j h).
/// Same face/center conventions as Grid2D, without periodicity.
struct Lattice {
  Vec2 origin{};
  double h = 1.0;

  Vec2 xface(int i, int j) const { return {origin.x + i * h, origin.y + (j + 0.5) * h}; }
  Vec2 yface(int i, int j) const { return {origin.x + (i + 0.5) * h, origin.y + j * h}; }
  Vec2 center(int i, int j) const { return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h}; }
};

/// Face values on a rectangular window of a lattice (x-faces in u, y-faces in v).
struct PatchField {
  std::vector<double> u, v;
};

/// The annulus B_2r(c) \ B_r(c) resolved on a lattice window.
///
/// Unknown (active) faces are those strictly inside the open annulus; the
/// constraint cells are the cells owning at least one active face. Every
/// non-active face is held at zero, which is the discrete zero trace.
class AnnulusMesh {
 public:
  /// Meshes below `min_resolution` cells across the gap are rejected.
  AnnulusMesh(const Lattice& lattice, Vec2 center, double inner_radius, double min_resolution = 16.0);
  /// Unit annulus B_2 \ B_1 centered on a lattice node, `resolution` cells across the gap.
  static AnnulusMesh reference(int resolution);
  /// Reference mesh scaled by eps: the lattice spacing is eps / resolution.
  static AnnulusMesh scaled(int resolution, double eps);

  const Lattice& lattice() const { return lattice_; }
  Vec2 center() const { return center_; }
  double inner_radius() const { return inner_; }
  /// Cells across the gap (inner_radius / h).
  double resolution() const { return inner_ / lattice_.h; }

  int i0() const { return i0_; }
  int j0() const { return j0_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t cells() const { return static_cast<std::size_t>(nx_) * ny_; }
  /// Local (window) index of global lattice cell/face (i, j); the window covers
  /// the outer disk plus a two-cell margin.
  bool in_window(int i, int j) const { return i >= i0_ && i < i0_ + nx_ && j >= j0_ && j < j0_ + ny_; }
  std::size_t local(int i, int j) const { return static_cast<std::size_t>(j - j0_) * nx_ + (i - i0_); }

  /// Unknown number of an x/y face, -1 if inactive. Local window indexing.
  int xface_unknown(std::size_t k) const { return xface_id_[k]; }
  int yface_unknown(std::size_t k) const { return yface_id_[k]; }
  /// Constraint number of a cell, -1 if not a constraint cell.
  int cell_constraint(std::size_t k) const { return cell_id_[k]; }
  std::size_t num_face_unknowns() const { return n_faces_; }
  std::size_t num_constraint_cells() const { return n_cells_; }

  /// Cut-off weight eta at an x/y face or center (local index), classified
  /// consistently with face activity: exactly 1 on the closed inner disk,
  /// exactly 0 outside the open outer disk.
  double xface_weight(std::size_t k) const { return xweight_[k]; }
  double yface_weight(std::size_t k) const { return yweight_[k]; }
  double center_weight(std::size_t k) const { return cweight_[k]; }
  /// Whether the x/y face / center lies in the closed inner disk.
  bool xface_inner(std::size_t k) const { return xweight_[k] == 1.0 && xface_id_[k] < 0; }
  bool yface_inner(std::size_t k) const { return yweight_[k] == 1.0 && yface_id_[k] < 0; }
  /// Whether the x/y face lies on or outside the outer circle.
  bool xface_outer(std::size_t k) const { return xouter_[k] != 0; }
  bool yface_outer(std::size_t k) const { return youter_[k] != 0; }
  bool center_in_annulus(std::size_t k) const { return cannulus_[k] != 0; }

  /// Window divergence of a face field at cell k (local); faces outside the window read as 0.
  double divergence(const PatchField& f, std::size_t k) const;

  // Norms on the window (zero extension outside).
  double l2_cells(const std::vector<double>& f) const;
  double l2_faces(const PatchField& f) const;
  double gradient_l2(const PatchField& f) const;
  /// L^p of the cell-center magnitude of a face field.
  double lp_faces(const PatchField& f, double p) const;

  PatchField zero_faces() const { return {std::vector<double>(cells(), 0.0), std::vector<double>(cells(), 0.0)}; }

 private:
  Lattice lattice_;
  Vec2 center_;
  double inner_;
  int i0_ = 0, j0_ = 0, nx_ = 0, ny_ = 0;
  std::vector<int> xface_id_, yface_id_, cell_id_;
  std::vector<double> xweight_, yweight_, cweight_;
  std::vector<char> xouter_, youter_, cannulus_;
  std::size_t n_faces_ = 0, n_cells_ = 0;
};

struct BogovskiiSolution {
  PatchField field;
  /// ||div B[f] - f||_L2 / ||f||_L2 over the constraint cells.
  double residual = 0.0;
  /// max |B[f]| over non-active faces (the discrete boundary trace).
  double trace_max = 0.0;
};

/// Minimum discrete-H1-seminorm left inverse of the divergence on an
/// AnnulusMesh with zero boundary trace. The saddle-point matrix is factored
/// once at construction; solves are const and may run concurrently.
class BogovskiiSolver {
 public:
  explicit BogovskiiSolver(AnnulusMesh mesh);

  const AnnulusMesh& mesh() const { return mesh_; }

  /// f: values per window cell (only constraint cells are read). A mean
  /// |mean| <= mean_tol * rms(f) is projected out silently, larger means throw.
  BogovskiiSolution solve(const std::vector<double>& f, double mean_tol = 1e-12) const;
  /// B[div F] for a face field with zero normal trace on the annulus boundary.
  BogovskiiSolution solve_divergence_form(const PatchField& F, double trace_tol = 1e-8) const;

  /// Samples a closed-form scalar at the constraint cells (0 elsewhere).
  std::vector<double> sample_cells(const std::function<double(Vec2)>& f) const;
  /// Removes the discrete mean over the constraint cells.
  std::vector<double> remove_mean(std::vector<double> f) const;

 private:
  AnnulusMesh mesh_;
  std::shared_ptr<Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>> lu_;
  std::vector<std::size_t> constraint_cells_;  // local cell index per constraint
};

/// Zero-mean random band-limited scalar on the annulus: a sum of plane waves
/// with wave numbers |k| <= max_wavenumber (in units of 1/inner_radius).
std::vector<double> random_annulus_source(const BogovskiiSolver& solver, unsigned long long seed,
                                          double max_wavenumber = 3.0, int modes = 8);

}  // namespace rigidlim
