#pragma once

#include <memory>

#include "rigidlim/fields.hpp"

namespace rigidlim {

/// FFT-backed periodic solves on one grid. The symbols used are those of the
/// discrete 5-point Laplacian, so projection is exact for the staggered
/// divergence and commutes with the diffusion factor.
///
/// Not thread-safe per instance; create one per thread.
class SpectralOps {
 public:
  explicit SpectralOps(const Grid2D& grid);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  const Grid2D& grid() const { return grid_; }

  /// Removes the discrete gradient part of v in place. Returns the potential phi
  /// with v_out = v_in - grad(phi).
  ScalarField2D project(VectorField2D& v);
  /// v <- exp(nu_dt * Laplacian) v, componentwise.
  void diffuse(VectorField2D& v, double nu_dt);
  /// Solves Laplacian(phi) = rhs for zero-mean phi (the mean of rhs is dropped).
  ScalarField2D solve_poisson(const ScalarField2D& rhs);

 private:
  void forward(const std::vector<double>& in);
  void backward(std::vector<double>& out);

  Grid2D grid_;
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::vector<double> symbol_;  // Laplacian eigenvalue per retained mode
};

/// Convenience: Leray projection of a copy.
VectorField2D leray_project(const VectorField2D& v);

}  // namespace rigidlim
