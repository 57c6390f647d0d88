#pragma once

#include <functional>
#include <vector>

#include "rigidlim/bogovskii.hpp"
#include "rigidlim/fields.hpp"
#include "rigidlim/stats.hpp"

namespace rigidlim {

/// Value of component c (0: x-face, 1: y-face) of a staggered field at lattice face (i, j).
using FaceSampler = std::function<double(int component, int i, int j)>;

/// R_eps[phi] evaluated on the lattice window around the body.
///
/// With eta the cut-off (1 on B_eps, 0 outside B_2eps) and phibar = phi(center):
///   X = (1 - eta) phi + eta phibar,   R = X - B_eps[div X].
/// R equals phibar on B_eps, phi outside B_2eps, and is discretely solenoidal
/// whenever phi is.
struct LocalRestriction {
  AnnulusMesh mesh;
  Vec2 body_value;
  PatchField phi;
  PatchField blended;
  PatchField correction;
  PatchField restricted;
  double bogovskii_residual = 0.0;

  /// R - phi on the window (zero outside it).
  PatchField difference() const;
};

struct RestrictionOptions {
  /// Minimum cells across the annulus gap.
  double min_resolution = 16.0;
  /// Allowed mean of the Bogovskii argument relative to its rms; the mean is a
  /// sum of the input's own divergence residuals.
  double mean_tol = 1e-8;
};

LocalRestriction restrict_local(const FaceSampler& phi, const Lattice& lattice, double eps, Vec2 center,
                                Vec2 body_value, const RestrictionOptions& opts = {});

struct RestrictionResult {
  VectorField2D field;
  Vec2 body_value;
  /// max |div R| * h / ||phi||_inf over the grid.
  double divergence_residual = 0.0;
  /// max over faces in the closed B_eps(center) of |R - phibar|.
  double rigidity_residual = 0.0;
};

/// Relative solenoidality threshold for inputs: max |div phi| * h <= kDivTol * ||phi||_inf.
inline constexpr double kDivTol = 1e-10;

/// Restriction of a solenoidal grid field around `center`. phibar is the
/// bilinear interpolant of phi at the center.
RestrictionResult restrict_field(const VectorField2D& phi, double eps, Vec2 center, const RestrictionOptions& opts = {});

/// The four error norms of the restriction estimates for one (eps, p).
struct RestrictionNorms {
  double eps = 0.0;
  double p = 0.0;
  double err_lp = 0.0;           // ||R phi - phi||_p
  double err_grad_lp = 0.0;      // ||grad R phi - grad phi||_p
  double err_lp_eta = 0.0;       // ||R phi - (1 - eta) phi||_p
  double err_grad_lp_eta = 0.0;  // ||grad R phi - (1 - eta) grad phi||_p
};

RestrictionNorms restriction_norms(const LocalRestriction& r, double p);

struct ScalingStudy {
  double p = 0.0;
  double theoretical_slope = 0.0;  // d / p
  std::vector<RestrictionNorms> rows;
  SlopeFit slope_lp, slope_grad_lp, slope_lp_eta, slope_grad_lp_eta;
};

/// Evaluates the restriction of a closed-form solenoidal field for each eps on
/// a lattice with `cells_per_eps` cells across eps, then fits log-log slopes.
ScalingStudy restriction_scaling_study(const std::function<Vec2(Vec2)>& phi, double p,
                                       const std::vector<double>& eps_list, Vec2 center, int cells_per_eps = 16);

/// Face sampler of a closed-form field on a lattice.
FaceSampler sampler_from_function(const std::function<Vec2(Vec2)>& phi, const Lattice& lattice);

}  // namespace rigidlim
