#pragma once

#include "rigidlim/geometry.hpp"

namespace rigidlim {

/// Radial cut-off eta_eps(x) = eta(|x| / eps): 1 on B_eps, 0 outside B_2eps,
/// quintic smoothstep in between (C^2 across both junctions).
class Cutoff {
 public:
  explicit Cutoff(double eps);

  double eps() const { return eps_; }
  /// Reference profile eta(s), s = |x| / eps.
  static double profile(double s);
  /// d eta / ds.
  static double profile_derivative(double s);

  double value(Vec2 rel) const { return profile(norm(rel) / eps_); }
  Vec2 gradient(Vec2 rel) const;

 private:
  double eps_;
};

}  // namespace rigidlim
