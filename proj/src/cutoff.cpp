#include "rigidlim/cutoff.hpp"

namespace rigidlim {

Cutoff::Cutoff(double eps) : eps_(eps) {
  if (!(eps > 0.0)) throw Error("Cutoff: eps must be positive");
}

double Cutoff::profile(double s) {
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double Cutoff::profile_derivative(double s) {
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const double t = s - 1.0;
  return -30.0 * t * t * (1.0 - t) * (1.0 - t);
}

Vec2 Cutoff::gradient(Vec2 rel) const {
  const double r = norm(rel);
  if (r == 0.0) return {};
  const double d = profile_derivative(r / eps_) / eps_;
  return (d / r) * rel;
}

}  // namespace rigidlim
