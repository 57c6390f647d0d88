#include "rigidlim/grid.hpp"

#include <cmath>

namespace rigidlim {

Grid2D::Grid2D(int cells_per_side, double box_side)
    : n_(cells_per_side), side_(box_side), h_(box_side / cells_per_side) {
  if (cells_per_side < 16 || cells_per_side % 2 != 0)
    throw Error("Grid2D: cells_per_side must be even and >= 16, got " + std::to_string(cells_per_side));
  if (!(box_side > 0.0) || !std::isfinite(box_side)) throw Error("Grid2D: box side must be positive");
}

Vec2 Grid2D::wrap(Vec2 p) const {
  p.x -= side_ * std::floor(p.x / side_);
  p.y -= side_ * std::floor(p.y / side_);
  // floor can leave p == side_ after rounding
  if (p.x >= side_) p.x -= side_;
  if (p.y >= side_) p.y -= side_;
  return p;
}

Vec2 Grid2D::min_image(Vec2 d) const {
  d.x -= side_ * std::round(d.x / side_);
  d.y -= side_ * std::round(d.y / side_);
  return d;
}

void require_same_grid(const Grid2D& a, const Grid2D& b) {
  if (a != b) throw Error("grid mismatch between field operands");
}

}  // namespace rigidlim
