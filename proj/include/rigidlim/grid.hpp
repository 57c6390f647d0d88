#pragma once

#include "rigidlim/geometry.hpp"

namespace rigidlim {

/// Uniform periodic square grid with a staggered (MAC) layout.
///
/// Cell (i, j) spans [i h, (i+1) h] x [j h, (j+1) h]. Scalars live at cell
/// centers, the x velocity component on x-faces (i h, (j + 1/2) h) and the y
/// component on y-faces ((i + 1/2) h, j h). Storage is row-major in j.
class Grid2D {
 public:
  Grid2D(int cells_per_side, double box_side);

  int n() const { return n_; }
  double side() const { return side_; }
  double spacing() const { return h_; }
  double cell_area() const { return h_ * h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * n_ + i; }
  std::size_t wrapped_index(int i, int j) const { return index(wrap(i), wrap(j)); }
  int wrap(int i) const {
    const int r = i % n_;
    return r < 0 ? r + n_ : r;
  }

  Vec2 center(int i, int j) const { return {(i + 0.5) * h_, (j + 0.5) * h_}; }
  Vec2 xface(int i, int j) const { return {i * h_, (j + 0.5) * h_}; }
  Vec2 yface(int i, int j) const { return {(i + 0.5) * h_, j * h_}; }

  /// Maps a position into [0, L)^2.
  Vec2 wrap(Vec2 p) const;
  /// Shortest periodic representative of a displacement.
  Vec2 min_image(Vec2 d) const;

  bool operator==(const Grid2D& o) const { return n_ == o.n_ && side_ == o.side_; }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }

 private:
  int n_;
  double side_;
  double h_;
};

/// Throws if two grids differ.
void require_same_grid(const Grid2D& a, const Grid2D& b);

}  // namespace rigidlim
