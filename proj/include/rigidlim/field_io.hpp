#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rigidlim/fields.hpp"

namespace rigidlim {

/// Contents of a binary field dump: little-endian header
/// {"RGLM", version u32, N u32, L f64, ncomp u32} followed by ncomp blocks of
/// N*N row-major f64 samples.
struct FieldDump {
  static constexpr std::uint32_t kVersion = 1;
  std::uint32_t n = 0;
  double side = 0.0;
  std::vector<std::vector<double>> components;
};

void write_field_dump(const std::string& path, const ScalarField2D& f);
void write_field_dump(const std::string& path, const VectorField2D& v);
FieldDump read_field_dump(const std::string& path);

/// CSV rows (x, y, c0[, c1]) at each sample's own staggered position is not
/// meaningful for mixed layouts, so vectors are exported at cell centers.
void write_field_csv(const std::string& path, const VectorField2D& v);
void write_field_csv(const std::string& path, const ScalarField2D& f);

}  // namespace rigidlim
