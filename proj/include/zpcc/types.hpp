#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace zpcc {

// Integer voxel coordinate at some bit-depth level.
using Coord = std::array<uint32_t, 3>;

using Vec3d = std::array<double, 3>;

// Coordinates may use at most 21 bits per axis so that a full 3-axis Morton
// code fits in 63 bits.
inline constexpr int kMinBitDepth = 2;
inline constexpr int kMaxBitDepth = 21;

struct RawCloud {
  std::vector<Vec3d> points;

  std::size_t count() const { return points.size(); }
};

// Deduplicated voxel grid, strictly ascending by Morton code.
struct QuantizedCloud {
  std::vector<Coord> coords;
  int bit_depth = 0;
  Vec3d origin{0.0, 0.0, 0.0};
  double step = 1.0;

  std::size_t count() const { return coords.size(); }
};

}  // namespace zpcc
