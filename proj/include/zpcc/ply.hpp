#pragma once

#include <optional>
#include <string>

#include "zpcc/types.hpp"

namespace zpcc {

// Reads x/y/z vertex positions from an ASCII or binary_little_endian PLY.
// Non-position properties are skipped. Malformed headers, unsupported
// property layouts and truncated payloads are reported as distinct errors.
RawCloud read_ply(const std::string& path);

struct QuantizeStats {
  std::size_t merged_duplicates = 0;
  std::size_t input_points = 0;
};

// Maps each point to floor((p - origin) / step) per axis, rejects anything
// outside [0, 2^bit_depth)^3, merges duplicate voxels and Morton-sorts.
// When origin/step are absent, origin defaults to the per-axis floor of the
// cloud minimum and step to the smallest value that fits the bounding box.
QuantizedCloud quantize(const RawCloud& cloud, int bit_depth,
                        std::optional<Vec3d> origin = std::nullopt,
                        std::optional<double> step = std::nullopt,
                        QuantizeStats* stats = nullptr);

// Writes voxel centers, origin + (c + 0.5) * step, as binary_little_endian
// float64 (or ASCII when ascii is set).
void write_ply(const QuantizedCloud& cloud, const std::string& path,
               bool ascii = false);

// Voxel center of a quantized coordinate in source units.
inline Vec3d dequantize_point(const QuantizedCloud& cloud, const Coord& c) {
  return Vec3d{cloud.origin[0] + (c[0] + 0.5) * cloud.step,
               cloud.origin[1] + (c[1] + 0.5) * cloud.step,
               cloud.origin[2] + (c[2] + 0.5) * cloud.step};
}

}  // namespace zpcc
