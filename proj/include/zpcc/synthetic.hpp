#pragma once

#include <cstdint>

#include "zpcc/types.hpp"

namespace zpcc {

// Deterministic LiDAR-like scan: concentric ground-plane rings around the
// origin with fixed points per ring (so areal density falls off as 1/r),
// Gaussian vertical noise, and box obstacles standing on the ground for
// rings >= 8 (one box per 8 rings). Pure function of its arguments.
RawCloud gen_ring_scan(int rings, int points_per_ring, double noise,
                       uint64_t seed);

}  // namespace zpcc
