#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "zpcc/morton.hpp"
#include "zpcc/types.hpp"

namespace zpcc {

// Voxel coordinates of one bit-depth level, strictly ascending by Morton code.
struct LevelState {
  int level = 0;
  std::vector<Coord> coords;

  std::size_t count() const { return coords.size(); }
};

// Per-parent occupancy labels. octant is the 8-bit child pattern O in [1,255];
// stage1/stage2 are its low/high 4-bit halves, O = 16*stage2 + stage1.
struct OccupancySymbols {
  std::vector<uint8_t> octant;
  std::vector<uint8_t> stage1;
  std::vector<uint8_t> stage2;

  std::size_t count() const { return octant.size(); }
};

// One 0/1 row of 8 octant flags per parent, row n = bit pattern of octant n.
struct OctantMask {
  std::vector<std::array<uint8_t, 8>> rows;
};

// 256-entry lookup table mapping an octant byte to its 8 occupancy flags;
// entry[o][u] == (o >> u) & 1.
const std::array<std::array<uint8_t, 8>, 256>& octant_bit_table();

// Number of coordinate-order sorts performed since the last reset. The codec
// sorts exactly once (in initial_sort); the bench-only explicit_resort path
// also counts here.
uint64_t sort_counter();
void reset_sort_counter();

// Sorts by Morton code and removes duplicates. The only sort in the codec.
LevelState initial_sort(std::span<const Coord> coords, int bit_depth);

// Halves coordinates to produce the parent level plus per-parent labels.
// Equal halved coords are contiguous (halving is a 3-bit right shift of the
// code), so deduplication is a run-length scan; no sorting, no hashing.
std::pair<LevelState, OccupancySymbols> coarsen(const LevelState& level);

// Expands the per-parent octant bytes into 0/1 rows via octant_bit_table().
OctantMask occupancy_mask(std::span<const uint8_t> octants);

// Enumerates child coordinates 2*c + delta_u in Morton octant order
// (u = dx + 2*dy + 4*dz), keeping those whose occupancy bit is set. Output is
// strictly Morton-ascending by construction.
LevelState expand_children(const LevelState& parent, const OccupancySymbols& labels);

// Copies each parent's feature row to each of its occupied children, in
// expand_children order. parent_rows holds count*dim values, row-major.
template <class T>
std::vector<T> replicate_rows(std::span<const T> parent_rows, std::size_t dim,
                              const OctantMask& mask) {
  std::vector<T> out;
  out.reserve(parent_rows.size());
  const std::size_t n = mask.rows.size();
  for (std::size_t i = 0; i < n; ++i) {
    const T* src = parent_rows.data() + i * dim;
    for (int u = 0; u < 8; ++u) {
      if (mask.rows[i][u]) out.insert(out.end(), src, src + dim);
    }
  }
  return out;
}

// Mean over points of the number of other occupied voxels in the window.
// window 2: the point's own 2x2x2 octant block; window 3: the 3x3x3 cube
// centered at the point. The point itself is never counted.
double neighbor_average(const LevelState& level, int window);

// Open-addressing map from voxel coordinate (keyed by Morton code) to its
// index in a level. Used for sparse-convolution neighbor gathering.
class CoordIndex {
 public:
  CoordIndex() = default;
  explicit CoordIndex(const LevelState& level);

  // Returns the point index or -1 when the voxel is unoccupied.
  int32_t find(const Coord& c) const;
  int32_t find_code(uint64_t code) const;

 private:
  std::vector<uint64_t> keys_;
  std::vector<int32_t> vals_;
  uint64_t mask_ = 0;
};

// Bench-only: re-sorts an (already sorted) level to emulate pipelines that
// sort at every transition. Bumps the sort counter; result is unchanged.
void explicit_resort(LevelState& level);

}  // namespace zpcc
