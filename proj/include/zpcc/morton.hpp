#pragma once

#include <cstdint>

#include "zpcc/types.hpp"

namespace zpcc {

namespace detail {

// Spreads the low 21 bits of v so that bit k lands at bit 3k.
inline uint64_t spread3(uint64_t v) {
  v &= 0x1fffff;
  v = (v | v << 32) & 0x1f00000000ffff;
  v = (v | v << 16) & 0x1f0000ff0000ff;
  v = (v | v << 8) & 0x100f00f00f00f00f;
  v = (v | v << 4) & 0x10c30c30c30c30c3;
  v = (v | v << 2) & 0x1249249249249249;
  return v;
}

inline uint64_t compact3(uint64_t v) {
  v &= 0x1249249249249249;
  v = (v ^ (v >> 2)) & 0x10c30c30c30c30c3;
  v = (v ^ (v >> 4)) & 0x100f00f00f00f00f;
  v = (v ^ (v >> 8)) & 0x1f0000ff0000ff;
  v = (v ^ (v >> 16)) & 0x1f00000000ffff;
  v = (v ^ (v >> 32)) & 0x1fffff;
  return v;
}

}  // namespace detail

// Interleaves (x, y, z): bit k of x lands at code bit 3k, y at 3k+1, z at 3k+2.
uint64_t morton_encode(const Coord& c, int bit_depth);

// Inverse of morton_encode.
Coord morton_decode(uint64_t code, int bit_depth);

// Unchecked variant for hot loops; components must fit kMaxBitDepth bits.
inline uint64_t morton_code(const Coord& c) {
  return detail::spread3(c[0]) | detail::spread3(c[1]) << 1 |
         detail::spread3(c[2]) << 2;
}

}  // namespace zpcc
