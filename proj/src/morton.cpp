#include "zpcc/morton.hpp"

#include <stdexcept>
#include <string>

namespace zpcc {

uint64_t morton_encode(const Coord& c, int bit_depth) {
  if (bit_depth < 1 || bit_depth > kMaxBitDepth)
    throw std::invalid_argument("morton: bit depth out of range");
  const uint32_t limit = 1u << bit_depth;
  for (int a = 0; a < 3; ++a) {
    if (c[a] >= limit)
      throw std::invalid_argument("morton: component " + std::to_string(c[a]) +
                                  " out of range for bit depth " +
                                  std::to_string(bit_depth));
  }
  return morton_code(c);
}

Coord morton_decode(uint64_t code, int bit_depth) {
  if (bit_depth < 1 || bit_depth > kMaxBitDepth)
    throw std::invalid_argument("morton: bit depth out of range");
  if (bit_depth < kMaxBitDepth && code >= (uint64_t(1) << (3 * bit_depth)))
    throw std::invalid_argument("morton: code out of range for bit depth " +
                                std::to_string(bit_depth));
  return Coord{static_cast<uint32_t>(detail::compact3(code)),
               static_cast<uint32_t>(detail::compact3(code >> 1)),
               static_cast<uint32_t>(detail::compact3(code >> 2))};
}

}  // namespace zpcc
