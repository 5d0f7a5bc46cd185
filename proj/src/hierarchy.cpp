#include "zpcc/hierarchy.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cassert>
#include <stdexcept>

namespace zpcc {

namespace {

std::atomic<uint64_t> g_sort_counter{0};

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

const std::array<std::array<uint8_t, 8>, 256>& octant_bit_table() {
  static const auto table = [] {
    std::array<std::array<uint8_t, 8>, 256> t{};
    for (int o = 0; o < 256; ++o)
      for (int u = 0; u < 8; ++u) t[o][u] = static_cast<uint8_t>((o >> u) & 1);
    return t;
  }();
  return table;
}

uint64_t sort_counter() { return g_sort_counter.load(); }
void reset_sort_counter() { g_sort_counter.store(0); }

LevelState initial_sort(std::span<const Coord> coords, int bit_depth) {
  if (coords.empty()) throw std::invalid_argument("initial_sort: empty input");
  const uint32_t limit =
      bit_depth >= 32 ? 0xffffffffu : (1u << bit_depth);
  std::vector<std::pair<uint64_t, uint32_t>> keyed(coords.size());
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const Coord& c = coords[i];
    if (c[0] >= limit || c[1] >= limit || c[2] >= limit)
      throw std::invalid_argument("initial_sort: coordinate out of range");
    keyed[i] = {morton_code(c), static_cast<uint32_t>(i)};
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  g_sort_counter.fetch_add(1);

  LevelState out;
  out.level = bit_depth;
  out.coords.reserve(coords.size());
  uint64_t prev = ~uint64_t(0);
  for (const auto& [code, idx] : keyed) {
    if (code != prev) out.coords.push_back(coords[idx]);
    prev = code;
  }
  return out;
}

std::pair<LevelState, OccupancySymbols> coarsen(const LevelState& level) {
  if (level.level < 3) throw std::invalid_argument("coarsen: level must be >= 3");
  if (level.coords.empty()) throw std::invalid_argument("coarsen: empty level");

  LevelState parent;
  parent.level = level.level - 1;
  OccupancySymbols labels;

  Coord prev{0, 0, 0};
  bool have_prev = false;
  for (const Coord& c : level.coords) {
    const Coord p{c[0] >> 1, c[1] >> 1, c[2] >> 1};
    const uint8_t bit = static_cast<uint8_t>((c[0] & 1) | ((c[1] & 1) << 1) |
                                             ((c[2] & 1) << 2));
    if (!have_prev || p != prev) {
      parent.coords.push_back(p);
      labels.octant.push_back(0);
      prev = p;
      have_prev = true;
    }
    labels.octant.back() |= static_cast<uint8_t>(1u << bit);
  }

  labels.stage1.resize(labels.octant.size());
  labels.stage2.resize(labels.octant.size());
  for (std::size_t i = 0; i < labels.octant.size(); ++i) {
    labels.stage1[i] = labels.octant[i] & 15;
    labels.stage2[i] = labels.octant[i] >> 4;
  }
  return {std::move(parent), std::move(labels)};
}

OctantMask occupancy_mask(std::span<const uint8_t> octants) {
  const auto& table = octant_bit_table();
  OctantMask mask;
  mask.rows.resize(octants.size());
  for (std::size_t i = 0; i < octants.size(); ++i) {
    if (octants[i] == 0)
      throw std::invalid_argument("occupancy_mask: zero octant byte");
    mask.rows[i] = table[octants[i]];
  }
  return mask;
}

LevelState expand_children(const LevelState& parent, const OccupancySymbols& labels) {
  assert(parent.coords.size() == labels.octant.size());
  const auto& table = octant_bit_table();
  LevelState child;
  child.level = parent.level + 1;
  std::size_t total = 0;
  for (uint8_t o : labels.octant) total += std::popcount(o);
  child.coords.reserve(total);
  for (std::size_t i = 0; i < parent.coords.size(); ++i) {
    const Coord& p = parent.coords[i];
    const auto& bits = table[labels.octant[i]];
    const uint32_t x = p[0] << 1, y = p[1] << 1, z = p[2] << 1;
    for (int u = 0; u < 8; ++u) {
      if (bits[u])
        child.coords.push_back(Coord{x + (u & 1), y + ((u >> 1) & 1),
                                     z + ((u >> 2) & 1)});
    }
  }
  return child;
}

CoordIndex::CoordIndex(const LevelState& level) {
  std::size_t cap = 16;
  while (cap < level.coords.size() * 2) cap <<= 1;
  keys_.assign(cap, ~uint64_t(0));
  vals_.assign(cap, -1);
  mask_ = cap - 1;
  for (std::size_t i = 0; i < level.coords.size(); ++i) {
    const uint64_t code = morton_code(level.coords[i]);
    uint64_t slot = splitmix64(code) & mask_;
    while (keys_[slot] != ~uint64_t(0)) slot = (slot + 1) & mask_;
    keys_[slot] = code;
    vals_[slot] = static_cast<int32_t>(i);
  }
}

int32_t CoordIndex::find_code(uint64_t code) const {
  if (keys_.empty()) return -1;
  uint64_t slot = splitmix64(code) & mask_;
  while (true) {
    if (keys_[slot] == code) return vals_[slot];
    if (keys_[slot] == ~uint64_t(0)) return -1;
    slot = (slot + 1) & mask_;
  }
}

int32_t CoordIndex::find(const Coord& c) const { return find_code(morton_code(c)); }

double neighbor_average(const LevelState& level, int window) {
  if (window != 2 && window != 3)
    throw std::invalid_argument("neighbor_average: window must be 2 or 3");
  if (level.coords.empty()) return 0.0;

  const CoordIndex index(level);
  const uint32_t limit =
      level.level >= 32 ? 0xffffffffu : (1u << level.level);
  uint64_t total = 0;
  for (const Coord& c : level.coords) {
    if (window == 2) {
      // Other corners of the point's own 2x2x2 octant block.
      const uint32_t bx = c[0] & ~1u, by = c[1] & ~1u, bz = c[2] & ~1u;
      for (int u = 0; u < 8; ++u) {
        const Coord q{bx + (u & 1), by + ((u >> 1) & 1), bz + ((u >> 2) & 1)};
        if (q == c) continue;
        if (index.find(q) >= 0) ++total;
      }
    } else {
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dz = -1; dz <= 1; ++dz) {
            if (dx == 0 && dy == 0 && dz == 0) continue;
            const int64_t x = int64_t(c[0]) + dx, y = int64_t(c[1]) + dy,
                          z = int64_t(c[2]) + dz;
            if (x < 0 || y < 0 || z < 0 || x >= limit || y >= limit || z >= limit)
              continue;
            if (index.find(Coord{uint32_t(x), uint32_t(y), uint32_t(z)}) >= 0)
              ++total;
          }
    }
  }
  return static_cast<double>(total) / static_cast<double>(level.coords.size());
}

void explicit_resort(LevelState& level) {
  std::sort(level.coords.begin(), level.coords.end(),
            [](const Coord& a, const Coord& b) {
              return morton_code(a) < morton_code(b);
            });
  g_sort_counter.fetch_add(1);
}

}  // namespace zpcc
