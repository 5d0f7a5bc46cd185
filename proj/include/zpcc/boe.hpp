#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace zpcc {

// Normalized 32-bin concatenation of the stage-1 and stage-2 symbol
// histograms of one level.
using OccupancyDescriptor = std::array<double, 32>;

struct BoECenters {
  std::vector<std::array<float, 32>> centers;  // K x 32

  int pool_size() const { return static_cast<int>(centers.size()); }
};

// Histograms q1 into bins 0..15 and q2 into 16..31, divided by 2N.
OccupancyDescriptor descriptor(std::span<const uint8_t> q1,
                               std::span<const uint8_t> q2);

// Lloyd's K-means with seeded k-means++ initialization. Runs at most 100
// iterations or until the relative inertia change drops below 1e-6; empty
// clusters are re-seeded with the point farthest from its assigned center.
BoECenters fit_centers(std::span<const OccupancyDescriptor> descriptors, int k,
                       uint64_t seed);

// Selection policy: levels b <= 6 route to the base network (index 0);
// deeper levels pick 1 + argmin_k ||h - mu_k||_2, ties to the lowest k.
int select_network(int level, const OccupancyDescriptor* desc,
                   const BoECenters& centers);

}  // namespace zpcc
