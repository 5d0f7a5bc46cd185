#include "zpcc/boe.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace zpcc {

OccupancyDescriptor descriptor(std::span<const uint8_t> q1,
                               std::span<const uint8_t> q2) {
  if (q1.empty() || q1.size() != q2.size())
    throw std::invalid_argument("descriptor: stage symbol lists must be equal and non-empty");
  OccupancyDescriptor h{};
  for (uint8_t s : q1) h[s] += 1.0;
  for (uint8_t s : q2) h[16 + s] += 1.0;
  const double norm = 2.0 * static_cast<double>(q1.size());
  for (double& v : h) v /= norm;
  return h;
}

namespace {

double sq_dist(const OccupancyDescriptor& a, const double* b) {
  double d = 0.0;
  for (int i = 0; i < 32; ++i) {
    const double t = a[i] - b[i];
    d += t * t;
  }
  return d;
}

}  // namespace

BoECenters fit_centers(std::span<const OccupancyDescriptor> descriptors, int k,
                       uint64_t seed) {
  const std::size_t n = descriptors.size();
  if (k < 1) throw std::invalid_argument("fit_centers: k must be positive");
  if (n < static_cast<std::size_t>(k))
    throw std::invalid_argument("fit_centers: fewer descriptors than centers");

  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  // k-means++ seeding.
  std::vector<std::array<double, 32>> centers(static_cast<std::size_t>(k));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  const std::size_t first = std::min<std::size_t>(n - 1, static_cast<std::size_t>(uniform01() * n));
  for (int i = 0; i < 32; ++i) centers[0][i] = descriptors[first][i];
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = sq_dist(descriptors[i], centers[c - 1].data());
      if (d < d2[i]) d2[i] = d;
      total += d2[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double r = uniform01() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) { pick = i; break; }
      }
    } else {
      pick = std::min<std::size_t>(n - 1, static_cast<std::size_t>(uniform01() * n));
    }
    for (int i = 0; i < 32; ++i) centers[c][i] = descriptors[pick][i];
  }

  // Lloyd iterations.
  std::vector<int> assign(n, 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 100; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(descriptors[i], centers[c].data());
        if (d < best) { best = d; best_c = c; }
      }
      assign[i] = best_c;
      inertia += best;
    }

    std::vector<std::array<double, 32>> sums(static_cast<std::size_t>(k));
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (auto& s : sums) s.fill(0.0);
    for (std::size_t i = 0; i < n; ++i) {
      sizes[assign[i]] += 1;
      for (int d = 0; d < 32; ++d) sums[assign[i]][d] += descriptors[i][d];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] == 0) {
        // Re-seed with the point farthest from its assigned center.
        double far_d = -1.0;
        std::size_t far_i = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sq_dist(descriptors[i], centers[assign[i]].data());
          if (d > far_d) { far_d = d; far_i = i; }
        }
        for (int d = 0; d < 32; ++d) centers[c][d] = descriptors[far_i][d];
        assign[far_i] = c;
      } else {
        for (int d = 0; d < 32; ++d)
          centers[c][d] = sums[c][d] / static_cast<double>(sizes[c]);
      }
    }

    if (prev_inertia - inertia <= 1e-6 * std::max(prev_inertia, 1e-30)) break;
    prev_inertia = inertia;
  }

  BoECenters out;
  out.centers.resize(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c)
    for (int d = 0; d < 32; ++d)
      out.centers[c][d] = static_cast<float>(centers[c][d]);
  return out;
}

int select_network(int level, const OccupancyDescriptor* desc,
                   const BoECenters& centers) {
  if (level <= 6) return 0;
  if (desc == nullptr)
    throw std::invalid_argument("select_network: descriptor required for levels > 6");
  if (centers.centers.empty())
    throw std::invalid_argument("select_network: empty center pool");
  double best = std::numeric_limits<double>::infinity();
  int best_k = 0;
  for (int c = 0; c < centers.pool_size(); ++c) {
    double d = 0.0;
    for (int i = 0; i < 32; ++i) {
      const double t = (*desc)[i] - static_cast<double>(centers.centers[c][i]);
      d += t * t;
    }
    if (d < best) { best = d; best_k = c; }
  }
  return 1 + best_k;
}

}  // namespace zpcc
