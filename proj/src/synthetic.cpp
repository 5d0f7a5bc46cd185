#include "zpcc/synthetic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace zpcc {

namespace {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Box-Muller on explicit uniforms: the draw sequence is pinned, unlike
  // std::normal_distribution.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

RawCloud gen_ring_scan(int rings, int points_per_ring, double noise,
                       uint64_t seed) {
  if (rings < 1 || points_per_ring < 1)
    throw std::invalid_argument("gen_ring_scan: rings and points_per_ring must be positive");

  Rng rng(seed);
  RawCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(rings) * points_per_ring);

  constexpr double kInnerRadius = 2.0;
  constexpr double kRingSpacing = 0.5;

  for (int ring = 0; ring < rings; ++ring) {
    const double radius = kInnerRadius + kRingSpacing * ring;
    for (int i = 0; i < points_per_ring; ++i) {
      const double angle = 2.0 * M_PI * i / points_per_ring;
      const double jitter = noise > 0.0 ? rng.normal() * noise : 0.0;
      cloud.points.push_back(Vec3d{radius * std::cos(angle),
                                   radius * std::sin(angle),
                                   noise > 0.0 ? rng.normal() * noise : 0.0});
      // radial jitter keeps rings from aliasing into the same voxels
      if (noise > 0.0) {
        auto& p = cloud.points.back();
        p[0] += jitter * std::cos(angle);
        p[1] += jitter * std::sin(angle);
      }
    }
  }

  // Box obstacles: vertical walls sampled on the four side faces.
  const int boxes = rings / 8;
  const double field = kInnerRadius + kRingSpacing * rings;
  for (int b = 0; b < boxes; ++b) {
    const double cx = (rng.uniform() * 2.0 - 1.0) * field * 0.6;
    const double cy = (rng.uniform() * 2.0 - 1.0) * field * 0.6;
    const double sx = 0.5 + rng.uniform() * 1.5;
    const double sy = 0.5 + rng.uniform() * 1.5;
    const double height = 0.5 + rng.uniform() * 2.0;
    const int face_pts = points_per_ring / 2;
    for (int i = 0; i < face_pts; ++i) {
      const int face = static_cast<int>(rng.uniform() * 4.0) & 3;
      const double u = rng.uniform() * 2.0 - 1.0;
      const double z = rng.uniform() * height;
      double x = cx, y = cy;
      switch (face) {
        case 0: x += sx; y += u * sy; break;
        case 1: x -= sx; y += u * sy; break;
        case 2: y += sy; x += u * sx; break;
        default: y -= sy; x += u * sx; break;
      }
      cloud.points.push_back(Vec3d{x, y, z});
    }
  }

  return cloud;
}

}  // namespace zpcc
