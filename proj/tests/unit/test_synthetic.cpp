#include <stdexcept>
#include <cmath>

#include "doctest.h"
#include "zpcc/ply.hpp"
#include "zpcc/synthetic.hpp"

using namespace zpcc;

TEST_CASE("gen_ring_scan is deterministic") {
  const RawCloud a = gen_ring_scan(16, 64, 0.05, 99);
  const RawCloud b = gen_ring_scan(16, 64, 0.05, 99);
  REQUIRE(a.count() == b.count());
  for (std::size_t i = 0; i < a.count(); ++i) CHECK(a.points[i] == b.points[i]);
  const RawCloud c = gen_ring_scan(16, 64, 0.05, 100);
  CHECK(a.points != c.points);
}

TEST_CASE("one noiseless ring of four points sits exactly on a circle") {
  const RawCloud cloud = gen_ring_scan(1, 4, 0.0, 7);
  REQUIRE(cloud.count() == 4);
  for (const auto& p : cloud.points) {
    CHECK(p[2] == 0.0);
    CHECK(std::hypot(p[0], p[1]) == doctest::Approx(2.0).epsilon(1e-12));
  }
  // quadrature positions
  CHECK(cloud.points[0][0] == doctest::Approx(2.0));
  CHECK(cloud.points[1][1] == doctest::Approx(2.0));
}

TEST_CASE("ring scans quantize into valid clouds with areal density falloff") {
  const RawCloud raw = gen_ring_scan(48, 512, 0.02, 424242);
  const QuantizedCloud q = quantize(raw, 12);
  CHECK(q.count() > 10000);

  // points per unit ground area shrink with distance from the sensor
  std::size_t inner = 0, outer = 0;
  for (const auto& p : raw.points) {
    const double r = std::hypot(p[0], p[1]);
    if (r >= 4.0 && r < 8.0) ++inner;
    if (r >= 16.0 && r < 20.0) ++outer;
  }
  const double inner_density = double(inner) / (M_PI * (64.0 - 16.0));
  const double outer_density = double(outer) / (M_PI * (400.0 - 256.0));
  CHECK(inner_density > 2.0 * outer_density);
}
