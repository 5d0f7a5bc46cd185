#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "zpcc/boe.hpp"

using namespace zpcc;

namespace {

OccupancyDescriptor make_desc(std::mt19937_64& rng) {
  std::vector<uint8_t> q1(64), q2(64);
  for (auto& s : q1) s = uint8_t(rng() % 16);
  for (auto& s : q2) s = uint8_t(rng() % 16);
  return descriptor(q1, q2);
}

}  // namespace

TEST_CASE("descriptor places the two stage histograms") {
  const std::vector<uint8_t> q1{0}, q2{15};
  const OccupancyDescriptor h = descriptor(q1, q2);
  CHECK(h[0] == doctest::Approx(0.5));
  CHECK(h[31] == doctest::Approx(0.5));
  for (int i = 1; i < 31; ++i) CHECK(h[i] == 0.0);
}

TEST_CASE("descriptor hand count over six symbols") {
  const std::vector<uint8_t> q1{0, 0, 15}, q2{3, 3, 3};
  const OccupancyDescriptor h = descriptor(q1, q2);
  CHECK(h[0] == doctest::Approx(2.0 / 6));
  CHECK(h[15] == doctest::Approx(1.0 / 6));
  CHECK(h[16 + 3] == doctest::Approx(3.0 / 6));
}

TEST_CASE("descriptor always sums to one") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const OccupancyDescriptor h = make_desc(rng);
    double sum = 0.0;
    for (double v : h) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("descriptor is invariant to repeating the symbol multiset") {
  std::vector<uint8_t> q1{1, 5, 5, 9}, q2{0, 2, 2, 15};
  const OccupancyDescriptor h1 = descriptor(q1, q2);
  std::vector<uint8_t> q1m, q2m;
  for (int rep = 0; rep < 7; ++rep) {
    q1m.insert(q1m.end(), q1.begin(), q1.end());
    q2m.insert(q2m.end(), q2.begin(), q2.end());
  }
  const OccupancyDescriptor h2 = descriptor(q1m, q2m);
  for (int i = 0; i < 32; ++i) CHECK(h1[i] == doctest::Approx(h2[i]).epsilon(1e-12));
}

TEST_CASE("descriptor rejects empty or mismatched input") {
  CHECK_THROWS_AS(descriptor({}, {}), std::invalid_argument);
  const std::vector<uint8_t> a{1}, b{1, 2};
  CHECK_THROWS_AS(descriptor(a, b), std::invalid_argument);
}

TEST_CASE("fit_centers with K=1 returns the componentwise mean") {
  std::mt19937_64 rng(5);
  std::vector<OccupancyDescriptor> descs;
  for (int i = 0; i < 20; ++i) descs.push_back(make_desc(rng));
  const BoECenters centers = fit_centers(descs, 1, 42);
  REQUIRE(centers.pool_size() == 1);
  for (int d = 0; d < 32; ++d) {
    double mean = 0.0;
    for (const auto& h : descs) mean += h[d];
    mean /= descs.size();
    CHECK(double(centers.centers[0][d]) == doctest::Approx(mean).epsilon(1e-6));
  }
}

TEST_CASE("fit_centers separates two tight blobs") {
  std::mt19937_64 rng(7);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  std::vector<OccupancyDescriptor> descs;
  OccupancyDescriptor blob_a{}, blob_b{};
  blob_a[0] = 0.9;
  blob_a[16] = 0.1;
  blob_b[15] = 0.9;
  blob_b[31] = 0.1;
  for (int i = 0; i < 40; ++i) {
    OccupancyDescriptor h = i % 2 == 0 ? blob_a : blob_b;
    // separation >> spread
    const double eps = (uniform() - 0.5) * 1e-8;
    h[0] += eps;
    h[15] -= eps;
    descs.push_back(h);
  }
  const BoECenters centers = fit_centers(descs, 2, 1);
  REQUIRE(centers.pool_size() == 2);
  int matched = 0;
  for (const auto& c : centers.centers) {
    if (std::abs(double(c[0]) - 0.9) < 1e-6) ++matched;
    if (std::abs(double(c[15]) - 0.9) < 1e-6) ++matched;
  }
  CHECK(matched == 2);
}

TEST_CASE("fit_centers centers sum to one") {
  std::mt19937_64 rng(11);
  std::vector<OccupancyDescriptor> descs;
  for (int i = 0; i < 60; ++i) descs.push_back(make_desc(rng));
  const BoECenters centers = fit_centers(descs, 5, 9);
  for (const auto& c : centers.centers) {
    double sum = 0.0;
    for (float v : c) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("fit_centers is deterministic under a fixed seed") {
  std::mt19937_64 rng(13);
  std::vector<OccupancyDescriptor> descs;
  for (int i = 0; i < 30; ++i) descs.push_back(make_desc(rng));
  const BoECenters a = fit_centers(descs, 3, 77);
  const BoECenters b = fit_centers(descs, 3, 77);
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 32; ++d) CHECK(a.centers[c][d] == b.centers[c][d]);
}

TEST_CASE("fit_centers requires enough descriptors") {
  std::mt19937_64 rng(17);
  std::vector<OccupancyDescriptor> descs{make_desc(rng)};
  CHECK_THROWS_AS(fit_centers(descs, 2, 0), std::invalid_argument);
}

TEST_CASE("selection policy: shallow levels bypass to the base network") {
  BoECenters centers;
  centers.centers.resize(3);
  OccupancyDescriptor d{};
  d[0] = 1.0;
  for (int b = 2; b <= 6; ++b) CHECK(select_network(b, &d, centers) == 0);
  CHECK_THROWS_AS(select_network(9, nullptr, centers), std::invalid_argument);
}

TEST_CASE("selection picks the exact nearest center") {
  BoECenters centers;
  centers.centers.resize(3);
  for (auto& c : centers.centers) c.fill(0.0f);
  centers.centers[0][0] = 1.0f;
  centers.centers[1][1] = 1.0f;
  centers.centers[2][2] = 1.0f;

  OccupancyDescriptor h{};
  h[1] = 1.0;  // equals center 1 exactly
  CHECK(select_network(9, &h, centers) == 2);  // index is 1 + argmin
}

TEST_CASE("selection ties break toward the lowest center index") {
  BoECenters centers;
  centers.centers.resize(3);
  for (auto& c : centers.centers) c.fill(0.0f);
  // centers 0 and 2 are equidistant from h; center 1 is far away
  centers.centers[0][0] = 1.0f;
  centers.centers[2][1] = 1.0f;
  centers.centers[1][5] = 8.0f;

  OccupancyDescriptor h{};
  h[0] = 0.5;
  h[1] = 0.5;
  CHECK(select_network(10, &h, centers) == 1);
}
