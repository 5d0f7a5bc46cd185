#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "zpcc/hierarchy.hpp"
#include "zpcc/ply.hpp"

using namespace zpcc;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("zpcc_test_" + name);
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

}  // namespace

TEST_CASE("read_ply parses ASCII vertices in file order") {
  const auto path = temp_file("ascii.ply");
  write_text(path,
             "ply\nformat ascii 1.0\ncomment test\n"
             "element vertex 3\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n"
             "1 2 3\n4.5 5 6\n-1 -2 -3\n");
  const RawCloud cloud = read_ply(path.string());
  REQUIRE(cloud.count() == 3);
  CHECK(cloud.points[0] == Vec3d{1, 2, 3});
  CHECK(cloud.points[1] == Vec3d{4.5, 5, 6});
  CHECK(cloud.points[2] == Vec3d{-1, -2, -3});
}

TEST_CASE("read_ply recovers binary float32 bitwise") {
  const auto path = temp_file("bin.ply");
  std::ofstream out(path, std::ios::binary);
  out << "ply\nformat binary_little_endian 1.0\n"
      << "element vertex 2\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "end_header\n";
  const float vals[6] = {1.25f, -2.5f, 3.75f, 0.1f, 1e-8f, 12345.678f};
  out.write(reinterpret_cast<const char*>(vals), sizeof(vals));
  out.close();

  const RawCloud cloud = read_ply(path.string());
  REQUIRE(cloud.count() == 2);
  for (int i = 0; i < 2; ++i)
    for (int d = 0; d < 3; ++d)
      CHECK(cloud.points[i][d] == double(vals[i * 3 + d]));
}

TEST_CASE("read_ply reports truncated payloads distinctly") {
  const auto path = temp_file("trunc.ply");
  write_text(path,
             "ply\nformat ascii 1.0\nelement vertex 5\n"
             "property float x\nproperty float y\nproperty float z\n"
             "end_header\n1 2 3\n4 5 6\n7 8 9\n10 11 12\n");
  CHECK_THROWS_WITH_AS(read_ply(path.string()),
                       doctest::Contains("truncated payload"), std::runtime_error);
}

TEST_CASE("read_ply reports malformed headers and unsupported types") {
  const auto bad = temp_file("bad.ply");
  write_text(bad, "not_a_ply\n");
  CHECK_THROWS_WITH_AS(read_ply(bad.string()), doctest::Contains("malformed header"),
                       std::runtime_error);

  const auto big_endian = temp_file("be.ply");
  write_text(big_endian,
             "ply\nformat binary_big_endian 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\nend_header\n");
  CHECK_THROWS_WITH_AS(read_ply(big_endian.string()),
                       doctest::Contains("unsupported format"), std::runtime_error);

  const auto list_prop = temp_file("list.ply");
  write_text(list_prop,
             "ply\nformat ascii 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nproperty float z\n"
             "property list uchar int vertex_indices\nend_header\n1 2 3 0\n");
  CHECK_THROWS_WITH_AS(read_ply(list_prop.string()),
                       doctest::Contains("unsupported property type"),
                       std::runtime_error);

  const auto no_xyz = temp_file("noxyz.ply");
  write_text(no_xyz,
             "ply\nformat ascii 1.0\nelement vertex 1\n"
             "property float x\nproperty float y\nend_header\n1 2\n");
  CHECK_THROWS_WITH_AS(read_ply(no_xyz.string()), doctest::Contains("x/y/z"),
                       std::runtime_error);
}

TEST_CASE("read_ply skips non-position vertex properties") {
  const auto path = temp_file("extra.ply");
  write_text(path,
             "ply\nformat ascii 1.0\nelement vertex 2\n"
             "property float intensity\nproperty float x\nproperty float y\n"
             "property float z\nproperty uchar red\nend_header\n"
             "9 1 2 3 255\n8 4 5 6 128\n");
  const RawCloud cloud = read_ply(path.string());
  REQUIRE(cloud.count() == 2);
  CHECK(cloud.points[0] == Vec3d{1, 2, 3});
  CHECK(cloud.points[1] == Vec3d{4, 5, 6});
}

TEST_CASE("quantize scales by step from the origin") {
  RawCloud cloud;
  cloud.points = {{0.0010, 0.0, 0.0}};
  const QuantizedCloud q = quantize(cloud, 8, Vec3d{0, 0, 0}, 0.001);
  REQUIRE(q.count() == 1);
  CHECK(q.coords[0] == Coord{1, 0, 0});
}

TEST_CASE("quantize merges duplicate voxels and reports the count") {
  RawCloud cloud;
  cloud.points = {{0.1, 0.1, 0.1}, {0.12, 0.1, 0.1}, {0.9, 0.9, 0.9}};
  QuantizeStats stats;
  const QuantizedCloud q = quantize(cloud, 4, Vec3d{0, 0, 0}, 0.5, &stats);
  CHECK(q.count() == 2);
  CHECK(stats.merged_duplicates == 1);
  CHECK(stats.input_points == 3);
}

TEST_CASE("quantize rejects out-of-range points with the offending index") {
  RawCloud cloud;
  cloud.points = {{0.1, 0.1, 0.1}, {100.0, 0.0, 0.0}};
  CHECK_THROWS_WITH_AS(quantize(cloud, 4, Vec3d{0, 0, 0}, 0.5),
                       doctest::Contains("point 1"), std::runtime_error);
}

TEST_CASE("quantize of 1000 random points matches the sort oracle") {
  std::mt19937_64 rng(19);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  RawCloud cloud;
  for (int i = 0; i < 1000; ++i)
    cloud.points.push_back(Vec3d{uniform(), uniform(), uniform()});

  const double step = std::pow(2.0, -10);
  const QuantizedCloud q = quantize(cloud, 10, Vec3d{0, 0, 0}, step);

  // independent oracle: naive bit-interleaved codes, sort, dedup
  std::vector<uint64_t> codes;
  for (const auto& p : cloud.points) {
    uint64_t code = 0;
    for (int k = 0; k < 10; ++k) {
      code |= uint64_t((uint32_t(p[0] / step) >> k) & 1) << (3 * k);
      code |= uint64_t((uint32_t(p[1] / step) >> k) & 1) << (3 * k + 1);
      code |= uint64_t((uint32_t(p[2] / step) >> k) & 1) << (3 * k + 2);
    }
    codes.push_back(code);
  }
  std::sort(codes.begin(), codes.end());
  codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

  REQUIRE(q.count() == codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i)
    CHECK(morton_code(q.coords[i]) == codes[i]);
}

TEST_CASE("quantize defaults fit the bounding box") {
  std::mt19937_64 rng(43);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  RawCloud cloud;
  for (int i = 0; i < 200; ++i)
    cloud.points.push_back(
        Vec3d{uniform() * 50 - 25, uniform() * 80 - 40, uniform() * 3});
  for (int b : {4, 10, 16}) {
    const QuantizedCloud q = quantize(cloud, b);
    const uint32_t limit = uint32_t((uint64_t(1) << b) - 1);
    for (const Coord& c : q.coords)
      for (int d = 0; d < 3; ++d) CHECK(c[d] <= limit);
  }
}

TEST_CASE("quantize is idempotent on voxel-aligned input") {
  std::mt19937_64 rng(47);
  RawCloud cloud;
  for (int i = 0; i < 300; ++i)
    cloud.points.push_back(Vec3d{double(rng() % 4096) * 0.001,
                                 double(rng() % 4096) * 0.001,
                                 double(rng() % 4096) * 0.001});
  const QuantizedCloud q1 = quantize(cloud, 12, Vec3d{0, 0, 0}, 0.001);

  RawCloud dequantized;
  for (const Coord& c : q1.coords)
    dequantized.points.push_back(dequantize_point(q1, c));
  const QuantizedCloud q2 = quantize(dequantized, 12, q1.origin, q1.step);
  CHECK(q1.coords == q2.coords);
}

TEST_CASE("write_ply then read_ply preserves the voxel set") {
  QuantizedCloud cloud;
  cloud.bit_depth = 6;
  cloud.origin = {1.5, -2.0, 0.25};
  cloud.step = 0.125;
  cloud.coords = {{0, 0, 0}, {5, 1, 2}, {63, 63, 63}};

  for (bool ascii : {false, true}) {
    const auto path = temp_file(ascii ? "rt_a.ply" : "rt_b.ply");
    write_ply(cloud, path.string(), ascii);
    const RawCloud raw = read_ply(path.string());
    const QuantizedCloud back = quantize(raw, 6, cloud.origin, cloud.step);
    CHECK(back.coords == cloud.coords);
  }
}

TEST_CASE("write_ply recovers full-range corner voxels exactly") {
  QuantizedCloud cloud;
  cloud.bit_depth = 12;
  cloud.origin = {0, 0, 0};
  cloud.step = 0.001;
  cloud.coords = {{0, 0, 0}, {4095, 4095, 4095}};
  const auto path = temp_file("corners.ply");
  write_ply(cloud, path.string());
  const QuantizedCloud back =
      quantize(read_ply(path.string()), 12, cloud.origin, cloud.step);
  CHECK(back.coords == cloud.coords);
}

TEST_CASE("write_ply refuses empty clouds") {
  QuantizedCloud cloud;
  cloud.bit_depth = 4;
  const auto path = temp_file("empty.ply");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_ply(cloud, path.string()), std::invalid_argument);
  CHECK(!std::filesystem::exists(path));
}

TEST_CASE("quantize output satisfies all invariants on random clouds") {
  std::mt19937_64 rng(53);
  auto uniform = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 20; ++trial) {
    RawCloud cloud;
    const int n = 50 + int(rng() % 500);
    for (int i = 0; i < n; ++i)
      cloud.points.push_back(Vec3d{uniform() * 10, uniform() * 10, uniform() * 10});
    const int b = 4 + int(rng() % 8);
    const QuantizedCloud q = quantize(cloud, b);

    const uint64_t limit = uint64_t(1) << b;
    uint64_t prev = 0;
    for (std::size_t i = 0; i < q.coords.size(); ++i) {
      for (int d = 0; d < 3; ++d) CHECK(q.coords[i][d] < limit);
      const uint64_t code = morton_code(q.coords[i]);
      if (i > 0) CHECK(code > prev);
      prev = code;
    }
  }
}
