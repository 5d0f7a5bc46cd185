#include <stdexcept>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "zpcc/codec.hpp"
#include "zpcc/ply.hpp"
#include "zpcc/synthetic.hpp"
#include "zpcc/train.hpp"

using namespace zpcc;

namespace {

QuantizedCloud plane_with_noise(int n_side, int bit_depth, uint64_t seed) {
  std::mt19937_64 rng(seed);
  RawCloud raw;
  for (int i = 0; i < n_side; ++i)
    for (int j = 0; j < n_side; ++j)
      raw.points.push_back(Vec3d{double(i) * 0.05, double(j) * 0.05,
                                 0.5 + double(rng() % 100) * 0.0005});
  return quantize(raw, bit_depth);
}

std::size_t parent_total(const TrainingCloud& cloud) {
  std::size_t total = 0;
  for (const auto& level : cloud.levels) total += level.state.count();
  return total;
}

}  // namespace

TEST_CASE("perfect one-hot predictions cost zero bits") {
  nn::Matrix<double> probs(3, 16);
  std::vector<uint8_t> targets{2, 7, 15};
  for (std::size_t n = 0; n < 3; ++n) probs.row(n)[targets[n]] = 1.0;
  CHECK(nn::xent_bits<double>(probs, targets, nullptr) == 0.0);
}

TEST_CASE("a zero-initialized pool predicts exactly 8 bits per parent") {
  std::mt19937_64 rng(3);
  std::vector<Coord> coords(500);
  for (auto& c : coords)
    c = {uint32_t(rng() % 256), uint32_t(rng() % 256), uint32_t(rng() % 256)};
  QuantizedCloud cloud;
  cloud.bit_depth = 8;
  cloud.coords = initial_sort(coords, 8).coords;

  const TrainingCloud prepared = prepare_cloud(cloud, BoECenters{});
  std::vector<nn::CodingNetwork<float>> nets(1, nn::CodingNetwork<float>(8));
  const double loss = nn::progressive_forward<float>(nets, prepared, nullptr);
  CHECK(loss == doctest::Approx(8.0 * double(parent_total(prepared))).epsilon(1e-9));
}

TEST_CASE("training is deterministic under a fixed seed") {
  const QuantizedCloud cloud = quantize(gen_ring_scan(8, 96, 0.03, 5), 8);
  TrainConfig config;
  config.steps = 8;
  config.dim = 4;
  config.pool = 0;
  config.seed = 21;

  const ModelPool a = train({cloud}, config);
  const ModelPool b = train({cloud}, config);
  CHECK(serialize_model(a) == serialize_model(b));
  CHECK(a.digest == b.digest);
}

TEST_CASE("train rejects bad configurations") {
  const QuantizedCloud cloud = quantize(gen_ring_scan(4, 32, 0.0, 1), 6);
  TrainConfig config;
  config.steps = 0;
  CHECK_THROWS_AS(train({cloud}, config), std::invalid_argument);
  config.steps = 1;
  config.pool = 3;  // B=6 has no levels above 6 to fit BoE on
  CHECK_THROWS_AS(train({cloud}, config), std::invalid_argument);
  CHECK_THROWS_AS(train({}, config), std::invalid_argument);
}

TEST_CASE("trained model files load back identically and still decode") {
  const QuantizedCloud cloud = quantize(gen_ring_scan(10, 128, 0.02, 31), 9);
  TrainConfig config;
  config.steps = 12;
  config.dim = 4;
  config.pool = 1;
  config.seed = 4;
  const ModelPool pool = train({cloud}, config);

  const auto path = std::string("/tmp/zpcc_test_model.zpcm");
  save_model(pool, path);
  const ModelPool loaded = load_model(path);
  CHECK(loaded.dim == pool.dim);
  CHECK(loaded.pool_size() == pool.pool_size());
  CHECK(loaded.digest == pool.digest);
  CHECK(serialize_model(loaded) == serialize_model(pool));

  const EncodeResult enc = encode(cloud, ModelRef::neural(pool));
  const QuantizedCloud back = decode(enc.container, ModelRef::neural(loaded));
  CHECK(back.coords == cloud.coords);
}

TEST_CASE("short training run reduces the loss") {
  const QuantizedCloud cloud = quantize(gen_ring_scan(12, 160, 0.02, 77), 9);
  TrainConfig config;
  config.steps = 60;
  config.dim = 8;
  config.pool = 0;
  config.seed = 13;

  TrainResult result;
  (void)train({cloud}, config, &result);
  REQUIRE(int(result.loss_bits.size()) == config.steps);
  const double head =
      std::accumulate(result.loss_bits.begin(), result.loss_bits.begin() + 10, 0.0) / 10.0;
  const double tail =
      std::accumulate(result.loss_bits.end() - 10, result.loss_bits.end(), 0.0) / 10.0;
  CHECK(tail < head);
  for (double v : result.loss_bits) CHECK(std::isfinite(v));
}

TEST_CASE("500 steps on a plane+noise cloud beat the uniform bound by 15%") {
  const QuantizedCloud cloud = plane_with_noise(28, 9, 3);
  TrainConfig config;
  config.steps = 500;
  config.dim = 8;
  config.pool = 0;
  config.seed = 2;

  TrainResult result;
  (void)train({cloud}, config, &result);

  const TrainingCloud prepared = prepare_cloud(cloud, BoECenters{});
  const double uniform_bits = 8.0 * double(parent_total(prepared));
  const double final_loss =
      std::accumulate(result.loss_bits.end() - 10, result.loss_bits.end(), 0.0) / 10.0;
  CHECK(final_loss < 0.85 * uniform_bits);
}
