#include <stdexcept>
#include <cmath>
#include <random>

#include "doctest.h"
#include "zpcc/context_model.hpp"
#include "zpcc/range_coder.hpp"

using namespace zpcc;

namespace {

LevelState make_state(int level, std::vector<Coord> coords) {
  LevelState s;
  s.level = level;
  s.coords = std::move(coords);
  return s;
}

}  // namespace

TEST_CASE("first prediction of any cell is uniform") {
  BaselineModel model;
  model.begin_level(5, make_state(5, {{0, 0, 0}, {3, 2, 1}}), 0);
  float row[16];
  model.predict_row(1, 0, 0, row);
  for (int i = 0; i < 16; ++i) CHECK(row[i] == doctest::Approx(1.0f / 16));
}

TEST_CASE("after absorbing symbol 3 once, Laplace gives 2/17") {
  BaselineModel model;
  model.begin_level(4, make_state(4, {{0, 0, 0}, {0, 0, 0}}), 0);
  model.absorb_row(1, 0, 0, 3);
  float row[16];
  model.predict_row(1, 1, 0, row);
  for (int i = 0; i < 16; ++i)
    CHECK(row[i] == doctest::Approx(i == 3 ? 2.0f / 17 : 1.0f / 17));
}

TEST_CASE("contexts are separated by parity and stage-1 symbol") {
  BaselineModel model;
  model.begin_level(6, make_state(6, {{0, 0, 0}, {1, 0, 0}}), 0);
  // absorb into parity-0 stage-1 cell only
  model.absorb_row(1, 0, 0, 5);
  float row[16];
  model.predict_row(1, 1, 0, row);  // parity 1: untouched, still uniform
  CHECK(row[5] == doctest::Approx(1.0f / 16));

  // stage 2 cells keyed by the stage-1 symbol
  model.absorb_row(2, 0, 7, 9);
  model.predict_row(2, 0, 7, row);
  CHECK(row[9] == doctest::Approx(2.0f / 17));
  model.predict_row(2, 0, 8, row);
  CHECK(row[9] == doctest::Approx(1.0f / 16));
}

TEST_CASE("constant stream: mean bits over the last 500 symbols < 0.3") {
  const std::size_t n = 1000;
  BaselineModel model;
  model.begin_level(7, make_state(7, std::vector<Coord>(n, Coord{0, 0, 0})), 0);

  // analytic Laplace code length, then the measured quantized one
  double analytic_tail_bits = 0.0;
  for (std::size_t t = 500; t < n; ++t)
    analytic_tail_bits += -std::log2(double(t + 1) / double(t + 16));
  CHECK(analytic_tail_bits / 500.0 < 0.3);

  std::vector<uint8_t> symbols(n, 4);
  const ProbabilityTable table = model.predict_stage(1, {}, symbols);
  ProbabilityTable quantized = table;
  quantize_probs(quantized);
  double measured_tail = 0.0;
  for (std::size_t t = 500; t < n; ++t)
    measured_tail += -std::log2(double(quantized.qrow(t)[4]) / kProbTotal);
  CHECK(measured_tail / 500.0 < 0.3);
}

TEST_CASE("table prediction equals the row-wise decoder path bitwise") {
  std::mt19937_64 rng(61);
  const std::size_t n = 400;
  std::vector<Coord> coords(n);
  for (auto& c : coords) c = {uint32_t(rng() % 64), uint32_t(rng() % 64), uint32_t(rng() % 64)};
  std::vector<uint8_t> q1(n), q2(n);
  for (auto& s : q1) s = uint8_t(rng() % 16);
  for (auto& s : q2) s = uint8_t(rng() % 16);

  // encoder side: pure table prediction, then absorb
  BaselineModel enc;
  enc.begin_level(8, make_state(8, coords), 0);
  const ProbabilityTable t1 = enc.predict_stage(1, {}, q1);
  enc.absorb_stage(1, q1);
  const ProbabilityTable t2 = enc.predict_stage(2, q1, q2);
  enc.absorb_stage(2, q2);

  // decoder side: row-wise prediction with per-symbol updates
  BaselineModel dec;
  dec.begin_level(8, make_state(8, coords), 0);
  float row[16];
  for (std::size_t i = 0; i < n; ++i) {
    dec.predict_row(1, i, 0, row);
    for (int k = 0; k < 16; ++k) CHECK(row[k] == t1.row(i)[k]);
    dec.absorb_row(1, i, 0, q1[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    dec.predict_row(2, i, q1[i], row);
    for (int k = 0; k < 16; ++k) CHECK(row[k] == t2.row(i)[k]);
    dec.absorb_row(2, i, q1[i], q2[i]);
  }

  // identical count state at stream end
  const auto ce = enc.counts();
  const auto cd = dec.counts();
  REQUIRE(ce.size() == cd.size());
  for (std::size_t i = 0; i < ce.size(); ++i) CHECK(ce[i] == cd[i]);
}

TEST_CASE("adaptive coding of a constant stream compresses hard") {
  const std::size_t n = 1000;
  BaselineModel model;
  model.begin_level(9, make_state(9, std::vector<Coord>(n, Coord{0, 0, 0})), 0);
  std::vector<uint8_t> symbols(n, 11);
  ProbabilityTable table = model.predict_stage(1, {}, symbols);
  quantize_probs(table);
  const CodedChunk chunk = encode_symbols(symbols, table);
  // mostly-certain symbols cost a fraction of a bit each
  CHECK(chunk.payload_size() < 200);
  CHECK(decode_symbols(chunk, table) == symbols);
}
