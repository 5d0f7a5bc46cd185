#pragma once

#include <cstdint>
#include <memory>
#include <span>

#include "zpcc/hierarchy.hpp"
#include "zpcc/prob_table.hpp"

namespace zpcc {

// Per-level stage predictor driven by the codec. Call order per level:
// begin_level -> predict(1) -> absorb(1) -> predict(2) -> absorb(2) ->
// end_level. Predictions are a function of the coordinates and everything
// absorbed so far, so the decoder reproduces them exactly.
class ContextModel {
 public:
  virtual ~ContextModel() = default;

  // net_index is the Bag-of-Encoders selection (0 = base network); models
  // without a pool ignore it.
  virtual void begin_level(int level, const LevelState& state, int net_index) = 0;

  // Full N x 16 stage table. stage1 carries the stage-1 symbols when
  // stage == 2. Adaptive models also receive this stage's true symbols so
  // they can roll their frequency counts forward row by row (row n depends
  // only on truth[0..n)); causal models ignore truth. Pure: does not change
  // model state.
  virtual ProbabilityTable predict_stage(int stage,
                                         std::span<const uint8_t> stage1,
                                         std::span<const uint8_t> truth) = 0;

  virtual void absorb_stage(int stage, std::span<const uint8_t> symbols) = 0;

  // need_propagation is false at the last coded level.
  virtual void end_level(const OccupancySymbols& labels, bool need_propagation) = 0;

  // Adaptive models decode row by row (each row depends on the symbols
  // decoded before it); predict_row/absorb_row back that path.
  virtual bool rowwise() const { return false; }
  virtual void predict_row(int stage, std::size_t n, uint8_t stage1_sym, float* row16);
  virtual void absorb_row(int stage, std::size_t n, uint8_t stage1_sym, uint8_t sym);
};

// Adaptive per-(level, stage, context) frequency model, Laplace-smoothed:
// p_i = (count_i + 1) / (total + 16). Context is the parent's octant parity
// index (8 values) crossed with the stage-1 symbol for stage 2. Counts update
// after each coded point, identically on both ends.
class BaselineModel final : public ContextModel {
 public:
  BaselineModel();

  void begin_level(int level, const LevelState& state, int net_index) override;
  ProbabilityTable predict_stage(int stage, std::span<const uint8_t> stage1,
                                 std::span<const uint8_t> truth) override;
  void absorb_stage(int stage, std::span<const uint8_t> symbols) override;
  void end_level(const OccupancySymbols& labels, bool need_propagation) override;

  bool rowwise() const override { return true; }
  void predict_row(int stage, std::size_t n, uint8_t stage1_sym, float* row16) override;
  void absorb_row(int stage, std::size_t n, uint8_t stage1_sym, uint8_t sym) override;

  // Test hook: snapshot of all frequency counts.
  std::span<const uint32_t> counts() const { return counts_; }

 private:
  std::size_t cell_ofs(int stage, uint8_t parity, uint8_t prev) const;
  void fill_row(const uint32_t* cell, float* row16) const;

  std::vector<uint32_t> counts_;      // levels x stages x 128 contexts x 16
  std::vector<uint8_t> parity_;
  std::vector<uint8_t> last_stage1_;  // for stage-2 context during absorb
  int level_ = -1;
};

}  // namespace zpcc
