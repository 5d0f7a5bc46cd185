#include "zpcc/context_model.hpp"

#include <stdexcept>

namespace zpcc {

void ContextModel::predict_row(int, std::size_t, uint8_t, float*) {
  throw std::logic_error("context model: row-wise prediction unsupported");
}

void ContextModel::absorb_row(int, std::size_t, uint8_t, uint8_t) {
  throw std::logic_error("context model: row-wise absorb unsupported");
}

namespace {
constexpr std::size_t kContexts = 8 * 16;
constexpr std::size_t kStageStride = kContexts * kSymbolCount;
constexpr std::size_t kLevelStride = 2 * kStageStride;
}  // namespace

BaselineModel::BaselineModel()
    : counts_((kMaxBitDepth + 1) * kLevelStride, 0) {}

void BaselineModel::begin_level(int level, const LevelState& state, int) {
  level_ = level;
  parity_.resize(state.coords.size());
  for (std::size_t n = 0; n < state.coords.size(); ++n) {
    const Coord& c = state.coords[n];
    parity_[n] =
        static_cast<uint8_t>((c[0] & 1) | ((c[1] & 1) << 1) | ((c[2] & 1) << 2));
  }
  last_stage1_.clear();
}

std::size_t BaselineModel::cell_ofs(int stage, uint8_t parity, uint8_t prev) const {
  return std::size_t(level_) * kLevelStride +
         std::size_t(stage - 1) * kStageStride +
         (std::size_t(parity) * 16 + prev) * kSymbolCount;
}

void BaselineModel::fill_row(const uint32_t* cell, float* row16) const {
  uint32_t total = 0;
  for (int i = 0; i < kSymbolCount; ++i) total += cell[i];
  const float denom = static_cast<float>(total + kSymbolCount);
  for (int i = 0; i < kSymbolCount; ++i)
    row16[i] = static_cast<float>(cell[i] + 1) / denom;
}

ProbabilityTable BaselineModel::predict_stage(int stage,
                                              std::span<const uint8_t> stage1,
                                              std::span<const uint8_t> truth) {
  const std::size_t n_points = parity_.size();
  if (truth.size() != n_points)
    throw std::invalid_argument(
        "baseline: table prediction needs this stage's true symbols");
  if (stage == 2 && stage1.size() != n_points)
    throw std::invalid_argument("baseline: stage 2 needs stage-1 symbols");

  // The per-point count updates run on a scratch copy of this level's stage
  // bank, so prediction leaves the model state untouched; row n only ever
  // sees truth[0..n).
  const std::size_t bank_base = cell_ofs(stage, 0, 0);
  std::vector<uint32_t> bank(counts_.begin() + bank_base,
                             counts_.begin() + bank_base + kStageStride);

  ProbabilityTable table;
  table.rows = n_points;
  table.p.resize(n_points * kSymbolCount);
  for (std::size_t n = 0; n < n_points; ++n) {
    const uint8_t prev = stage == 2 ? stage1[n] : 0;
    const std::size_t ofs = cell_ofs(stage, parity_[n], prev) - bank_base;
    fill_row(bank.data() + ofs, table.row(n));
    bank[ofs + truth[n]] += 1;
  }
  return table;
}

void BaselineModel::absorb_stage(int stage, std::span<const uint8_t> symbols) {
  for (std::size_t n = 0; n < symbols.size(); ++n) {
    const uint8_t prev = stage == 2 ? last_stage1_[n] : 0;
    counts_[cell_ofs(stage, parity_[n], prev) + symbols[n]] += 1;
  }
  if (stage == 1) last_stage1_.assign(symbols.begin(), symbols.end());
}

void BaselineModel::end_level(const OccupancySymbols&, bool) {}

void BaselineModel::predict_row(int stage, std::size_t n, uint8_t stage1_sym,
                                float* row16) {
  const uint8_t prev = stage == 2 ? stage1_sym : 0;
  fill_row(counts_.data() + cell_ofs(stage, parity_[n], prev), row16);
}

void BaselineModel::absorb_row(int stage, std::size_t n, uint8_t stage1_sym,
                               uint8_t sym) {
  const uint8_t prev = stage == 2 ? stage1_sym : 0;
  counts_[cell_ofs(stage, parity_[n], prev) + sym] += 1;
}

}  // namespace zpcc
