#pragma once

#include "zpcc/context_model.hpp"
#include "zpcc/model_file.hpp"

namespace zpcc {

// Builds the N x 27 neighbor-index table (offset-major per row, -1 for
// absent sites) used by the submanifold convolutions.
std::vector<int32_t> build_neighbor_table(const LevelState& state);

// Octant parity index per point, p.x&1 | (p.y&1)<<1 | (p.z&1)<<2.
std::vector<uint8_t> parity_indices(const LevelState& state);

// Streaming inference session over one coding network pool. Carries the
// cross-bit-depth propagated features between levels; one session per
// encode/decode.
class NeuralContextModel final : public ContextModel {
 public:
  explicit NeuralContextModel(const ModelPool& pool);

  void begin_level(int level, const LevelState& state, int net_index) override;
  ProbabilityTable predict_stage(int stage, std::span<const uint8_t> stage1,
                                 std::span<const uint8_t> truth) override;
  void absorb_stage(int stage, std::span<const uint8_t> symbols) override;
  void end_level(const OccupancySymbols& labels, bool need_propagation) override;

 private:
  const ModelPool* pool_;
  const nn::CodingNetwork<float>* net_ = nullptr;

  nn::Matrix<float> feat_;
  nn::Matrix<float> prop_;
  bool has_prop_ = false;
  std::vector<int32_t> nbr_;
  int level_ = -1;
  int next_stage_ = 1;
};

}  // namespace zpcc
