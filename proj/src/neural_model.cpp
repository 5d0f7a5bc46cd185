#include "zpcc/neural_model.hpp"

#include <stdexcept>

namespace zpcc {

std::vector<int32_t> build_neighbor_table(const LevelState& state) {
  const CoordIndex index(state);
  const int64_t limit =
      state.level >= 32 ? int64_t(0x100000000) : (int64_t(1) << state.level);
  std::vector<int32_t> nbr(state.coords.size() * nn::kKernelOffsets, -1);
  for (std::size_t n = 0; n < state.coords.size(); ++n) {
    const Coord& c = state.coords[n];
    int32_t* row = nbr.data() + n * nn::kKernelOffsets;
    int o = 0;
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dz = -1; dz <= 1; ++dz, ++o) {
          const int64_t x = int64_t(c[0]) + dx, y = int64_t(c[1]) + dy,
                        z = int64_t(c[2]) + dz;
          if (x < 0 || y < 0 || z < 0 || x >= limit || y >= limit || z >= limit)
            continue;
          row[o] = index.find(Coord{uint32_t(x), uint32_t(y), uint32_t(z)});
        }
  }
  return nbr;
}

std::vector<uint8_t> parity_indices(const LevelState& state) {
  std::vector<uint8_t> parity(state.coords.size());
  for (std::size_t n = 0; n < state.coords.size(); ++n) {
    const Coord& c = state.coords[n];
    parity[n] =
        static_cast<uint8_t>((c[0] & 1) | ((c[1] & 1) << 1) | ((c[2] & 1) << 2));
  }
  return parity;
}

NeuralContextModel::NeuralContextModel(const ModelPool& pool) : pool_(&pool) {}

void NeuralContextModel::begin_level(int level, const LevelState& state,
                                     int net_index) {
  if (net_index < 0 || net_index >= static_cast<int>(pool_->nets.size()))
    throw std::runtime_error("neural model: network index out of range");
  net_ = &pool_->nets[static_cast<std::size_t>(net_index)];
  level_ = level;
  next_stage_ = 1;
  nbr_ = build_neighbor_table(state);
  const auto parity = parity_indices(state);

  nn::Matrix<float> f_oct;
  nn::embed_fwd<float>(parity, net_->at(net_->oct_table_ofs()),
                       std::size_t(net_->dim), f_oct);
  if (level == 2 || !has_prop_) {
    // No prior features at the shallowest level: fusion is bypassed.
    feat_ = std::move(f_oct);
  } else {
    if (prop_.rows != f_oct.rows)
      throw std::logic_error("neural model: propagated feature count mismatch");
    nn::fuse_fwd(f_oct, prop_, net_->at(net_->gate_ofs()), feat_);
  }
}

ProbabilityTable NeuralContextModel::predict_stage(int stage,
                                                   std::span<const uint8_t>,
                                                   std::span<const uint8_t>) {
  if (stage != next_stage_)
    throw std::logic_error("neural model: stage called out of order");
  nn::run_refine(*net_, stage - 1, nbr_, feat_,
                 static_cast<nn::RefineTape<float>*>(nullptr));
  nn::Matrix<float> probs;
  nn::run_head(*net_, stage - 1, feat_, probs,
               static_cast<nn::HeadTape<float>*>(nullptr));

  ProbabilityTable table;
  table.rows = probs.rows;
  table.p = std::move(probs.a);
  return table;
}

void NeuralContextModel::absorb_stage(int stage, std::span<const uint8_t> symbols) {
  if (stage != next_stage_)
    throw std::logic_error("neural model: absorb called out of order");
  nn::embed_add<float>(symbols, net_->at(net_->ctx_ofs(stage - 1)), feat_);
  next_stage_ = stage + 1;
}

void NeuralContextModel::end_level(const OccupancySymbols& labels,
                                   bool need_propagation) {
  if (!need_propagation) {
    has_prop_ = false;
    return;
  }
  nn::run_refine(*net_, 2, nbr_, feat_,
                 static_cast<nn::RefineTape<float>*>(nullptr));
  const OctantMask mask = occupancy_mask(labels.octant);
  auto child_rows = replicate_rows<float>(feat_.a, feat_.cols, mask);
  prop_ = nn::Matrix<float>();
  prop_.cols = feat_.cols;
  prop_.rows = child_rows.size() / feat_.cols;
  prop_.a = std::move(child_rows);
  has_prop_ = true;
}

}  // namespace zpcc
