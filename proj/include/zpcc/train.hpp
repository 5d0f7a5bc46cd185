#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zpcc/boe.hpp"
#include "zpcc/hierarchy.hpp"
#include "zpcc/model_file.hpp"
#include "zpcc/nn/network.hpp"
#include "zpcc/types.hpp"

namespace zpcc {

// Immutable per-level inputs for one training cloud, prepared once.
struct LevelInputs {
  LevelState state;
  OccupancySymbols labels;
  std::vector<uint8_t> parity;
  std::vector<int32_t> nbr;
  OctantMask mask;
  int net_index = 0;
  bool propagate = true;  // false at the last coded level
};

struct TrainingCloud {
  std::vector<LevelInputs> levels;  // levels 2..B-1 in order
  std::size_t point_count = 0;      // N_B
};

// Builds the hierarchy, neighbor tables and BoE selections for one cloud.
// With an empty center pool every level routes to network 0.
TrainingCloud prepare_cloud(const QuantizedCloud& cloud, const BoECenters& centers);

// Descriptors of levels 7..B-1, the BoE fitting set.
std::vector<OccupancyDescriptor> collect_descriptors(const QuantizedCloud& cloud);

struct TrainConfig {
  int steps = 2000;
  int dim = 16;
  int pool = 3;
  uint64_t seed = 1;
  double learning_rate = 5e-4;
  // The learning rate halves at these fractions of the step budget.
  double milestone1 = 0.6;
  double milestone2 = 0.85;
};

struct TrainResult {
  std::vector<double> loss_bits;  // per step, summed over levels and stages
  std::vector<double> loss_bpp;   // per step, loss_bits / N_B
};

// Fits BoE centers on the dataset, instantiates a pool of config.pool + 1
// networks and trains it from scratch with Adam under the progressive
// bitrate objective. Deterministic for a fixed config.
ModelPool train(const std::vector<QuantizedCloud>& dataset, const TrainConfig& config,
                TrainResult* result = nullptr);

namespace nn {

template <class R>
struct LevelTape {
  Matrix<R> f_oct, f_prop;
  bool fused = false;
  RefineTape<R> refine[3];
  HeadTape<R> head[2];
  Matrix<R> probs[2];
};

// Progressive forward over all coded levels; returns the total estimated
// bitrate in bits. Tapes are filled when requested (training); inference
// passes nullptr.
template <class R>
double progressive_forward(std::span<const CodingNetwork<R>> nets,
                           const TrainingCloud& cloud,
                           std::vector<LevelTape<R>>* tapes) {
  Matrix<R> prop;
  double loss = 0.0;
  if (tapes) tapes->resize(cloud.levels.size());
  for (std::size_t li = 0; li < cloud.levels.size(); ++li) {
    const LevelInputs& in = cloud.levels[li];
    const CodingNetwork<R>& net = nets[static_cast<std::size_t>(in.net_index)];
    const std::size_t dim = static_cast<std::size_t>(net.dim);
    LevelTape<R>* tape = tapes ? &(*tapes)[li] : nullptr;

    Matrix<R> f_oct;
    embed_fwd<R>(in.parity, net.at(net.oct_table_ofs()), dim, f_oct);
    Matrix<R> x;
    const bool fused = li > 0;
    if (fused) {
      fuse_fwd(f_oct, prop, net.at(net.gate_ofs()), x);
      if (tape) {
        tape->fused = true;
        tape->f_oct = std::move(f_oct);
        tape->f_prop = std::move(prop);
      }
    } else {
      x = std::move(f_oct);
      if (tape) tape->fused = false;
    }

    run_refine(net, 0, in.nbr, x, tape ? &tape->refine[0] : nullptr);
    Matrix<R> probs1;
    run_head(net, 0, x, probs1, tape ? &tape->head[0] : nullptr);
    loss += xent_bits<R>(probs1, in.labels.stage1, nullptr);
    if (tape) tape->probs[0] = std::move(probs1);
    embed_add<R>(in.labels.stage1, net.at(net.ctx_ofs(0)), x);

    run_refine(net, 1, in.nbr, x, tape ? &tape->refine[1] : nullptr);
    Matrix<R> probs2;
    run_head(net, 1, x, probs2, tape ? &tape->head[1] : nullptr);
    loss += xent_bits<R>(probs2, in.labels.stage2, nullptr);
    if (tape) tape->probs[1] = std::move(probs2);
    embed_add<R>(in.labels.stage2, net.at(net.ctx_ofs(1)), x);

    if (in.propagate) {
      run_refine(net, 2, in.nbr, x, tape ? &tape->refine[2] : nullptr);
      auto child = replicate_rows<R>(x.a, dim, in.mask);
      prop = Matrix<R>();
      prop.cols = dim;
      prop.rows = child.size() / dim;
      prop.a = std::move(child);
    }
  }
  return loss;
}

// Reverse pass; grads[k] accumulates the flat gradient of nets[k]. Gradients
// flow only through the network selected at each level, plus through the
// propagated features into earlier levels.
template <class R>
void progressive_backward(std::span<const CodingNetwork<R>> nets,
                          const TrainingCloud& cloud,
                          const std::vector<LevelTape<R>>& tapes,
                          std::span<std::vector<R>> grads) {
  Matrix<R> dprop_out;  // gradient w.r.t. the features this level propagated
  for (std::size_t ri = cloud.levels.size(); ri-- > 0;) {
    const LevelInputs& in = cloud.levels[ri];
    const LevelTape<R>& tape = tapes[ri];
    const CodingNetwork<R>& net = nets[static_cast<std::size_t>(in.net_index)];
    R* grad = grads[static_cast<std::size_t>(in.net_index)].data();
    const std::size_t dim = static_cast<std::size_t>(net.dim);
    const std::size_t n_points = in.state.count();

    Matrix<R> dx(n_points, dim);
    if (in.propagate && !dprop_out.empty()) {
      // replicate backward: each parent accumulates its children's rows
      std::size_t child = 0;
      for (std::size_t i = 0; i < n_points; ++i) {
        R* dst = dx.row(i);
        for (int u = 0; u < 8; ++u) {
          if (!in.mask.rows[i][u]) continue;
          const R* src = dprop_out.row(child++);
          for (std::size_t d = 0; d < dim; ++d) dst[d] += src[d];
        }
      }
      refine_bwd(net, 2, in.nbr, tape.refine[2], dx, grad);
    }

    embed_bwd<R>(in.labels.stage2, dx, grad + net.ctx_ofs(1));
    head_bwd(net, 1, tape.head[1], tape.probs[1], in.labels.stage2, dx, grad);
    refine_bwd(net, 1, in.nbr, tape.refine[1], dx, grad);

    embed_bwd<R>(in.labels.stage1, dx, grad + net.ctx_ofs(0));
    head_bwd(net, 0, tape.head[0], tape.probs[0], in.labels.stage1, dx, grad);
    refine_bwd(net, 0, in.nbr, tape.refine[0], dx, grad);

    if (tape.fused) {
      Matrix<R> d_oct, d_prop;
      fuse_bwd(dx, tape.f_oct, tape.f_prop, net.at(net.gate_ofs()), d_oct, d_prop,
               grad + net.gate_ofs());
      embed_bwd<R>(in.parity, d_oct, grad + net.oct_table_ofs());
      dprop_out = std::move(d_prop);
    } else {
      embed_bwd<R>(in.parity, dx, grad + net.oct_table_ofs());
      dprop_out = Matrix<R>();
    }
  }
}

}  // namespace nn

}  // namespace zpcc
