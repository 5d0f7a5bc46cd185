#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "zpcc/nn/matrix.hpp"
#include "zpcc/nn/ops.hpp"

namespace zpcc::nn {

// One coding network: octant positional embedding, channel-wise fusion gate,
// three refinement stacks (two residual blocks each, each block two 3x3x3
// submanifold convolutions), two prediction heads and two occupancy-context
// tables. Parameters live in one flat vector in this declared order, which is
// also the model-file serialization order.
template <class R>
struct CodingNetwork {
  int dim = 0;
  std::vector<R> theta;

  CodingNetwork() = default;
  explicit CodingNetwork(int d) : dim(d), theta(param_count(d), R(0)) {}

  static std::size_t param_count(int d) {
    const std::size_t dd = std::size_t(d) * d;
    return 8 * d + 2 * d + 12 * (27 * dd + d) + 2 * (dd + d + 16 * d + 16) +
           2 * 16 * d;
  }

  // Flat offsets ------------------------------------------------------------
  std::size_t oct_table_ofs() const { return 0; }
  std::size_t gate_ofs() const { return 8 * std::size_t(dim); }
  std::size_t conv_ofs(int stack, int block, int layer) const {
    const std::size_t dd = std::size_t(dim) * dim;
    return 10 * std::size_t(dim) +
           std::size_t(stack * 4 + block * 2 + layer) * (27 * dd + dim);
  }
  std::size_t conv_bias_ofs(int stack, int block, int layer) const {
    return conv_ofs(stack, block, layer) + 27 * std::size_t(dim) * dim;
  }
  std::size_t head_ofs(int h) const {
    const std::size_t dd = std::size_t(dim) * dim;
    return 10 * std::size_t(dim) + 12 * (27 * dd + dim) +
           std::size_t(h) * (dd + 17 * std::size_t(dim) + 16);
  }
  std::size_t head_w1_ofs(int h) const { return head_ofs(h); }
  std::size_t head_b1_ofs(int h) const { return head_ofs(h) + std::size_t(dim) * dim; }
  std::size_t head_w2_ofs(int h) const { return head_b1_ofs(h) + dim; }
  std::size_t head_b2_ofs(int h) const { return head_w2_ofs(h) + std::size_t(dim) * 16; }
  std::size_t ctx_ofs(int s) const {
    return head_ofs(2) + std::size_t(s) * 16 * dim;
  }

  const R* at(std::size_t ofs) const { return theta.data() + ofs; }
  R* at(std::size_t ofs) { return theta.data() + ofs; }

  // Xavier-uniform dense/conv weights, N(0, 0.02) embeddings, zero gate and
  // biases (so a fresh network predicts the uniform distribution).
  void init_params(uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform01 = [&rng] {
      return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    };
    auto normal = [&] {
      // Box-Muller on explicit uniforms keeps the draw sequence fixed.
      const double u1 = 1.0 - uniform01();
      const double u2 = uniform01();
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    auto fill_uniform = [&](std::size_t ofs, std::size_t count, double limit) {
      for (std::size_t i = 0; i < count; ++i)
        theta[ofs + i] = static_cast<R>((uniform01() * 2.0 - 1.0) * limit);
    };
    auto fill_normal = [&](std::size_t ofs, std::size_t count, double sigma) {
      for (std::size_t i = 0; i < count; ++i)
        theta[ofs + i] = static_cast<R>(normal() * sigma);
    };

    const std::size_t d = std::size_t(dim), dd = d * d;
    fill_normal(oct_table_ofs(), 8 * d, 0.02);
    // gate stays zero: fusion starts at an even 50/50 blend
    const double conv_limit = std::sqrt(6.0 / (27.0 * d + 27.0 * d));
    for (int s = 0; s < 3; ++s)
      for (int b = 0; b < 2; ++b)
        for (int l = 0; l < 2; ++l)
          fill_uniform(conv_ofs(s, b, l), 27 * dd, conv_limit);
    for (int h = 0; h < 2; ++h) {
      fill_uniform(head_w1_ofs(h), dd, std::sqrt(6.0 / (d + d)));
      fill_uniform(head_w2_ofs(h), d * 16, std::sqrt(6.0 / (d + 16.0)));
    }
    for (int s = 0; s < 2; ++s) fill_normal(ctx_ofs(s), 16 * d, 0.02);
  }
};

// Saved intermediates for one residual block: conv1 input, pre-relu, post-relu.
template <class R>
struct BlockTape {
  Matrix<R> x_in, pre, act;
};

template <class R>
struct RefineTape {
  BlockTape<R> block[2];
};

template <class R>
struct HeadTape {
  Matrix<R> x_in, pre, act;
};

// One residual block: x + conv2(relu(conv1(x))).
template <class R>
void run_block(const CodingNetwork<R>& net, int stack, int block,
               std::span<const int32_t> nbr, Matrix<R>& x, BlockTape<R>* tape) {
  Matrix<R> h, h2;
  sconv_fwd(x, nbr, net.at(net.conv_ofs(stack, block, 0)),
            net.at(net.conv_bias_ofs(stack, block, 0)), h);
  if (tape) {
    tape->x_in = x;
    tape->pre = h;
  }
  relu_inplace(h);
  sconv_fwd(h, nbr, net.at(net.conv_ofs(stack, block, 1)),
            net.at(net.conv_bias_ofs(stack, block, 1)), h2);
  if (tape) tape->act = std::move(h);
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += h2.a[i];
}

template <class R>
void run_refine(const CodingNetwork<R>& net, int stack,
                std::span<const int32_t> nbr, Matrix<R>& x, RefineTape<R>* tape) {
  run_block(net, stack, 0, nbr, x, tape ? &tape->block[0] : nullptr);
  run_block(net, stack, 1, nbr, x, tape ? &tape->block[1] : nullptr);
}

// Linear -> ReLU -> Linear -> Softmax prediction head.
template <class R>
void run_head(const CodingNetwork<R>& net, int h, const Matrix<R>& x,
              Matrix<R>& probs, HeadTape<R>* tape) {
  Matrix<R> hidden;
  dense_fwd(x, net.at(net.head_w1_ofs(h)), net.at(net.head_b1_ofs(h)),
            std::size_t(net.dim), hidden);
  if (tape) {
    tape->x_in = x;
    tape->pre = hidden;
  }
  relu_inplace(hidden);
  dense_fwd(hidden, net.at(net.head_w2_ofs(h)), net.at(net.head_b2_ofs(h)), 16,
            probs);
  if (tape) tape->act = std::move(hidden);
  softmax_rows(probs);
}

// Backward passes accumulate into a flat gradient vector laid out like theta.

template <class R>
void block_bwd(const CodingNetwork<R>& net, int stack, int block,
               std::span<const int32_t> nbr, const BlockTape<R>& tape,
               Matrix<R>& dx, R* grad) {
  // dy arrives in dx; residual: d(x_in) = dx + conv-path gradient.
  Matrix<R> da, dh;
  sconv_bwd(dx, tape.act, nbr, net.at(net.conv_ofs(stack, block, 1)), da,
            grad + net.conv_ofs(stack, block, 1),
            grad + net.conv_bias_ofs(stack, block, 1));
  relu_bwd_inplace(da, tape.pre);
  sconv_bwd(da, tape.x_in, nbr, net.at(net.conv_ofs(stack, block, 0)), dh,
            grad + net.conv_ofs(stack, block, 0),
            grad + net.conv_bias_ofs(stack, block, 0));
  for (std::size_t i = 0; i < dx.a.size(); ++i) dx.a[i] += dh.a[i];
}

template <class R>
void refine_bwd(const CodingNetwork<R>& net, int stack,
                std::span<const int32_t> nbr, const RefineTape<R>& tape,
                Matrix<R>& dx, R* grad) {
  block_bwd(net, stack, 1, nbr, tape.block[1], dx, grad);
  block_bwd(net, stack, 0, nbr, tape.block[0], dx, grad);
}

// Adds the head's gradient (w.r.t. its input) into dx.
template <class R>
void head_bwd(const CodingNetwork<R>& net, int h, const HeadTape<R>& tape,
              const Matrix<R>& probs, std::span<const uint8_t> targets,
              Matrix<R>& dx, R* grad) {
  Matrix<R> dlogits;
  xent_bits(probs, targets, &dlogits);
  Matrix<R> da, dxh;
  dense_bwd(dlogits, tape.act, net.at(net.head_w2_ofs(h)), 16, da,
            grad + net.head_w2_ofs(h), grad + net.head_b2_ofs(h));
  relu_bwd_inplace(da, tape.pre);
  dense_bwd(da, tape.x_in, net.at(net.head_w1_ofs(h)), std::size_t(net.dim), dxh,
            grad + net.head_w1_ofs(h), grad + net.head_b1_ofs(h));
  for (std::size_t i = 0; i < dx.a.size(); ++i) dx.a[i] += dxh.a[i];
}

}  // namespace zpcc::nn
