#include "zpcc/train.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "zpcc/neural_model.hpp"
#include "zpcc/nn/adam.hpp"

namespace zpcc {

namespace {

struct Chain {
  std::vector<LevelState> states;        // 2..B
  std::vector<OccupancySymbols> labels;  // labels[b] for parents at b
};

Chain build_chain(const QuantizedCloud& cloud) {
  Chain c;
  const int depth = cloud.bit_depth;
  c.states.resize(depth + 1);
  c.labels.resize(depth + 1);
  c.states[depth].level = depth;
  c.states[depth].coords = cloud.coords;
  for (int b = depth; b > 2; --b) {
    auto [parent, labels] = coarsen(c.states[b]);
    c.states[b - 1] = std::move(parent);
    c.labels[b - 1] = std::move(labels);
  }
  return c;
}

}  // namespace

std::vector<OccupancyDescriptor> collect_descriptors(const QuantizedCloud& cloud) {
  const Chain chain = build_chain(cloud);
  std::vector<OccupancyDescriptor> out;
  for (int b = 7; b <= cloud.bit_depth - 1; ++b)
    out.push_back(descriptor(chain.labels[b].stage1, chain.labels[b].stage2));
  return out;
}

TrainingCloud prepare_cloud(const QuantizedCloud& cloud, const BoECenters& centers) {
  const Chain chain = build_chain(cloud);
  TrainingCloud out;
  out.point_count = cloud.coords.size();
  const int depth = cloud.bit_depth;
  for (int b = 2; b <= depth - 1; ++b) {
    LevelInputs in;
    in.state = chain.states[b];
    in.labels = chain.labels[b];
    in.parity = parity_indices(in.state);
    in.nbr = build_neighbor_table(in.state);
    in.mask = occupancy_mask(in.labels.octant);
    in.propagate = b + 1 <= depth - 1;
    if (b > 6 && centers.pool_size() > 0) {
      const OccupancyDescriptor desc = descriptor(in.labels.stage1, in.labels.stage2);
      in.net_index = select_network(b, &desc, centers);
    }
    out.levels.push_back(std::move(in));
  }
  return out;
}

ModelPool train(const std::vector<QuantizedCloud>& dataset, const TrainConfig& config,
                TrainResult* result) {
  if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
  if (config.steps < 1) throw std::invalid_argument("train: steps must be positive");
  if (config.pool < 0) throw std::invalid_argument("train: pool size must be >= 0");

  BoECenters centers;
  if (config.pool > 0) {
    std::vector<OccupancyDescriptor> descriptors;
    for (const auto& cloud : dataset) {
      auto d = collect_descriptors(cloud);
      descriptors.insert(descriptors.end(), d.begin(), d.end());
    }
    if (descriptors.size() < static_cast<std::size_t>(config.pool))
      throw std::invalid_argument(
          "train: not enough deep levels (b>6) to fit " +
          std::to_string(config.pool) + " BoE centers");
    centers = fit_centers(descriptors, config.pool, config.seed);
  }

  ModelPool pool = make_pool(config.dim, centers, config.seed);

  std::vector<TrainingCloud> prepared;
  prepared.reserve(dataset.size());
  for (const auto& cloud : dataset) prepared.push_back(prepare_cloud(cloud, centers));

  const std::size_t n_params = nn::CodingNetwork<float>::param_count(config.dim);
  std::vector<std::vector<float>> grads(pool.nets.size(),
                                        std::vector<float>(n_params, 0.0f));
  std::vector<nn::Adam<float>> adams;
  adams.reserve(pool.nets.size());
  for (std::size_t i = 0; i < pool.nets.size(); ++i) adams.emplace_back(n_params);

  if (result) {
    result->loss_bits.clear();
    result->loss_bpp.clear();
  }

  const std::span<const nn::CodingNetwork<float>> nets(pool.nets);
  for (int step = 0; step < config.steps; ++step) {
    const TrainingCloud& cloud = prepared[step % prepared.size()];

    std::vector<nn::LevelTape<float>> tapes;
    const double loss = nn::progressive_forward<float>(nets, cloud, &tapes);
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite loss at step " +
                               std::to_string(step) + " (cloud " +
                               std::to_string(step % prepared.size()) + ")");

    for (auto& g : grads) g.assign(n_params, 0.0f);
    nn::progressive_backward<float>(nets, cloud, tapes, grads);

    double lr = config.learning_rate;
    if (step >= static_cast<int>(config.milestone1 * config.steps)) lr *= 0.5;
    if (step >= static_cast<int>(config.milestone2 * config.steps)) lr *= 0.5;
    for (std::size_t k = 0; k < pool.nets.size(); ++k)
      adams[k].step(pool.nets[k].theta, grads[k], lr);

    if (result) {
      result->loss_bits.push_back(loss);
      result->loss_bpp.push_back(loss / static_cast<double>(cloud.point_count));
    }
  }

  refresh_digest(pool);
  return pool;
}

}  // namespace zpcc
