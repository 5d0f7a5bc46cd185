#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "zpcc/boe.hpp"
#include "zpcc/nn/network.hpp"

namespace zpcc {

// A trained coding-network pool: nets[0] is the base network for levels 2-6,
// nets[1..K] are the BoE networks matched to centers[0..K-1].
struct ModelPool {
  int dim = 0;
  std::vector<nn::CodingNetwork<float>> nets;
  BoECenters centers;
  uint32_t digest = 0;  // CRC-32 of the serialized model file

  int pool_size() const { return centers.pool_size(); }
};

// Fresh pool with seeded parameters (network i uses seed + i) and the given
// centers.
ModelPool make_pool(int dim, const BoECenters& centers, uint64_t seed);

// Recomputes the digest from the serialized form; call after editing weights.
void refresh_digest(ModelPool& pool);

// File layout: magic "ZPCM", u8 version, u8[3] reserved, u32le dim, u32le K,
// K x 32 float32 centers, then K+1 parameter blobs (u64le byte length +
// float32 values in declared network order). All little-endian.
std::vector<uint8_t> serialize_model(const ModelPool& pool);
void save_model(const ModelPool& pool, const std::string& path);
ModelPool load_model(const std::string& path);
ModelPool parse_model(const std::vector<uint8_t>& bytes);

}  // namespace zpcc
