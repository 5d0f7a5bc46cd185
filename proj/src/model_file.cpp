#include "zpcc/model_file.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "zpcc/crc32.hpp"

namespace zpcc {

namespace {

constexpr char kMagic[4] = {'Z', 'P', 'C', 'M'};
constexpr uint8_t kVersion = 1;

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<uint8_t>& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f32(std::vector<uint8_t>& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

struct Reader {
  const uint8_t* p;
  const uint8_t* end;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n)
      throw std::runtime_error("model file: truncated");
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(*p++) << (8 * i);
    return v;
  }
  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(*p++) << (8 * i);
    return v;
  }
  float f32() {
    const uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
};

}  // namespace

ModelPool make_pool(int dim, const BoECenters& centers, uint64_t seed) {
  ModelPool pool;
  pool.dim = dim;
  pool.centers = centers;
  pool.nets.resize(static_cast<std::size_t>(centers.pool_size()) + 1);
  for (std::size_t i = 0; i < pool.nets.size(); ++i) {
    pool.nets[i] = nn::CodingNetwork<float>(dim);
    pool.nets[i].init_params(seed + i);
  }
  refresh_digest(pool);
  return pool;
}

void refresh_digest(ModelPool& pool) {
  const auto bytes = serialize_model(pool);
  pool.digest = crc32(bytes.data(), bytes.size());
}

std::vector<uint8_t> serialize_model(const ModelPool& pool) {
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.insert(out.end(), 3, 0);
  put_u32(out, static_cast<uint32_t>(pool.dim));
  put_u32(out, static_cast<uint32_t>(pool.pool_size()));
  for (const auto& c : pool.centers.centers)
    for (float v : c) put_f32(out, v);
  for (const auto& net : pool.nets) {
    put_u64(out, static_cast<uint64_t>(net.theta.size()) * 4);
    for (float v : net.theta) put_f32(out, v);
  }
  return out;
}

void save_model(const ModelPool& pool, const std::string& path) {
  const auto bytes = serialize_model(pool);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("model file: cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("model file: write failure on " + path);
}

ModelPool parse_model(const std::vector<uint8_t>& bytes) {
  Reader r{bytes.data(), bytes.data() + bytes.size()};
  r.need(12);
  if (std::memcmp(r.p, kMagic, 4) != 0)
    throw std::runtime_error("model file: bad magic");
  r.p += 4;
  if (*r.p != kVersion) throw std::runtime_error("model file: unknown version");
  r.p += 4;

  ModelPool pool;
  pool.dim = static_cast<int>(r.u32());
  const uint32_t k = r.u32();
  if (pool.dim < 1 || pool.dim > 256 || k > 255)
    throw std::runtime_error("model file: implausible dimensions");

  pool.centers.centers.resize(k);
  for (auto& c : pool.centers.centers)
    for (float& v : c) v = r.f32();

  const std::size_t expect = nn::CodingNetwork<float>::param_count(pool.dim);
  pool.nets.resize(k + 1);
  for (auto& net : pool.nets) {
    const uint64_t len = r.u64();
    if (len != expect * 4)
      throw std::runtime_error("model file: parameter blob size mismatch");
    net = nn::CodingNetwork<float>(pool.dim);
    for (float& v : net.theta) v = r.f32();
  }
  if (r.p != r.end) throw std::runtime_error("model file: trailing bytes");

  pool.digest = crc32(bytes.data(), bytes.size());
  return pool;
}

ModelPool load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("model file: cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
  return parse_model(bytes);
}

}  // namespace zpcc
