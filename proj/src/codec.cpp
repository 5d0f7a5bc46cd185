#include "zpcc/codec.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <thread>
#include <variant>

#include "zpcc/boe.hpp"
#include "zpcc/bounded_queue.hpp"
#include "zpcc/context_model.hpp"
#include "zpcc/crc32.hpp"
#include "zpcc/hierarchy.hpp"
#include "zpcc/neural_model.hpp"
#include "zpcc/range_coder.hpp"

namespace zpcc {

namespace {

constexpr char kMagic[4] = {'Z', 'P', 'C', 'C'};
constexpr uint8_t kVersion = 1;
constexpr std::size_t kQueueCapacity = 8;

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void put_f64(std::vector<uint8_t>& out, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
}

struct ByteReader {
  const uint8_t* p;
  const uint8_t* end;

  void need(std::size_t n) const {
    if (static_cast<std::size_t>(end - p) < n)
      throw std::runtime_error("container: premature end of stream");
  }
  uint8_t u8() {
    need(1);
    return *p++;
  }
  uint16_t u16() {
    need(2);
    uint16_t v = static_cast<uint16_t>(p[0] | (p[1] << 8));
    p += 2;
    return v;
  }
  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(p[i]) << (8 * i);
    p += 4;
    return v;
  }
  double f64() {
    need(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(p[i]) << (8 * i);
    p += 8;
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

// Item handed from the model producer to the entropy-coding consumer.
struct BoeItem {
  int level;
  uint8_t index;
};

struct StageItem {
  int level;
  int stage;
  ProbabilityTable table;        // float rows; consumer quantizes
  std::vector<uint8_t> symbols;  // true stage symbols
};

using WorkItem = std::variant<BoeItem, StageItem>;

// Serializes items into the container in arrival order; owns the reports and
// the optional per-point probe.
class ContainerWriter {
 public:
  ContainerWriter(std::vector<uint8_t>& out, std::vector<LevelReport>& reports,
                  PerPointBits* probe)
      : out_(&out), reports_(&reports), probe_(probe) {}

  void process(WorkItem&& item) {
    if (std::holds_alternative<BoeItem>(item)) {
      const auto& boe = std::get<BoeItem>(item);
      out_->push_back(boe.index);
      report(boe.level).boe_index = boe.index;
      return;
    }
    auto& st = std::get<StageItem>(item);
    quantize_probs(st.table);
    const CodedChunk chunk = encode_symbols(st.symbols, st.table);
    put_u32(*out_, static_cast<uint32_t>(chunk.bytes.size()));
    out_->insert(out_->end(), chunk.bytes.begin(), chunk.bytes.end());

    LevelReport& rep = report(st.level);
    rep.parents = st.symbols.size();
    rep.stage_payload_bytes[st.stage - 1] = chunk.payload_size();

    if (probe_ && st.level == probe_->level) {
      auto& bits = st.stage == 1 ? probe_->stage1_bits : probe_->stage2_bits;
      bits.resize(st.symbols.size());
      for (std::size_t n = 0; n < st.symbols.size(); ++n) {
        const uint16_t q = st.table.qrow(n)[st.symbols[n]];
        bits[n] = -std::log2(static_cast<double>(q) / kProbTotal);
      }
    }
  }

 private:
  LevelReport& report(int level) {
    for (auto& r : *reports_)
      if (r.level == level) return r;
    reports_->push_back(LevelReport{});
    reports_->back().level = level;
    return reports_->back();
  }

  std::vector<uint8_t>* out_;
  std::vector<LevelReport>* reports_;
  PerPointBits* probe_;
};

// Hands items to the writer either inline or through a bounded queue serviced
// by one consumer thread; both paths produce identical bytes.
class ChunkSink {
 public:
  ChunkSink(ContainerWriter& writer, EncodeMode mode) : writer_(&writer) {
    if (mode == EncodeMode::pipelined) {
      queue_.emplace(kQueueCapacity);
      consumer_ = std::thread([this] {
        try {
          while (auto item = queue_->pop()) writer_->process(std::move(*item));
        } catch (...) {
          error_ = std::current_exception();
          queue_->poison();
        }
      });
    }
  }

  ~ChunkSink() {
    if (consumer_.joinable()) {
      queue_->close();
      consumer_.join();
    }
  }

  void submit(WorkItem&& item) {
    if (!queue_) {
      writer_->process(std::move(item));
      return;
    }
    if (!queue_->push(std::move(item)))
      throw std::runtime_error("pipelined encode: consumer aborted");
  }

  void finish() {
    if (!queue_) return;
    queue_->close();
    consumer_.join();
    if (error_) std::rethrow_exception(error_);
  }

 private:
  ContainerWriter* writer_;
  std::optional<BoundedQueue<WorkItem>> queue_;
  std::thread consumer_;
  std::exception_ptr error_;
};

struct Hierarchy {
  std::vector<LevelState> states;        // index by level, 2..B
  std::vector<OccupancySymbols> labels;  // labels[b] pairs with states[b]
};

Hierarchy build_hierarchy(const QuantizedCloud& cloud, HierarchyMode mode) {
  const int depth = cloud.bit_depth;
  Hierarchy h;
  h.states.resize(depth + 1);
  h.labels.resize(depth + 1);
  h.states[depth].level = depth;
  h.states[depth].coords = cloud.coords;
  for (int b = depth; b > 2; --b) {
    auto [parent, labels] = coarsen(h.states[b]);
    if (mode == HierarchyMode::explicit_sort) explicit_resort(parent);
    h.states[b - 1] = std::move(parent);
    h.labels[b - 1] = std::move(labels);
  }
  return h;
}

std::unique_ptr<ContextModel> make_model(const ModelRef& ref) {
  if (ref.kind == ModelKind::baseline) return std::make_unique<BaselineModel>();
  if (!ref.pool) throw std::invalid_argument("codec: neural model requires a pool");
  return std::make_unique<NeuralContextModel>(*ref.pool);
}

void validate_cloud(const QuantizedCloud& cloud) {
  if (cloud.coords.empty()) throw std::invalid_argument("codec: empty cloud");
  if (cloud.bit_depth < kMinBitDepth || cloud.bit_depth > kMaxBitDepth)
    throw std::invalid_argument("codec: bit depth out of range");
}

}  // namespace

EncodeResult encode(const QuantizedCloud& cloud, const ModelRef& model,
                    const EncodeOptions& options) {
  validate_cloud(cloud);
  const int depth = cloud.bit_depth;
  const Hierarchy h = build_hierarchy(cloud, options.hierarchy);

  const LevelState& base = h.states[2];
  if (base.count() > 64)
    throw std::logic_error("codec: level-2 grid cannot hold more than 64 voxels");

  EncodeResult result;
  result.point_count = cloud.coords.size();
  if (options.per_point_level >= 0) result.per_point.level = options.per_point_level;

  auto& out = result.container;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(kVersion);
  out.push_back(static_cast<uint8_t>(depth));
  out.push_back(static_cast<uint8_t>(model.kind));
  out.push_back(0);
  put_u16(out, model.pool ? static_cast<uint16_t>(model.pool->dim) : 0);
  put_u16(out, model.pool ? static_cast<uint16_t>(model.pool->pool_size()) : 0);
  put_u32(out, model.pool ? model.pool->digest : 0);
  for (double v : cloud.origin) put_f64(out, v);
  put_f64(out, cloud.step);
  out.push_back(static_cast<uint8_t>(base.count()));
  for (const Coord& c : base.coords) {
    out.push_back(static_cast<uint8_t>(c[0]));
    out.push_back(static_cast<uint8_t>(c[1]));
    out.push_back(static_cast<uint8_t>(c[2]));
  }

  {
    ContainerWriter writer(out, result.levels,
                           options.per_point_level >= 0 ? &result.per_point : nullptr);
    ChunkSink sink(writer, options.mode);
    auto ctx = make_model(model);

    for (int b = 2; b <= depth - 1; ++b) {
      const LevelState& state = h.states[b];
      const OccupancySymbols& labels = h.labels[b];
      int net_index = 0;
      if (model.kind == ModelKind::neural && b > 6 && model.pool->pool_size() > 0) {
        const OccupancyDescriptor desc = descriptor(labels.stage1, labels.stage2);
        net_index = select_network(b, &desc, model.pool->centers);
        sink.submit(BoeItem{b, static_cast<uint8_t>(net_index)});
      }
      ctx->begin_level(b, state, net_index);

      ProbabilityTable t1 = ctx->predict_stage(1, {}, labels.stage1);
      sink.submit(StageItem{b, 1, std::move(t1), labels.stage1});
      ctx->absorb_stage(1, labels.stage1);

      ProbabilityTable t2 = ctx->predict_stage(2, labels.stage1, labels.stage2);
      sink.submit(StageItem{b, 2, std::move(t2), labels.stage2});
      ctx->absorb_stage(2, labels.stage2);

      ctx->end_level(labels, b + 1 <= depth - 1);
    }
    sink.finish();
  }

  if (options.per_point_level >= 2 && options.per_point_level <= depth - 1)
    result.per_point.coords = h.states[options.per_point_level].coords;

  put_u32(out, crc32(out.data(), out.size()));
  return result;
}

QuantizedCloud decode(std::span<const uint8_t> container, const ModelRef& model,
                      HierarchyMode hierarchy) {
  if (container.size() < 4 + 1 + 4)
    throw std::runtime_error("container: premature end of stream");
  const uint32_t stored_crc =
      static_cast<uint32_t>(container[container.size() - 4]) |
      static_cast<uint32_t>(container[container.size() - 3]) << 8 |
      static_cast<uint32_t>(container[container.size() - 2]) << 16 |
      static_cast<uint32_t>(container[container.size() - 1]) << 24;
  if (crc32(container.data(), container.size() - 4) != stored_crc)
    throw std::runtime_error("container: CRC mismatch");

  ByteReader r{container.data(), container.data() + container.size() - 4};
  r.need(4);
  if (std::memcmp(r.p, kMagic, 4) != 0)
    throw std::runtime_error("container: bad magic");
  r.p += 4;
  if (r.u8() != kVersion) throw std::runtime_error("container: unknown version");

  const int depth = r.u8();
  if (depth < kMinBitDepth || depth > kMaxBitDepth)
    throw std::runtime_error("container: bit depth out of range");
  const uint8_t kind = r.u8();
  r.u8();  // flags
  const uint16_t dim = r.u16();
  const uint16_t pool_k = r.u16();
  const uint32_t digest = r.u32();

  if (kind != static_cast<uint8_t>(model.kind))
    throw std::runtime_error("container: model kind mismatch");
  if (model.kind == ModelKind::neural) {
    if (!model.pool) throw std::invalid_argument("codec: neural model requires a pool");
    if (dim != model.pool->dim || pool_k != model.pool->pool_size() ||
        digest != model.pool->digest)
      throw std::runtime_error("container: model file mismatch");
  }

  QuantizedCloud cloud;
  cloud.bit_depth = depth;
  for (double& v : cloud.origin) v = r.f64();
  cloud.step = r.f64();
  if (!(cloud.step > 0.0)) throw std::runtime_error("container: bad step");

  const uint8_t base_count = r.u8();
  if (base_count == 0) throw std::runtime_error("container: empty base level");
  LevelState state;
  state.level = 2;
  state.coords.resize(base_count);
  uint64_t prev_code = 0;
  for (std::size_t i = 0; i < base_count; ++i) {
    Coord c{r.u8(), r.u8(), r.u8()};
    if (c[0] >= 4 || c[1] >= 4 || c[2] >= 4)
      throw std::runtime_error("container: base coordinate out of range");
    const uint64_t code = morton_code(c);
    if (i > 0 && code <= prev_code)
      throw std::runtime_error("container: base coordinates not Morton-sorted");
    prev_code = code;
    state.coords[i] = c;
  }

  auto ctx = make_model(model);

  for (int b = 2; b <= depth - 1; ++b) {
    int net_index = 0;
    if (model.kind == ModelKind::neural && b > 6 && model.pool->pool_size() > 0) {
      net_index = r.u8();
      if (net_index < 1 || net_index > model.pool->pool_size())
        throw std::runtime_error("container: BoE index out of range");
    }
    ctx->begin_level(b, state, net_index);

    const std::size_t n_points = state.count();
    OccupancySymbols labels;
    labels.stage1.resize(n_points);
    labels.stage2.resize(n_points);

    for (int stage = 1; stage <= 2; ++stage) {
      const uint32_t chunk_len = r.u32();
      r.need(chunk_len);
      CodedChunk chunk;
      chunk.bytes.assign(r.p, r.p + chunk_len);
      r.p += chunk_len;
      auto& syms = stage == 1 ? labels.stage1 : labels.stage2;

      if (ctx->rowwise()) {
        if (chunk.bytes.size() < 8)
          throw std::runtime_error("range coder: chunk too short");
        uint32_t count = 0, tail = 0;
        for (int i = 0; i < 4; ++i) {
          count |= static_cast<uint32_t>(chunk.bytes[i]) << (8 * i);
          tail |= static_cast<uint32_t>(chunk.bytes[chunk.bytes.size() - 4 + i])
                  << (8 * i);
        }
        if (count != n_points)
          throw std::runtime_error("container: symbol count mismatch");
        if (tail != kChunkSentinel)
          throw std::runtime_error("range coder: bad chunk terminator");
        RangeDecoder dec(std::span<const uint8_t>(chunk.bytes.data() + 4,
                                                  chunk.bytes.size() - 8));
        float row[kSymbolCount];
        uint16_t qrow[kSymbolCount];
        for (std::size_t n = 0; n < n_points; ++n) {
          const uint8_t s1 = stage == 2 ? labels.stage1[n] : 0;
          ctx->predict_row(stage, n, s1, row);
          quantize_row(row, qrow);
          const uint32_t target = dec.decode_target();
          uint32_t cum = 0;
          int s = 0;
          while (s < kSymbolCount - 1 && cum + qrow[s] <= target) cum += qrow[s], ++s;
          dec.consume(cum, qrow[s]);
          syms[n] = static_cast<uint8_t>(s);
          ctx->absorb_row(stage, n, s1, syms[n]);
        }
      } else {
        const std::span<const uint8_t> s1 =
            stage == 2 ? std::span<const uint8_t>(labels.stage1)
                       : std::span<const uint8_t>();
        ProbabilityTable table = ctx->predict_stage(stage, s1, {});
        quantize_probs(table);
        syms = decode_symbols(chunk, table);
        ctx->absorb_stage(stage, syms);
      }
    }

    labels.octant.resize(n_points);
    for (std::size_t n = 0; n < n_points; ++n) {
      labels.octant[n] =
          static_cast<uint8_t>(16 * labels.stage2[n] + labels.stage1[n]);
      if (labels.octant[n] == 0)
        throw std::runtime_error("container: corrupt stream (empty octant)");
    }

    LevelState next = expand_children(state, labels);
    if (hierarchy == HierarchyMode::explicit_sort) explicit_resort(next);
    ctx->end_level(labels, b + 1 <= depth - 1);
    state = std::move(next);
  }

  if (r.p != r.end) throw std::runtime_error("container: trailing bytes");
  cloud.coords = std::move(state.coords);
  return cloud;
}

PerPointBits per_point_bits(const QuantizedCloud& cloud, const ModelRef& model,
                            int level) {
  if (level < 2 || level > cloud.bit_depth - 1)
    throw std::invalid_argument("per_point_bits: level outside coded range");
  EncodeOptions options;
  options.per_point_level = level;
  EncodeResult result = encode(cloud, model, options);
  return std::move(result.per_point);
}

}  // namespace zpcc
