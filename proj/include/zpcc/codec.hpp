#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zpcc/model_file.hpp"
#include "zpcc/types.hpp"

namespace zpcc {

enum class ModelKind : uint8_t { baseline = 0, neural = 1 };

// Model selection for a coding session. The pool pointer must stay valid for
// the session when kind == neural.
struct ModelRef {
  ModelKind kind = ModelKind::baseline;
  const ModelPool* pool = nullptr;

  static ModelRef baseline() { return {}; }
  static ModelRef neural(const ModelPool& p) { return {ModelKind::neural, &p}; }
};

enum class EncodeMode { synchronous, pipelined };

// explicit_sort re-sorts every level during coding to emulate pipelines
// without an order-preserving hierarchy; bench-only, bitstreams identical.
enum class HierarchyMode { morton, explicit_sort };

struct LevelReport {
  int level = 0;
  int boe_index = 0;
  std::size_t parents = 0;
  std::size_t stage_payload_bytes[2] = {0, 0};

  double stage_bits(int s) const { return 8.0 * double(stage_payload_bytes[s - 1]); }
  double total_bits() const { return stage_bits(1) + stage_bits(2); }
};

// Estimated code length per parent at one level, from the quantized tables.
struct PerPointBits {
  int level = -1;
  std::vector<Coord> coords;
  std::vector<double> stage1_bits;
  std::vector<double> stage2_bits;
};

struct EncodeOptions {
  EncodeMode mode = EncodeMode::synchronous;
  HierarchyMode hierarchy = HierarchyMode::morton;
  int per_point_level = -1;  // capture PerPointBits at this level when >= 0
};

struct EncodeResult {
  std::vector<uint8_t> container;
  std::vector<LevelReport> levels;
  PerPointBits per_point;
  std::size_t point_count = 0;

  double bpp() const {
    return point_count ? 8.0 * double(container.size()) / double(point_count) : 0.0;
  }
};

// Progressive encode from level 2 up to bit_depth-1. Deterministic: the
// pipelined and synchronous modes produce byte-identical containers.
EncodeResult encode(const QuantizedCloud& cloud, const ModelRef& model,
                    const EncodeOptions& options = {});

// Exact inverse; requires the same model (the container pins kind, D, K and
// the model-file digest). Verifies the trailing CRC-32 before any coding.
QuantizedCloud decode(std::span<const uint8_t> container, const ModelRef& model,
                      HierarchyMode hierarchy = HierarchyMode::morton);

// Per-parent code lengths at one level, -log2 of the quantized probability
// of each stage's true symbol.
PerPointBits per_point_bits(const QuantizedCloud& cloud, const ModelRef& model,
                            int level);

}  // namespace zpcc
