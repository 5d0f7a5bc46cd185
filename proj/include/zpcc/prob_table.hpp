#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace zpcc {

inline constexpr int kSymbolCount = 16;
inline constexpr uint32_t kProbTotal = uint32_t(1) << 16;

// Per-point 16-way symbol distributions: real rows plus their integer
// quantization (each quantized row sums to exactly 2^16 with a floor of 1,
// so the coder never sees a zero-frequency symbol).
struct ProbabilityTable {
  std::size_t rows = 0;
  std::vector<float> p;          // rows x 16
  std::vector<uint16_t> q;       // rows x 16, empty until quantized

  const float* row(std::size_t n) const { return p.data() + n * kSymbolCount; }
  float* row(std::size_t n) { return p.data() + n * kSymbolCount; }
  const uint16_t* qrow(std::size_t n) const { return q.data() + n * kSymbolCount; }
  bool quantized() const { return !q.empty(); }
};

// Largest-remainder rounding of each row to total 2^16 with a floor of 1 per
// symbol; remainder ties break toward the lower symbol index.
void quantize_probs(ProbabilityTable& table);

// Single-row variant used by the adaptive (row-wise) decode path.
void quantize_row(const float* p, uint16_t* q);

}  // namespace zpcc
