#include "zpcc/prob_table.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace zpcc {

void quantize_row(const float* p, uint16_t* q) {
  double sum = 0.0;
  for (int i = 0; i < kSymbolCount; ++i) {
    const double v = p[i];
    if (!std::isfinite(v)) throw std::invalid_argument("quantize_probs: non-finite probability");
    if (v < 0.0) throw std::invalid_argument("quantize_probs: negative probability");
    sum += v;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("quantize_probs: zero row sum");

  // 16 counts are reserved as the per-symbol floor; the rest is shared by
  // largest remainder.
  constexpr uint32_t kShare = kProbTotal - kSymbolCount;
  std::array<uint32_t, kSymbolCount> base{};
  std::array<std::pair<double, int>, kSymbolCount> rem;
  uint32_t assigned = 0;
  for (int i = 0; i < kSymbolCount; ++i) {
    const double share = static_cast<double>(p[i]) / sum * kShare;
    const double fl = std::floor(share);
    base[i] = static_cast<uint32_t>(fl);
    assigned += base[i];
    rem[i] = {share - fl, i};
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  const uint32_t leftover = kShare > assigned ? kShare - assigned : 0;
  for (uint32_t k = 0; k < leftover; ++k) base[rem[k].second] += 1;

  for (int i = 0; i < kSymbolCount; ++i) q[i] = static_cast<uint16_t>(1 + base[i]);
}

void quantize_probs(ProbabilityTable& table) {
  table.q.resize(table.rows * kSymbolCount);
  for (std::size_t n = 0; n < table.rows; ++n)
    quantize_row(table.row(n), table.q.data() + n * kSymbolCount);
}

}  // namespace zpcc
