#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "zpcc/prob_table.hpp"

namespace zpcc {

// Arithmetic-coded block of 16-way symbols. bytes holds the full wire form:
// u32le symbol count, range-coder payload, u32le sentinel.
struct CodedChunk {
  std::vector<uint8_t> bytes;
  uint32_t symbol_count = 0;

  std::size_t payload_size() const { return bytes.size() - 8; }
};

inline constexpr uint32_t kChunkSentinel = 0x304b4843u;  // "CHK0"

// Carry-aware range coder over a fixed total of 2^16. 64-bit range with
// byte-wise renormalization at 2^56 keeps the per-symbol truncation loss
// below 2^-40 bits. The flush aligns the final code value to a multiple of
// 2^56 so only the top byte needs to be written; the decoder zero-fills the
// omitted tail.
class RangeEncoder {
 public:
  explicit RangeEncoder(std::vector<uint8_t>& out) : out_(&out) {}

  // cum/freq from a quantized row; cum + freq <= 2^16, freq >= 1.
  void encode(uint32_t cum, uint32_t freq);
  void finish();

 private:
  static constexpr uint64_t kTop = uint64_t(1) << 56;

  void shift_low();

  unsigned __int128 low_ = 0;
  uint64_t range_ = ~uint64_t(0);
  uint8_t cache_ = 0;
  uint64_t cache_size_ = 1;
  std::vector<uint8_t>* out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const uint8_t> payload);

  // Returns a value in [0, 2^16) locating the next symbol in the cumulative
  // row; follow with consume() for that symbol's interval.
  uint32_t decode_target();
  void consume(uint32_t cum, uint32_t freq);

 private:
  static constexpr uint64_t kTop = uint64_t(1) << 56;
  // Reads past the payload return zeros (the encoder omits the zero tail of
  // the aligned final code value); a bounded allowance distinguishes that
  // from a truncated stream.
  static constexpr std::size_t kMaxTailZeros = 16;

  uint8_t next_byte();

  uint64_t range_ = ~uint64_t(0);
  uint64_t code_ = 0;
  const uint8_t* pos_;
  const uint8_t* end_;
  std::size_t tail_zeros_ = 0;
};

// Arithmetic-codes symbols[i] under table row i. Row count must equal the
// symbol count; the table must be quantized.
CodedChunk encode_symbols(std::span<const uint8_t> symbols,
                          const ProbabilityTable& table);

// Exact inverse given the identical table.
std::vector<uint8_t> decode_symbols(const CodedChunk& chunk,
                                    const ProbabilityTable& table);

}  // namespace zpcc
