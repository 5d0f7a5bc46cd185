#include "zpcc/range_coder.hpp"

#include <cstring>
#include <stdexcept>

namespace zpcc {

void RangeEncoder::shift_low() {
  const uint64_t low64 = static_cast<uint64_t>(low_);
  if (low64 < 0xff00000000000000ull || (low_ >> 64) != 0) {
    const uint8_t carry = static_cast<uint8_t>(low_ >> 64);
    uint8_t byte = cache_;
    do {
      out_->push_back(static_cast<uint8_t>(byte + carry));
      byte = 0xff;
    } while (--cache_size_ != 0);
    cache_ = static_cast<uint8_t>(low64 >> 56);
  }
  ++cache_size_;
  low_ = static_cast<unsigned __int128>(low64 << 8);
}

void RangeEncoder::encode(uint32_t cum, uint32_t freq) {
  const uint64_t q = range_ >> 16;
  low_ += static_cast<unsigned __int128>(cum) * q;
  range_ = q * freq;
  while (range_ < kTop) {
    shift_low();
    range_ <<= 8;
  }
}

void RangeEncoder::finish() {
  // Any value in [low, low + range) identifies the stream; range >= kTop
  // after renormalization, so a multiple of kTop exists in the interval and
  // everything below its top byte is zero.
  low_ = (low_ + (kTop - 1)) & ~static_cast<unsigned __int128>(kTop - 1);
  shift_low();
  shift_low();
}

RangeDecoder::RangeDecoder(std::span<const uint8_t> payload)
    : pos_(payload.data()), end_(payload.data() + payload.size()) {
  next_byte();  // encoder's initial cache byte
  for (int i = 0; i < 8; ++i) code_ = code_ << 8 | next_byte();
}

uint8_t RangeDecoder::next_byte() {
  if (pos_ < end_) return *pos_++;
  if (++tail_zeros_ > kMaxTailZeros)
    throw std::runtime_error("range coder: chunk exhausted early");
  return 0;
}

uint32_t RangeDecoder::decode_target() {
  const uint64_t q = range_ >> 16;
  const uint64_t v = code_ / q;
  return static_cast<uint32_t>(v < 0xffff ? v : 0xffff);
}

void RangeDecoder::consume(uint32_t cum, uint32_t freq) {
  const uint64_t q = range_ >> 16;
  code_ -= static_cast<uint64_t>(cum) * q;
  range_ = q * freq;
  while (range_ < kTop) {
    code_ = code_ << 8 | next_byte();
    range_ <<= 8;
  }
}

namespace {

void append_u32le(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 24));
}

uint32_t read_u32le(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
         static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
}

}  // namespace

CodedChunk encode_symbols(std::span<const uint8_t> symbols,
                          const ProbabilityTable& table) {
  if (!table.quantized() && !symbols.empty())
    throw std::invalid_argument("encode_symbols: table not quantized");
  if (table.rows != symbols.size() && !symbols.empty())
    throw std::invalid_argument("encode_symbols: table row count mismatch");

  CodedChunk chunk;
  chunk.symbol_count = static_cast<uint32_t>(symbols.size());
  append_u32le(chunk.bytes, chunk.symbol_count);

  if (!symbols.empty()) {
    RangeEncoder enc(chunk.bytes);
    for (std::size_t n = 0; n < symbols.size(); ++n) {
      const uint8_t s = symbols[n];
      if (s >= kSymbolCount)
        throw std::invalid_argument("encode_symbols: symbol out of range");
      const uint16_t* q = table.qrow(n);
      uint32_t cum = 0;
      for (int i = 0; i < s; ++i) cum += q[i];
      enc.encode(cum, q[s]);
    }
    enc.finish();
  }

  append_u32le(chunk.bytes, kChunkSentinel);
  return chunk;
}

std::vector<uint8_t> decode_symbols(const CodedChunk& chunk,
                                    const ProbabilityTable& table) {
  if (chunk.bytes.size() < 8)
    throw std::runtime_error("range coder: chunk too short");
  const uint32_t count = read_u32le(chunk.bytes.data());
  if (read_u32le(chunk.bytes.data() + chunk.bytes.size() - 4) != kChunkSentinel)
    throw std::runtime_error("range coder: bad chunk terminator");
  if (count == 0) return {};
  if (!table.quantized() || table.rows != count)
    throw std::invalid_argument("decode_symbols: table row count mismatch");

  RangeDecoder dec(std::span<const uint8_t>(chunk.bytes.data() + 4,
                                            chunk.bytes.size() - 8));
  std::vector<uint8_t> symbols(count);
  for (uint32_t n = 0; n < count; ++n) {
    const uint16_t* q = table.qrow(n);
    const uint32_t target = dec.decode_target();
    uint32_t cum = 0;
    int s = 0;
    while (s < kSymbolCount - 1 && cum + q[s] <= target) cum += q[s], ++s;
    dec.consume(cum, q[s]);
    symbols[n] = static_cast<uint8_t>(s);
  }
  return symbols;
}

}  // namespace zpcc
