#pragma once

#include <cstddef>
#include <cstdint>

namespace zpcc {

// IEEE CRC-32 (reflected, poly 0xEDB88320).
uint32_t crc32(const void* data, std::size_t size, uint32_t seed = 0);

}  // namespace zpcc
