#pragma once

#include <cstddef>
#include <cstdint>

namespace sptc {

/// Incremental CRC-64/XZ (ECMA-182 polynomial, reflected).
class Crc64 {
public:
    void update(const void* data, std::size_t n);
    std::uint64_t value() const { return ~state_; }

private:
    std::uint64_t state_ = ~0ULL;
};

std::uint64_t crc64(const void* data, std::size_t n);

}  // namespace sptc
