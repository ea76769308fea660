#include "sptc/crc64.hpp"

namespace sptc {

namespace {

struct Table {
    std::uint64_t t[256];
    Table() {
        constexpr std::uint64_t poly = 0xC96C5795D7870F42ULL;  // reflected ECMA-182
        for (int i = 0; i < 256; ++i) {
            std::uint64_t c = static_cast<std::uint64_t>(i);
            for (int k = 0; k < 8; ++k) {
                c = (c & 1) ? (c >> 1) ^ poly : c >> 1;
            }
            t[i] = c;
        }
    }
};

const Table table;

}  // namespace

void Crc64::update(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t c = state_;
    for (std::size_t i = 0; i < n; ++i) {
        c = table.t[(c ^ p[i]) & 0xff] ^ (c >> 8);
    }
    state_ = c;
}

std::uint64_t crc64(const void* data, std::size_t n) {
    Crc64 c;
    c.update(data, n);
    return c.value();
}

}  // namespace sptc
