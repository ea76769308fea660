#include "sptc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sptc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
    key_ = seed;
    seed_state(seed);
}

void Rng::seed_state(std::uint64_t key) {
    std::uint64_t x = key;
    for (auto& w : s_) w = splitmix64(x);
    // xoshiro's all-zero state is invalid; splitmix64 never yields four zeros
    // from distinct increments, but guard anyway.
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

Rng Rng::derive(std::string_view tag) const {
    std::uint64_t x = key_;
    std::uint64_t k = splitmix64(x) ^ fnv1a(tag);
    Rng out;
    out.key_ = k;
    out.seed_state(k);
    return out;
}

Rng Rng::derive(std::string_view tag, std::uint64_t index) const {
    std::uint64_t x = key_;
    std::uint64_t k = splitmix64(x) ^ fnv1a(tag);
    k = splitmix64(k) ^ index;
    std::uint64_t k2 = splitmix64(k);
    Rng out;
    out.key_ = k2;
    out.seed_state(k2);
    return out;
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    // Rejection sampling on the top of the range to stay unbiased.
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = next_u64();
        if (r >= threshold) return r % n;
    }
}

std::int64_t Rng::range(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::range: lo > hi");
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::real01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    // Box-Muller; draw u in (0,1] to keep log() finite.
    double u = 1.0 - real01();
    double v = real01();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586477 * v);
}

double Rng::truncated_normal2() {
    for (;;) {
        double z = normal();
        if (z >= -2.0 && z <= 2.0) return z;
    }
}

}  // namespace sptc
