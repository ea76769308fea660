#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace sptc {

/// Deterministic random stream. Streams are derived, never shared: the
/// stream for example i of a task is a pure function of
/// (global_seed, task_id, i), so generation is reproducible at any
/// parallelism. The generator itself is xoshiro256** seeded through
/// splitmix64 key mixing; all distributions are hand-rolled so results
/// do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Derived stream for a named substream.
    Rng derive(std::string_view tag) const;
    /// Derived stream for (tag, index), e.g. one stream per example.
    Rng derive(std::string_view tag, std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Unbiased draw from [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    /// Uniform on [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi);

    /// Uniform on [0, 1) with 53-bit resolution.
    double real01();

    /// Standard normal via Box-Muller (no cached spare).
    double normal();

    /// Standard normal conditioned on |z| <= 2.
    double truncated_normal2();

    bool bernoulli(double p) { return real01() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    Rng() = default;
    void seed_state(std::uint64_t key);

    std::uint64_t key_ = 0;  // mixing key this stream was derived from
    std::uint64_t s_[4] = {0, 0, 0, 0};
};

}  // namespace sptc
