#include "sptc/sampling.hpp"

#include <algorithm>
#include <unordered_set>

#include "sptc/error.hpp"

namespace sptc {

int sample_length(Rng& rng, int min, int max) {
    if (min < 1 || min > max) {
        throw ConfigError("sample_length: need 1 <= min <= max, got [" +
                          std::to_string(min) + ", " + std::to_string(max) + "]");
    }
    return static_cast<int>(rng.range(min, max));
}

namespace {

/// k distinct values from [0, n) without materializing the range
/// (Floyd's sampling), then sorted.
std::vector<std::int64_t> distinct_sorted(Rng& rng, std::int64_t k, std::int64_t n) {
    std::unordered_set<std::int64_t> chosen;
    chosen.reserve(static_cast<std::size_t>(k));
    for (std::int64_t j = n - k; j < n; ++j) {
        std::int64_t t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(j + 1)));
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    std::vector<std::int64_t> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<int> random_partition(Rng& rng, int total, int parts) {
    if (parts < 1 || parts > total) {
        throw ConfigError("random_partition: need 1 <= parts <= total, got parts=" +
                          std::to_string(parts) + " total=" + std::to_string(total));
    }
    // Stars and bars: parts-1 distinct cut points in [1, total-1].
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(parts));
    auto cuts = distinct_sorted(rng, parts - 1, total - 1);
    int prev = 0;
    for (auto c : cuts) {
        int cut = static_cast<int>(c) + 1;
        out.push_back(cut - prev);
        prev = cut;
    }
    out.push_back(total - prev);
    return out;
}

TokenSeq sample_tokens(Rng& rng, int n, const Vocab& vocab, bool unique) {
    if (n < 0) throw ConfigError("sample_tokens: negative count");
    const TokenId base = vocab.content_begin();
    const std::int64_t m = vocab.content_size();
    TokenSeq out;
    out.reserve(static_cast<std::size_t>(n));
    if (unique) {
        if (n > m) {
            throw ConfigError("sample_tokens: " + std::to_string(n) +
                              " unique tokens requested from a content region of " +
                              std::to_string(m));
        }
        // Floyd's sampling gives a distinct set; shuffle for a uniform ordering.
        std::unordered_set<std::int64_t> chosen;
        chosen.reserve(static_cast<std::size_t>(n));
        for (std::int64_t j = m - n; j < m; ++j) {
            std::int64_t t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(j + 1)));
            if (!chosen.insert(t).second) chosen.insert(j);
        }
        for (auto v : chosen) out.push_back(base + static_cast<TokenId>(v));
        std::sort(out.begin(), out.end());
        rng.shuffle(out);
    } else {
        for (int i = 0; i < n; ++i) {
            out.push_back(base + static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(m))));
        }
    }
    return out;
}

}  // namespace sptc
