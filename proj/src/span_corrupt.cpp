#include "sptc/span_corrupt.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "sptc/error.hpp"
#include "sptc/sampling.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

namespace {

// Uniform composition of `total` into `parts` non-negative pieces.
std::vector<int> nonneg_partition(Rng& rng, int total, int parts) {
    // parts-1 distinct markers among total + parts - 1 slots.
    int slots = total + parts - 1;
    std::unordered_set<int> marks;
    for (int j = slots - (parts - 1); j < slots; ++j) {
        int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j + 1)));
        if (!marks.insert(t).second) marks.insert(j);
    }
    std::vector<int> sorted(marks.begin(), marks.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(parts));
    int prev = -1;
    for (int c : sorted) {
        out.push_back(c - prev - 1);
        prev = c;
    }
    out.push_back(slots - 1 - prev);
    return out;
}

}  // namespace

std::pair<TokenSeq, TokenSeq> span_corrupt(const TokenSeq& seq, Rng& rng,
                                           double noise_density, int mean_span_length) {
    const int n = static_cast<int>(seq.size());
    if (n < 2) throw ConfigError("span corruption needs at least 2 tokens");
    const int n_noise = static_cast<int>(std::llround(noise_density * n));
    if (n_noise < 1) throw ConfigError("noise_density too low to mask any token");
    if (n_noise >= n) throw ConfigError("noise_density would mask the whole sequence");
    const int n_span =
        std::max(1, static_cast<int>(std::llround(static_cast<double>(n_noise) / mean_span_length)));
    if (n_span + 1 > Vocab::SENTINEL_COUNT) {
        throw ConfigError("span corruption needs " + std::to_string(n_span + 1) +
                          " sentinels; only " + std::to_string(Vocab::SENTINEL_COUNT) +
                          " exist");
    }
    const int kept = n - n_noise;
    if (kept < n_span - 1) {
        throw ConfigError("sequence too short to place " + std::to_string(n_span) +
                          " non-adjacent spans");
    }

    std::vector<int> span_lens = random_partition(rng, n_noise, n_span);
    // Gaps of kept tokens around the spans; interior gaps stay >= 1 so
    // sentinels never become adjacent.
    std::vector<int> gaps = nonneg_partition(rng, kept - (n_span - 1), n_span + 1);
    for (int i = 1; i < n_span; ++i) gaps[static_cast<std::size_t>(i)] += 1;

    TokenSeq input;
    TokenSeq target;
    input.reserve(static_cast<std::size_t>(kept + n_span));
    target.reserve(static_cast<std::size_t>(n_noise + n_span + 1));
    int pos = 0;
    for (int s = 0; s < n_span; ++s) {
        for (int g = 0; g < gaps[static_cast<std::size_t>(s)]; ++g) {
            input.push_back(seq[static_cast<std::size_t>(pos++)]);
        }
        input.push_back(Vocab::sentinel(s));
        target.push_back(Vocab::sentinel(s));
        for (int k = 0; k < span_lens[static_cast<std::size_t>(s)]; ++k) {
            target.push_back(seq[static_cast<std::size_t>(pos++)]);
        }
    }
    while (pos < n) input.push_back(seq[static_cast<std::size_t>(pos++)]);
    target.push_back(Vocab::sentinel(n_span));
    return {std::move(input), std::move(target)};
}

TokenSeq span_reconstruct(const TokenSeq& input, const TokenSeq& target) {
    // Parse target into spans keyed by sentinel index.
    std::vector<TokenSeq> spans;
    int current = -1;
    for (TokenId t : target) {
        if (Vocab::is_sentinel(t)) {
            int k = Vocab::sentinel_index(t);
            if (k != current + 1) throw DataError("target sentinels out of order");
            current = k;
            spans.emplace_back();
        } else {
            if (spans.empty()) throw DataError("target does not start with a sentinel");
            spans.back().push_back(t);
        }
    }
    if (spans.empty() || !spans.back().empty()) {
        throw DataError("target does not end with the final sentinel");
    }
    spans.pop_back();  // trailing sentinel carries no span

    TokenSeq out;
    std::size_t used = 0;
    for (TokenId t : input) {
        if (Vocab::is_sentinel(t)) {
            int k = Vocab::sentinel_index(t);
            if (k != static_cast<int>(used)) throw DataError("input sentinels out of order");
            if (used >= spans.size()) throw DataError("input has more sentinels than target");
            out.insert(out.end(), spans[used].begin(), spans[used].end());
            ++used;
        } else {
            out.push_back(t);
        }
    }
    if (used != spans.size()) throw DataError("target has more spans than input sentinels");
    return out;
}

}  // namespace sptc
