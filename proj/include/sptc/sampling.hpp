#pragma once

#include <cstdint>

#include "sptc/rng.hpp"
#include "sptc/sequence.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

/// Uniform length on [min, max] inclusive. min must satisfy 1 <= min <= max.
int sample_length(Rng& rng, int min, int max);

/// Uniform random composition: total split into `parts` pieces, each >= 1,
/// summing to total. Uniform over compositions via sorted distinct cut points.
std::vector<int> random_partition(Rng& rng, int total, int parts);

/// n tokens from the content region; distinct when unique is set.
TokenSeq sample_tokens(Rng& rng, int n, const Vocab& vocab, bool unique = false);

}  // namespace sptc
