#pragma once

#include <utility>

#include "sptc/rng.hpp"
#include "sptc/sequence.hpp"

namespace sptc {

/// T5-style span corruption. round(noise_density * |seq|) tokens are masked
/// in max(1, round(n_noise / mean_span_length)) non-adjacent contiguous
/// spans with partitioned lengths and uniformly placed starts. The input
/// replaces each span with one sentinel <s_k> (k in span order); the target
/// is sentinel_k followed by the span's tokens, for every span, ending with
/// the final sentinel.
std::pair<TokenSeq, TokenSeq> span_corrupt(const TokenSeq& seq, Rng& rng,
                                           double noise_density, int mean_span_length);

/// Inverse used as the reconstruction oracle: splices target spans back over
/// the sentinels in the corrupted input.
TokenSeq span_reconstruct(const TokenSeq& input, const TokenSeq& target);

}  // namespace sptc
