#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sptc/vocab.hpp"

namespace sptc {

using TokenSeq = std::vector<TokenId>;

/// One seq2seq record of a generated corpus.
struct Example {
    TokenSeq input;
    TokenSeq target;
    std::string task;
    std::uint64_t index = 0;
};

}  // namespace sptc
