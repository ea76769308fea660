#pragma once

#include <cstdint>
#include <string>

#include "sptc/error.hpp"

namespace sptc {

using TokenId = std::int32_t;

/// Fixed vocabulary layout. Ids are partitioned into disjoint regions:
///
///   [0, 16)     special tokens (PAD, EOS, separators, task markers)
///   [16, 144)   sentinel tokens <s0>..<s127> for span corruption
///   [144, 744)  integer literals encoding 0..599 as single tokens
///   [744, size) content tokens; all "random token" sampling draws here
struct Vocab {
    static constexpr TokenId PAD = 0;
    static constexpr TokenId EOS = 1;
    static constexpr TokenId SEP = 2;  // the <s> separator of two-sequence tasks
    static constexpr TokenId QUOTE = 3;
    static constexpr TokenId PERIOD = 4;
    static constexpr TokenId YES = 5;
    static constexpr TokenId NO = 6;
    // Rule/dict punctuation for the three-element rewriting tasks.
    static constexpr TokenId RULE_SYMBOLS = 7;
    static constexpr TokenId MATH_SYMBOLS = 8;
    static constexpr TokenId LBRACE = 9;
    static constexpr TokenId RBRACE = 10;
    static constexpr TokenId COLON = 11;
    static constexpr TokenId COMMA = 12;
    // Op-code markers for the summary task.
    static constexpr TokenId OP_COPY_FIRST = 13;
    static constexpr TokenId OP_COPY_QUOTED = 14;
    static constexpr TokenId OP_COPY_KEYWORD = 15;

    static constexpr TokenId SENTINEL_BASE = 16;
    static constexpr int SENTINEL_COUNT = 128;
    static constexpr TokenId INT_BASE = SENTINEL_BASE + SENTINEL_COUNT;  // 144
    static constexpr int INT_COUNT = 600;
    static constexpr TokenId CONTENT_BASE = INT_BASE + INT_COUNT;  // 744
    static constexpr TokenId MIN_SIZE = 1024;

    TokenId size = 32000;

    explicit Vocab(TokenId size_ = 32000) : size(size_) {
        if (size < MIN_SIZE) {
            throw ConfigError("vocab size must be >= " + std::to_string(MIN_SIZE) +
                              ", got " + std::to_string(size));
        }
    }

    TokenId content_begin() const { return CONTENT_BASE; }
    TokenId content_size() const { return size - CONTENT_BASE; }

    static TokenId sentinel(int k) {
        if (k < 0 || k >= SENTINEL_COUNT) {
            throw ConfigError("sentinel index out of range: " + std::to_string(k));
        }
        return SENTINEL_BASE + k;
    }
    static bool is_sentinel(TokenId id) {
        return id >= SENTINEL_BASE && id < INT_BASE;
    }
    static int sentinel_index(TokenId id) {
        if (!is_sentinel(id)) {
            throw DataError("token " + std::to_string(id) + " is not a sentinel");
        }
        return id - SENTINEL_BASE;
    }

    /// Integer-literal region is a bijection with [0, 600).
    static TokenId int_token(int v) {
        if (v < 0 || v >= INT_COUNT) {
            throw ConfigError("integer literal out of range: " + std::to_string(v));
        }
        return INT_BASE + v;
    }
    static bool is_int(TokenId id) { return id >= INT_BASE && id < CONTENT_BASE; }
    static int token_int(TokenId id) {
        if (!is_int(id)) {
            throw DataError("token " + std::to_string(id) + " is not an integer literal");
        }
        return id - INT_BASE;
    }

    bool is_content(TokenId id) const { return id >= CONTENT_BASE && id < size; }
};

}  // namespace sptc
