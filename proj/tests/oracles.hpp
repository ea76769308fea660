// Independent brute-force restatements of the task definitions. These stay
// deliberately naive (quadratic scans, no shared helpers with the library)
// so they can serve as conformance oracles for the generators.
#pragma once

#include <vector>

#include "sptc/sequence.hpp"
#include "sptc/vocab.hpp"

namespace oracle {

using sptc::TokenId;
using sptc::TokenSeq;

// Output is the input with no duplicates, in original order.
inline TokenSeq set_of(const TokenSeq& in) {
    TokenSeq out;
    for (std::size_t i = 0; i < in.size(); ++i) {
        bool seen = false;
        for (std::size_t j = 0; j < i; ++j) {
            if (in[j] == in[i]) {
                seen = true;
                break;
            }
        }
        if (!seen) out.push_back(in[i]);
    }
    return out;
}

inline bool occurs_at(const TokenSeq& hay, const TokenSeq& needle, std::size_t at) {
    if (at + needle.size() > hay.size()) return false;
    for (std::size_t k = 0; k < needle.size(); ++k) {
        if (hay[at + k] != needle[k]) return false;
    }
    return true;
}

// Sequence 1 with the first occurrence of sequence 2 deleted.
inline TokenSeq delete_first(const TokenSeq& s1, const TokenSeq& s2) {
    for (std::size_t i = 0; i < s1.size(); ++i) {
        if (occurs_at(s1, s2, i)) {
            TokenSeq out;
            for (std::size_t j = 0; j < i; ++j) out.push_back(s1[j]);
            for (std::size_t j = i + s2.size(); j < s1.size(); ++j) out.push_back(s1[j]);
            return out;
        }
    }
    return s1;
}

// Sequence 1 sorted according to the order given by sequence 2.
inline TokenSeq sort_by_order(const TokenSeq& s1, const TokenSeq& order) {
    TokenSeq out;
    for (TokenId key : order) {
        for (TokenId t : s1) {
            if (t == key) out.push_back(t);
        }
    }
    return out;
}

inline bool member(const TokenSeq& s, TokenId t) {
    for (TokenId x : s) {
        if (x == t) return true;
    }
    return false;
}

inline TokenSeq union_of(const TokenSeq& s1, const TokenSeq& s2) {
    TokenSeq joined = s1;
    for (TokenId t : s2) joined.push_back(t);
    return set_of(joined);
}

inline TokenSeq intersect_of(const TokenSeq& s1, const TokenSeq& s2) {
    TokenSeq out;
    for (TokenId t : set_of(s1)) {
        if (member(s2, t)) out.push_back(t);
    }
    return out;
}

inline TokenSeq minus_of(const TokenSeq& s1, const TokenSeq& s2) {
    TokenSeq out;
    for (TokenId t : set_of(s1)) {
        if (!member(s2, t)) out.push_back(t);
    }
    return out;
}

inline TokenSeq replace_all(const TokenSeq& s1, TokenId from, TokenId to) {
    TokenSeq out;
    for (TokenId t : s1) out.push_back(t == from ? to : t);
    return out;
}

inline TokenSeq duplicate_each(const TokenSeq& s) {
    TokenSeq out;
    for (TokenId t : s) {
        out.push_back(t);
        out.push_back(t);
    }
    return out;
}

inline TokenSeq reversed(const TokenSeq& s) {
    TokenSeq out;
    for (std::size_t i = s.size(); i > 0; --i) out.push_back(s[i - 1]);
    return out;
}

inline TokenSeq drop_adjacent_dups(const TokenSeq& s) {
    TokenSeq out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 0 || s[i] != s[i - 1]) out.push_back(s[i]);
    }
    return out;
}

// Longest run of non-separator tokens.
inline int longest_word(const TokenSeq& s) {
    int best = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == sptc::Vocab::SEP) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < s.size() && s[j] != sptc::Vocab::SEP) ++j;
        if (static_cast<int>(j - i) > best) best = static_cast<int>(j - i);
        i = j;
    }
    return best;
}

inline bool contains(const TokenSeq& s1, const TokenSeq& s2) {
    for (std::size_t i = 0; i < s1.size(); ++i) {
        if (occurs_at(s1, s2, i)) return true;
    }
    return false;
}

inline int count_of(const TokenSeq& s1, TokenId t) {
    int c = 0;
    for (TokenId x : s1) {
        if (x == t) ++c;
    }
    return c;
}

// Rewriting oracle for the three-element tasks: scans the rule and emits
// either the substitution value or the literal token.
inline TokenSeq rewrite(const TokenSeq& rule, const std::vector<TokenId>& symbols,
                        const std::vector<TokenSeq>& values) {
    TokenSeq out;
    for (TokenId t : rule) {
        bool hit = false;
        for (std::size_t i = 0; i < symbols.size(); ++i) {
            if (symbols[i] == t) {
                for (TokenId v : values[i]) out.push_back(v);
                hit = true;
                break;
            }
        }
        if (!hit) out.push_back(t);
    }
    return out;
}

// Splits an input of the two-sequence tasks at the first separator.
inline std::pair<TokenSeq, TokenSeq> split_at_sep(const TokenSeq& input) {
    TokenSeq a;
    TokenSeq b;
    bool after = false;
    for (TokenId t : input) {
        if (!after && t == sptc::Vocab::SEP) {
            after = true;
            continue;
        }
        (after ? b : a).push_back(t);
    }
    return {a, b};
}

}  // namespace oracle
