#pragma once

#include <vector>

#include "sptc/rng.hpp"
#include "sptc/sequence.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

struct GenConfig;

/// Bracket alphabet: head/tail token pairs drawn without replacement from the
/// content region, so all heads and tails are distinct and pairing is a
/// bijection.
struct DyckAlphabet {
    std::vector<TokenId> heads;
    std::vector<TokenId> tails;

    std::size_t size() const { return heads.size(); }
};

/// Deterministic alphabet for (vocab, pair_count). Requested pair counts that
/// exceed half the content region are clamped.
DyckAlphabet make_dyck_alphabet(const Vocab& vocab, int pair_count);

/// Well-formed bracket word sampled with a stack: at each step, open a
/// uniformly random pair with probability 0.4 when the length budget allows
/// the matching closes, otherwise close the top of the stack.
TokenSeq gen_dyck_sequence(Rng& rng, const DyckAlphabet& alphabet, const GenConfig& cfg);

/// Pushdown acceptance check against a given alphabet.
bool dyck_accepts(const TokenSeq& word, const DyckAlphabet& alphabet);

/// Maximum nesting depth of a well-formed word.
int dyck_max_depth(const TokenSeq& word, const DyckAlphabet& alphabet);

/// Full task: bracket word turned seq2seq via span corruption.
Example gen_dyck(Rng& rng, const Vocab& vocab, const GenConfig& cfg);

}  // namespace sptc
