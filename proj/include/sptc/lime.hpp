#pragma once

#include <vector>

#include "sptc/rng.hpp"
#include "sptc/sequence.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

struct GenConfig;

enum class LimeVariant { Deduct, Induct, Abduct };

/// One three-element rewriting instance: a rule string over rule and math
/// symbols, a substitution dictionary mapping each rule symbol to a short
/// math-symbol string, and the result of applying the substitutions.
/// Any two elements determine the third.
struct LimeInstance {
    std::vector<TokenId> rule_symbols;   // unique content tokens
    std::vector<TokenId> math_symbols;   // unique, disjoint from rule_symbols
    TokenSeq rule;                       // every rule symbol occurs >= 1 time
    std::vector<TokenSeq> substitutions; // aligned with rule_symbols
    TokenSeq result;                     // substitute(rule, substitutions)
};

/// Applies the substitution dictionary to a rule string. Rule symbols expand
/// to their mapped values; all other tokens pass through.
TokenSeq lime_substitute(const TokenSeq& rule, const std::vector<TokenId>& rule_symbols,
                         const std::vector<TokenSeq>& substitutions);

/// Serialized forms used by all three variants.
TokenSeq lime_header(const LimeInstance& inst);      // <RuleSymbols> ... <MathSymbols> ...
TokenSeq lime_dict_tokens(const LimeInstance& inst); // { s : v , ... }
TokenSeq lime_input(const LimeInstance& inst, LimeVariant variant);
TokenSeq lime_target(const LimeInstance& inst, LimeVariant variant);

/// Samples a raw instance without length constraints.
LimeInstance sample_lime_instance(Rng& rng, const Vocab& vocab);

/// Full generator: resamples until the variant's serialized input/target
/// lengths land in the configured ranges (error after 1000 attempts).
Example gen_lime(Rng& rng, const Vocab& vocab, const GenConfig& cfg, LimeVariant variant);

/// Uniform mixture over the three variants.
Example gen_lime_mixture(Rng& rng, const Vocab& vocab, const GenConfig& cfg);

}  // namespace sptc
