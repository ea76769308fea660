#include "sptc/dyck.hpp"

#include <algorithm>
#include <unordered_map>

#include "sptc/error.hpp"
#include "sptc/sampling.hpp"
#include "sptc/span_corrupt.hpp"
#include "sptc/taskgen.hpp"

namespace sptc {

DyckAlphabet make_dyck_alphabet(const Vocab& vocab, int pair_count) {
    if (pair_count < 1) throw ConfigError("bracket pair count must be >= 1");
    int max_pairs = static_cast<int>(vocab.content_size()) / 2;
    int pairs = std::min(pair_count, max_pairs);
    // Fixed derivation from the vocab alone so every stream of a corpus and
    // the acceptance oracle agree on the pairing.
    Rng rng = Rng(0x6b7261636b6574ULL).derive("bracket-alphabet", static_cast<std::uint64_t>(vocab.size));
    TokenSeq tokens = sample_tokens(rng, 2 * pairs, vocab, /*unique=*/true);
    DyckAlphabet a;
    a.heads.assign(tokens.begin(), tokens.begin() + pairs);
    a.tails.assign(tokens.begin() + pairs, tokens.end());
    return a;
}

TokenSeq gen_dyck_sequence(Rng& rng, const DyckAlphabet& alphabet, const GenConfig& cfg) {
    if (alphabet.size() == 0) throw ConfigError("empty bracket alphabet");
    int want = sample_length(rng, cfg.dyck_min_len, cfg.dyck_max_len);
    // Bracket words have even length; round odd draws up within the cap.
    int budget = want + (want & 1);
    budget = std::min(budget, cfg.dyck_max_len - (cfg.dyck_max_len & 1));
    if (budget < 2) throw ConfigError("bracket length range admits no word");

    constexpr double p_open = 0.4;
    TokenSeq word;
    word.reserve(static_cast<std::size_t>(budget));
    std::vector<std::size_t> stack;
    while (static_cast<int>(word.size()) < budget) {
        int remaining = budget - static_cast<int>(word.size());
        bool can_open = static_cast<int>(stack.size()) + 2 <= remaining;
        bool must_open = stack.empty();
        if (must_open || (can_open && rng.bernoulli(p_open))) {
            std::size_t pair = static_cast<std::size_t>(rng.below(alphabet.size()));
            word.push_back(alphabet.heads[pair]);
            stack.push_back(pair);
        } else {
            word.push_back(alphabet.tails[stack.back()]);
            stack.pop_back();
        }
    }
    return word;
}

namespace {

std::unordered_map<TokenId, int> head_index(const DyckAlphabet& a) {
    std::unordered_map<TokenId, int> m;
    for (std::size_t i = 0; i < a.size(); ++i) m[a.heads[i]] = static_cast<int>(i);
    return m;
}

std::unordered_map<TokenId, int> tail_index(const DyckAlphabet& a) {
    std::unordered_map<TokenId, int> m;
    for (std::size_t i = 0; i < a.size(); ++i) m[a.tails[i]] = static_cast<int>(i);
    return m;
}

}  // namespace

bool dyck_accepts(const TokenSeq& word, const DyckAlphabet& alphabet) {
    auto heads = head_index(alphabet);
    auto tails = tail_index(alphabet);
    std::vector<int> stack;
    for (TokenId t : word) {
        auto h = heads.find(t);
        if (h != heads.end()) {
            stack.push_back(h->second);
            continue;
        }
        auto c = tails.find(t);
        if (c == tails.end()) return false;
        if (stack.empty() || stack.back() != c->second) return false;
        stack.pop_back();
    }
    return stack.empty();
}

int dyck_max_depth(const TokenSeq& word, const DyckAlphabet& alphabet) {
    auto heads = head_index(alphabet);
    int depth = 0;
    int best = 0;
    for (TokenId t : word) {
        if (heads.count(t)) {
            best = std::max(best, ++depth);
        } else {
            --depth;
        }
    }
    return best;
}

Example gen_dyck(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    DyckAlphabet alphabet = make_dyck_alphabet(vocab, cfg.dyck_pair_count);
    TokenSeq word = gen_dyck_sequence(rng, alphabet, cfg);
    auto [input, target] = span_corrupt(word, rng, cfg.noise_density, cfg.mean_span_length);
    Example ex;
    ex.input = std::move(input);
    ex.target = std::move(target);
    return ex;
}

}  // namespace sptc
