#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sptc/dyck.hpp"
#include "sptc/span_corrupt.hpp"
#include "sptc/taskgen.hpp"

using namespace sptc;

namespace {
const Vocab kVocab(2048);
}

TEST_CASE("alphabet pairs are distinct and clamped to the content region") {
    DyckAlphabet a = make_dyck_alphabet(kVocab, 100);
    CHECK(a.size() == 100);
    std::set<TokenId> all(a.heads.begin(), a.heads.end());
    all.insert(a.tails.begin(), a.tails.end());
    CHECK(all.size() == 200);
    for (TokenId t : all) CHECK(kVocab.is_content(t));

    // 16000 requested pairs cannot fit a 2048 vocab; clamp to content/2.
    DyckAlphabet big = make_dyck_alphabet(kVocab, 16000);
    CHECK(big.size() == static_cast<std::size_t>(kVocab.content_size() / 2));
}

TEST_CASE("shortest word is head tail") {
    GenConfig cfg;
    cfg.dyck_min_len = 2;
    cfg.dyck_max_len = 2;
    DyckAlphabet a = make_dyck_alphabet(kVocab, 1);
    Rng rng(1);
    TokenSeq w = gen_dyck_sequence(rng, a, cfg);
    CHECK(w == TokenSeq{a.heads[0], a.tails[0]});
}

TEST_CASE("sampled words are accepted by the pushdown oracle") {
    GenConfig cfg;
    DyckAlphabet a = make_dyck_alphabet(kVocab, 64);
    int deep = 0;
    int long_words = 0;
    for (int i = 0; i < 2000; ++i) {
        Rng rng = Rng(4).derive("dyck", static_cast<std::uint64_t>(i));
        TokenSeq w = gen_dyck_sequence(rng, a, cfg);
        CHECK(w.size() >= 2);
        CHECK(w.size() <= 512);
        CHECK(w.size() % 2 == 0);
        REQUIRE(dyck_accepts(w, a));
        if (w.size() >= 32) {
            ++long_words;
            if (dyck_max_depth(w, a) >= 2) ++deep;
        }
    }
    // Depth distribution, recorded as a sanity bound: most long words nest.
    CHECK(deep * 2 > long_words);
}

TEST_CASE("corrupted words form a byte-faithful seq2seq pair") {
    GenConfig cfg;
    for (int i = 0; i < 2000; ++i) {
        Example ex = generate_example("dyck", 9, static_cast<std::uint64_t>(i), kVocab, cfg);
        CHECK(ex.input.size() >= 3);
        CHECK(ex.input.size() <= 512);
        CHECK(ex.target.size() >= 3);
        CHECK(ex.target.size() <= 114);
        DyckAlphabet a = make_dyck_alphabet(kVocab, cfg.dyck_pair_count);
        TokenSeq word = span_reconstruct(ex.input, ex.target);
        REQUIRE(dyck_accepts(word, a));
    }
}

TEST_CASE("single-span corruption layout") {
    // density chosen so exactly one token is masked in one span
    TokenSeq seq = {800, 801, 802, 803, 804, 805, 806, 807, 808, 809};
    Rng rng(2);
    auto [input, target] = span_corrupt(seq, rng, 0.1, 3);
    REQUIRE(input.size() == 10);  // 9 kept + 1 sentinel
    int sentinels = 0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (Vocab::is_sentinel(input[i])) {
            ++sentinels;
            at = i;
        }
    }
    CHECK(sentinels == 1);
    CHECK(input[at] == Vocab::sentinel(0));
    CHECK(target == TokenSeq{Vocab::sentinel(0), seq[at], Vocab::sentinel(1)});
}

TEST_CASE("fifteen tokens at density 0.33 with unit spans mask five tokens") {
    TokenSeq seq;
    for (int i = 0; i < 15; ++i) seq.push_back(900 + i);
    Rng rng(3);
    auto [input, target] = span_corrupt(seq, rng, 0.33, 1);
    int masked = 0;
    for (TokenId t : target) {
        if (!Vocab::is_sentinel(t)) ++masked;
    }
    CHECK(masked == 5);
    int sentinels = 0;
    for (TokenId t : input) {
        if (Vocab::is_sentinel(t)) ++sentinels;
    }
    CHECK(sentinels == 5);
    CHECK(input.size() == 15 - 5 + 5);
}

TEST_CASE("span corruption round trips on random sequences") {
    for (int i = 0; i < 2000; ++i) {
        Rng rng = Rng(12).derive("span", static_cast<std::uint64_t>(i));
        int n = static_cast<int>(rng.range(8, 260));
        TokenSeq seq;
        for (int k = 0; k < n; ++k) {
            seq.push_back(744 + static_cast<TokenId>(rng.below(1000)));
        }
        auto [input, target] = span_corrupt(seq, rng, 0.15, 3);
        CHECK(span_reconstruct(input, target) == seq);
        // sentinels never adjacent in the input
        for (std::size_t j = 1; j < input.size(); ++j) {
            bool adjacent = Vocab::is_sentinel(input[j]) && Vocab::is_sentinel(input[j - 1]);
            CHECK_FALSE(adjacent);
        }
    }
}

TEST_CASE("too-short sequences are a detected error") {
    TokenSeq tiny = {800};
    Rng rng(1);
    CHECK_THROWS_AS(span_corrupt(tiny, rng, 0.5, 1), ConfigError);
    TokenSeq two = {800, 801};
    CHECK_THROWS_AS(span_corrupt(two, rng, 0.1, 3), ConfigError);  // rounds to zero noise
}
