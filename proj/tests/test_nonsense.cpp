#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sptc/nonsense.hpp"
#include "sptc/taskgen.hpp"

using namespace sptc;

namespace {

const Vocab kVocab(2048);

// Quoted-span extraction restated independently: tokens strictly between
// the first two QUOTE tokens of the whole document.
TokenSeq quoted_of(const std::vector<TokenSeq>& sentences) {
    TokenSeq flat;
    for (const auto& s : sentences) flat.insert(flat.end(), s.begin(), s.end());
    TokenSeq out;
    bool in = false;
    for (TokenId t : flat) {
        if (t == Vocab::QUOTE) {
            if (in) return out;
            in = true;
            continue;
        }
        if (in) out.push_back(t);
    }
    return out;
}

}  // namespace

TEST_CASE("documents have the advertised structure") {
    for (int i = 0; i < 500; ++i) {
        Rng rng = Rng(21).derive("doc", static_cast<std::uint64_t>(i));
        NonsenseDoc doc = sample_nonsense_doc(rng, kVocab);
        CHECK(doc.sentences.size() >= 4);
        CHECK(doc.sentences.size() <= 12);
        int quotes = 0;
        int keyword_sentences = 0;
        for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
            CHECK(doc.sentences[s].back() == Vocab::PERIOD);
            for (TokenId t : doc.sentences[s]) {
                if (t == Vocab::QUOTE) ++quotes;
            }
            if (oracle::member(doc.sentences[s], doc.keyword)) ++keyword_sentences;
        }
        CHECK(quotes == 2);
        CHECK(keyword_sentences == 1);
        CHECK(doc.keyword_sentence != doc.quote_sentence);
    }
}

TEST_CASE("single ops copy the right fragments") {
    Rng rng = Rng(22).derive("doc", 0);
    NonsenseDoc doc = sample_nonsense_doc(rng, kVocab);
    CHECK(nonsense_target(doc, kCopyFirstSentence) == doc.sentences.front());
    CHECK(nonsense_target(doc, kCopyQuoted) == quoted_of(doc.sentences));
    CHECK(nonsense_target(doc, kCopySentenceWithKeyword) ==
          doc.sentences[static_cast<std::size_t>(doc.keyword_sentence)]);
}

TEST_CASE("all three ops concatenate in fixed order") {
    for (int i = 0; i < 200; ++i) {
        Rng rng = Rng(23).derive("doc", static_cast<std::uint64_t>(i));
        NonsenseDoc doc = sample_nonsense_doc(rng, kVocab);
        unsigned ops = kCopyFirstSentence | kCopyQuoted | kCopySentenceWithKeyword;
        TokenSeq expect = doc.sentences.front();
        TokenSeq q = quoted_of(doc.sentences);
        expect.insert(expect.end(), q.begin(), q.end());
        const TokenSeq& ks = doc.sentences[static_cast<std::size_t>(doc.keyword_sentence)];
        expect.insert(expect.end(), ks.begin(), ks.end());
        CHECK(nonsense_target(doc, ops) == expect);

        // input layout: op codes, keyword, document
        TokenSeq input = nonsense_input(doc, ops);
        CHECK(input[0] == Vocab::OP_COPY_FIRST);
        CHECK(input[1] == Vocab::OP_COPY_QUOTED);
        CHECK(input[2] == Vocab::OP_COPY_KEYWORD);
        CHECK(input[3] == doc.keyword);
    }
}

TEST_CASE("generated examples decode against their own documents") {
    GenConfig cfg;
    for (int i = 0; i < 500; ++i) {
        Example ex = generate_example("nonsense_summary", 44, static_cast<std::uint64_t>(i),
                                      kVocab, cfg);
        CHECK(!ex.input.empty());
        CHECK(!ex.target.empty());
        // op prefix is at least one op code followed by the keyword
        CHECK(ex.input[0] >= Vocab::OP_COPY_FIRST);
        CHECK(ex.input[0] <= Vocab::OP_COPY_KEYWORD);
    }
}
