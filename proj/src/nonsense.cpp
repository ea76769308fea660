#include "sptc/nonsense.hpp"

#include <algorithm>

#include "sptc/error.hpp"
#include "sptc/sampling.hpp"
#include "sptc/taskgen.hpp"

namespace sptc {

namespace {

TokenId content_token_excluding(Rng& rng, const Vocab& vocab, TokenId banned) {
    for (;;) {
        TokenId t = vocab.content_begin() +
                    static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(vocab.content_size())));
        if (t != banned) return t;
    }
}

}  // namespace

NonsenseDoc sample_nonsense_doc(Rng& rng, const Vocab& vocab) {
    NonsenseDoc doc;
    doc.keyword = vocab.content_begin() +
                  static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(vocab.content_size())));
    int k = static_cast<int>(rng.range(4, 12));
    doc.quote_sentence = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    do {
        doc.keyword_sentence = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
    } while (doc.keyword_sentence == doc.quote_sentence);

    for (int s = 0; s < k; ++s) {
        int body_len = static_cast<int>(rng.range(4, 12));
        TokenSeq sentence;
        for (int i = 0; i < body_len; ++i) {
            sentence.push_back(content_token_excluding(rng, vocab, doc.keyword));
        }
        if (s == doc.quote_sentence) {
            int span_len = static_cast<int>(rng.range(1, 4));
            TokenSeq quoted;
            quoted.push_back(Vocab::QUOTE);
            for (int i = 0; i < span_len; ++i) {
                quoted.push_back(content_token_excluding(rng, vocab, doc.keyword));
            }
            quoted.push_back(Vocab::QUOTE);
            std::size_t at = static_cast<std::size_t>(rng.below(sentence.size() + 1));
            sentence.insert(sentence.begin() + static_cast<std::ptrdiff_t>(at), quoted.begin(),
                            quoted.end());
        }
        if (s == doc.keyword_sentence) {
            std::size_t at = static_cast<std::size_t>(rng.below(sentence.size() + 1));
            sentence.insert(sentence.begin() + static_cast<std::ptrdiff_t>(at), doc.keyword);
        }
        sentence.push_back(Vocab::PERIOD);
        doc.sentences.push_back(std::move(sentence));
    }
    return doc;
}

TokenSeq nonsense_target(const NonsenseDoc& doc, unsigned ops) {
    TokenSeq out;
    if (ops & kCopyFirstSentence) {
        const TokenSeq& s = doc.sentences.front();
        out.insert(out.end(), s.begin(), s.end());
    }
    if (ops & kCopyQuoted) {
        const TokenSeq& s = doc.sentences[static_cast<std::size_t>(doc.quote_sentence)];
        auto first = std::find(s.begin(), s.end(), Vocab::QUOTE);
        auto second = first == s.end() ? s.end() : std::find(first + 1, s.end(), Vocab::QUOTE);
        if (first == s.end() || second == s.end()) {
            throw DataError("document is missing its quoted span");
        }
        out.insert(out.end(), first + 1, second);
    }
    if (ops & kCopySentenceWithKeyword) {
        const TokenSeq& s = doc.sentences[static_cast<std::size_t>(doc.keyword_sentence)];
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

TokenSeq nonsense_input(const NonsenseDoc& doc, unsigned ops) {
    TokenSeq input;
    if (ops & kCopyFirstSentence) input.push_back(Vocab::OP_COPY_FIRST);
    if (ops & kCopyQuoted) input.push_back(Vocab::OP_COPY_QUOTED);
    if (ops & kCopySentenceWithKeyword) input.push_back(Vocab::OP_COPY_KEYWORD);
    input.push_back(doc.keyword);
    for (const TokenSeq& s : doc.sentences) {
        input.insert(input.end(), s.begin(), s.end());
    }
    return input;
}

Example gen_nonsense_summary(Rng& rng, const Vocab& vocab, const GenConfig&) {
    NonsenseDoc doc = sample_nonsense_doc(rng, vocab);
    unsigned ops = 1u + static_cast<unsigned>(rng.below(7));  // nonempty subset of 3 ops
    Example ex;
    ex.input = nonsense_input(doc, ops);
    ex.target = nonsense_target(doc, ops);
    return ex;
}

}  // namespace sptc
