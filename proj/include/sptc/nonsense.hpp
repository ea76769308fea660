#pragma once

#include "sptc/rng.hpp"
#include "sptc/sequence.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

struct GenConfig;

/// Summary ops supported by the nonsense-document task. Targets concatenate
/// the results of the active ops in this fixed order.
enum NonsenseOp : unsigned {
    kCopyFirstSentence = 1u << 0,
    kCopyQuoted = 1u << 1,
    kCopySentenceWithKeyword = 1u << 2,
};

/// A nonsense document plus the metadata the ops operate on.
struct NonsenseDoc {
    std::vector<TokenSeq> sentences;  // each terminated by PERIOD
    int quote_sentence = -1;          // sentence holding the QUOTE pair
    int keyword_sentence = -1;        // the only sentence containing keyword
    TokenId keyword = 0;
};

NonsenseDoc sample_nonsense_doc(Rng& rng, const Vocab& vocab);

/// Target of an op set over a document (fixed op order).
TokenSeq nonsense_target(const NonsenseDoc& doc, unsigned ops);

/// Input serialization: op-code prefix, keyword, then the document.
TokenSeq nonsense_input(const NonsenseDoc& doc, unsigned ops);

Example gen_nonsense_summary(Rng& rng, const Vocab& vocab, const GenConfig& cfg);

}  // namespace sptc
