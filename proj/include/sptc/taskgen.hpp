#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sptc/rng.hpp"
#include "sptc/sampling.hpp"
#include "sptc/sequence.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

/// Generation knobs shared by every task family.
struct GenConfig {
    int min_len = 10;   // simple-task input length bounds (total, incl. <s>)
    int max_len = 220;
    int lime_input_min = 68;
    int lime_input_max = 214;
    int lime_output_min = 7;
    int lime_output_max = 74;
    int dyck_min_len = 3;    // raw bracket-word length bounds
    int dyck_max_len = 512;
    int dyck_pair_count = 16000;
    double noise_density = 0.15;
    int mean_span_length = 3;

    void validate() const;
};

// ---------------------------------------------------------------------------
// Target relations. Each maps an already-built input to its target and is the
// production path checked against the independent restatements in the tests.
// ---------------------------------------------------------------------------
TokenSeq set_target(const TokenSeq& seq);                         // first occurrences
TokenSeq delete_target(const TokenSeq& seq1, const TokenSeq& seq2);  // leftmost match removed
TokenSeq sort_target(const TokenSeq& seq1, const TokenSeq& order);
TokenSeq union_target(const TokenSeq& seq1, const TokenSeq& seq2);
TokenSeq intersect_target(const TokenSeq& seq1, const TokenSeq& seq2);
TokenSeq set1_minus_set2_target(const TokenSeq& seq1, const TokenSeq& seq2);
TokenSeq set2_minus_set1_target(const TokenSeq& seq1, const TokenSeq& seq2);
TokenSeq replace_target(const TokenSeq& seq1, TokenId from, TokenId to);
TokenSeq duplicate_target(const TokenSeq& seq);
TokenSeq reverse_target(const TokenSeq& seq);
TokenSeq deduplicate_target(const TokenSeq& seq);  // drop adjacent duplicates
int longest_word_target(const TokenSeq& words_with_sep);  // max run between SEPs
bool search_target(const TokenSeq& seq1, const TokenSeq& seq2);
int count_target(const TokenSeq& seq1, TokenId t);

/// True if `needle` occurs as a contiguous subsequence of `hay`.
bool contains_subsequence(const TokenSeq& hay, const TokenSeq& needle);

// ---------------------------------------------------------------------------
// Generators. Each is a pure function of (rng stream, vocab, config).
// ---------------------------------------------------------------------------
Example gen_set(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_delete(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_sort(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_identity(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_union(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_set1_minus_set2(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_replace(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_duplicate(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_intersect(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_reverse(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_set2_minus_set1(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_deduplicate(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_last_token(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_first_token(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_longest_word(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_search(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_length(Rng& rng, const Vocab& vocab, const GenConfig& cfg);
Example gen_count(Rng& rng, const Vocab& vocab, const GenConfig& cfg);

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------
using Generator = std::function<Example(Rng&, const Vocab&, const GenConfig&)>;

/// Names of the 18 simple tasks, in their documented order.
const std::vector<std::string>& simple_task_names();

/// All registered task names (simple tasks plus the rewriting, bracket and
/// summary families).
const std::vector<std::string>& all_task_names();

bool is_known_task(const std::string& name);

/// Generate example `index` of `task` under `global_seed`. The result is a
/// pure function of (global_seed, task, index).
Example generate_example(const std::string& task, std::uint64_t global_seed,
                         std::uint64_t index, const Vocab& vocab,
                         const GenConfig& cfg);

/// Generate examples [begin, end) of a task, optionally on several worker
/// threads. Output order is by index regardless of worker count.
std::vector<Example> generate_range(const std::string& task, std::uint64_t global_seed,
                                    std::uint64_t begin, std::uint64_t end,
                                    const Vocab& vocab, const GenConfig& cfg,
                                    int threads = 1);

}  // namespace sptc
