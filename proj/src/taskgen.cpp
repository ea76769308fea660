#include "sptc/taskgen.hpp"

#include <algorithm>
#include <map>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "sptc/dyck.hpp"
#include "sptc/error.hpp"
#include "sptc/lime.hpp"
#include "sptc/nonsense.hpp"
#include "sptc/span_corrupt.hpp"

namespace sptc {

void GenConfig::validate() const {
    if (min_len < 1 || min_len > max_len) throw ConfigError("invalid simple-task length range");
    if (lime_input_min < 1 || lime_input_min > lime_input_max) throw ConfigError("invalid rewriting input range");
    if (lime_output_min < 1 || lime_output_min > lime_output_max) throw ConfigError("invalid rewriting output range");
    if (dyck_min_len < 2 || dyck_min_len > dyck_max_len) throw ConfigError("invalid bracket length range");
    if (dyck_pair_count < 1) throw ConfigError("bracket pair count must be >= 1");
    if (!(noise_density > 0.0 && noise_density < 1.0)) throw ConfigError("noise_density must be in (0, 1)");
    if (mean_span_length < 1) throw ConfigError("mean_span_length must be >= 1");
}

// ---------------------------------------------------------------------------
// Target relations
// ---------------------------------------------------------------------------

TokenSeq set_target(const TokenSeq& seq) {
    TokenSeq out;
    std::unordered_set<TokenId> seen;
    for (TokenId t : seq) {
        if (seen.insert(t).second) out.push_back(t);
    }
    return out;
}

bool contains_subsequence(const TokenSeq& hay, const TokenSeq& needle) {
    if (needle.empty() || needle.size() > hay.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
            return true;
        }
    }
    return false;
}

TokenSeq delete_target(const TokenSeq& seq1, const TokenSeq& seq2) {
    if (!seq2.empty() && seq2.size() <= seq1.size()) {
        for (std::size_t i = 0; i + seq2.size() <= seq1.size(); ++i) {
            if (std::equal(seq2.begin(), seq2.end(), seq1.begin() + static_cast<std::ptrdiff_t>(i))) {
                TokenSeq out(seq1.begin(), seq1.begin() + static_cast<std::ptrdiff_t>(i));
                out.insert(out.end(), seq1.begin() + static_cast<std::ptrdiff_t>(i + seq2.size()), seq1.end());
                return out;
            }
        }
    }
    return seq1;  // no match: unchanged
}

TokenSeq sort_target(const TokenSeq& seq1, const TokenSeq& order) {
    std::unordered_map<TokenId, int> counts;
    for (TokenId t : seq1) counts[t]++;
    TokenSeq out;
    out.reserve(seq1.size());
    for (TokenId key : order) {
        auto it = counts.find(key);
        if (it == counts.end()) continue;
        out.insert(out.end(), static_cast<std::size_t>(it->second), key);
        counts.erase(it);
    }
    return out;
}

TokenSeq union_target(const TokenSeq& seq1, const TokenSeq& seq2) {
    TokenSeq joined = seq1;
    joined.insert(joined.end(), seq2.begin(), seq2.end());
    return set_target(joined);
}

TokenSeq intersect_target(const TokenSeq& seq1, const TokenSeq& seq2) {
    std::unordered_set<TokenId> in2(seq2.begin(), seq2.end());
    TokenSeq out;
    std::unordered_set<TokenId> seen;
    for (TokenId t : seq1) {
        if (in2.count(t) && seen.insert(t).second) out.push_back(t);
    }
    return out;
}

TokenSeq set1_minus_set2_target(const TokenSeq& seq1, const TokenSeq& seq2) {
    std::unordered_set<TokenId> in2(seq2.begin(), seq2.end());
    TokenSeq out;
    std::unordered_set<TokenId> seen;
    for (TokenId t : seq1) {
        if (!in2.count(t) && seen.insert(t).second) out.push_back(t);
    }
    return out;
}

TokenSeq set2_minus_set1_target(const TokenSeq& seq1, const TokenSeq& seq2) {
    return set1_minus_set2_target(seq2, seq1);
}

TokenSeq replace_target(const TokenSeq& seq1, TokenId from, TokenId to) {
    TokenSeq out = seq1;
    for (TokenId& t : out) {
        if (t == from) t = to;
    }
    return out;
}

TokenSeq duplicate_target(const TokenSeq& seq) {
    TokenSeq out;
    out.reserve(seq.size() * 2);
    for (TokenId t : seq) {
        out.push_back(t);
        out.push_back(t);
    }
    return out;
}

TokenSeq reverse_target(const TokenSeq& seq) {
    return TokenSeq(seq.rbegin(), seq.rend());
}

TokenSeq deduplicate_target(const TokenSeq& seq) {
    TokenSeq out;
    for (TokenId t : seq) {
        if (out.empty() || out.back() != t) out.push_back(t);
    }
    return out;
}

int longest_word_target(const TokenSeq& words_with_sep) {
    int best = 0;
    int run = 0;
    for (TokenId t : words_with_sep) {
        if (t == Vocab::SEP) {
            best = std::max(best, run);
            run = 0;
        } else {
            ++run;
        }
    }
    return std::max(best, run);
}

bool search_target(const TokenSeq& seq1, const TokenSeq& seq2) {
    return contains_subsequence(seq1, seq2);
}

int count_target(const TokenSeq& seq1, TokenId t) {
    return static_cast<int>(std::count(seq1.begin(), seq1.end(), t));
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

namespace {

// Empty set-operation results are encoded as a bare EOS token so targets
// stay non-empty.
TokenSeq finalize_target(TokenSeq target) {
    if (target.empty()) target.push_back(Vocab::EOS);
    return target;
}

Example make_example(TokenSeq input, TokenSeq target) {
    Example ex;
    ex.input = std::move(input);
    ex.target = finalize_target(std::move(target));
    return ex;
}

TokenId sample_content_token(Rng& rng, const Vocab& vocab) {
    return vocab.content_begin() +
           static_cast<TokenId>(rng.below(static_cast<std::uint64_t>(vocab.content_size())));
}

// Multiset input of the Set/Sort family: l total tokens over t distinct
// values with partitioned amounts, shuffled.
TokenSeq multiset_sequence(Rng& rng, const Vocab& vocab, int l, int t) {
    TokenSeq values = sample_tokens(rng, t, vocab, /*unique=*/true);
    std::vector<int> amounts = random_partition(rng, l, t);
    TokenSeq seq;
    seq.reserve(static_cast<std::size_t>(l));
    for (int i = 0; i < t; ++i) {
        seq.insert(seq.end(), static_cast<std::size_t>(amounts[static_cast<std::size_t>(i)]),
                   values[static_cast<std::size_t>(i)]);
    }
    rng.shuffle(seq);
    return seq;
}

int sample_distinct_count(Rng& rng, const Vocab& vocab, int l) {
    int hi = std::min(l - 1, static_cast<int>(vocab.content_size()));
    if (hi < 1) throw ConfigError("sequence too short for a multiset input");
    return static_cast<int>(rng.range(1, hi));
}

TokenSeq join_with_sep(const TokenSeq& a, const TokenSeq& b) {
    TokenSeq input = a;
    input.push_back(Vocab::SEP);
    input.insert(input.end(), b.begin(), b.end());
    return input;
}

// Shared planted/absent construction of Delete and Search. Returns
// (seq1, seq2); with probability 0.75 seq2 is planted inside seq1.
std::pair<TokenSeq, TokenSeq> planted_pair(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int total = sample_length(rng, std::max(cfg.min_len, 4), cfg.max_len);
    int l2 = static_cast<int>(rng.range(1, std::max(1, (total - 1) / 6)));
    int l1 = total - 1 - l2;
    if (rng.bernoulli(0.75)) {
        TokenSeq seq2 = sample_tokens(rng, l2, vocab);
        int pos = static_cast<int>(rng.range(0, l1 - l2));
        TokenSeq seq1 = sample_tokens(rng, l1, vocab);
        std::copy(seq2.begin(), seq2.end(), seq1.begin() + pos);
        return {std::move(seq1), std::move(seq2)};
    }
    TokenSeq seq1 = sample_tokens(rng, l1, vocab);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        TokenSeq seq2 = sample_tokens(rng, l2, vocab);
        if (!contains_subsequence(seq1, seq2)) return {std::move(seq1), std::move(seq2)};
    }
    throw ConfigError("could not sample an absent subsequence; content region too small");
}

}  // namespace

Example gen_set(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    int t = sample_distinct_count(rng, vocab, l);
    TokenSeq input = multiset_sequence(rng, vocab, l, t);
    return make_example(input, set_target(input));
}

Example gen_delete(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    auto [seq1, seq2] = planted_pair(rng, vocab, cfg);
    return make_example(join_with_sep(seq1, seq2), delete_target(seq1, seq2));
}

Example gen_sort(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int total = sample_length(rng, std::max(cfg.min_len, 4), cfg.max_len);
    int max_t = std::min((total - 2) / 2, static_cast<int>(vocab.content_size()));
    int t = static_cast<int>(rng.range(1, std::max(1, max_t)));
    int l = total - 1 - t;
    TokenSeq values = sample_tokens(rng, t, vocab, /*unique=*/true);
    std::vector<int> amounts = random_partition(rng, l, t);
    TokenSeq seq1;
    seq1.reserve(static_cast<std::size_t>(l));
    for (int i = 0; i < t; ++i) {
        seq1.insert(seq1.end(), static_cast<std::size_t>(amounts[static_cast<std::size_t>(i)]),
                    values[static_cast<std::size_t>(i)]);
    }
    rng.shuffle(seq1);
    TokenSeq order = values;
    rng.shuffle(order);
    return make_example(join_with_sep(seq1, order), sort_target(seq1, order));
}

Example gen_identity(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    TokenSeq input = sample_tokens(rng, l, vocab);
    return make_example(input, input);
}

namespace {

// Shared construction of the Union/Intersect/Minus family: both sequences
// draw (with replacement) from one pool of total/2 unique tokens.
std::pair<TokenSeq, TokenSeq> pooled_pair(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int total = sample_length(rng, std::max(cfg.min_len, 3), cfg.max_len);
    std::vector<int> split = random_partition(rng, total - 1, 2);
    int pool_size = std::min(std::max(2, total / 2), static_cast<int>(vocab.content_size()));
    TokenSeq pool = sample_tokens(rng, pool_size, vocab, /*unique=*/true);
    auto draw = [&](int n) {
        TokenSeq s;
        s.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            s.push_back(pool[static_cast<std::size_t>(rng.below(pool.size()))]);
        }
        return s;
    };
    return {draw(split[0]), draw(split[1])};
}

}  // namespace

Example gen_union(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    auto [seq1, seq2] = pooled_pair(rng, vocab, cfg);
    return make_example(join_with_sep(seq1, seq2), union_target(seq1, seq2));
}

Example gen_intersect(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    auto [seq1, seq2] = pooled_pair(rng, vocab, cfg);
    return make_example(join_with_sep(seq1, seq2), intersect_target(seq1, seq2));
}

Example gen_set1_minus_set2(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    auto [seq1, seq2] = pooled_pair(rng, vocab, cfg);
    return make_example(join_with_sep(seq1, seq2), set1_minus_set2_target(seq1, seq2));
}

Example gen_set2_minus_set1(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    auto [seq1, seq2] = pooled_pair(rng, vocab, cfg);
    return make_example(join_with_sep(seq1, seq2), set2_minus_set1_target(seq1, seq2));
}

Example gen_replace(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, std::max(cfg.min_len - 3, 1), cfg.max_len - 3);
    TokenSeq seq1 = sample_tokens(rng, l, vocab);
    TokenSeq distinct = set_target(seq1);
    TokenId from = distinct[static_cast<std::size_t>(rng.below(distinct.size()))];
    TokenId to = sample_content_token(rng, vocab);
    TokenSeq input = join_with_sep(seq1, {from, to});
    return make_example(input, replace_target(seq1, from, to));
}

Example gen_duplicate(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    TokenSeq input = sample_tokens(rng, l, vocab);
    return make_example(input, duplicate_target(input));
}

Example gen_reverse(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    TokenSeq input = sample_tokens(rng, l, vocab);
    return make_example(input, reverse_target(input));
}

Example gen_deduplicate(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    int t = static_cast<int>(rng.range(1, l - 1));
    // Block tokens drawn with replacement: repeated values may reappear in
    // non-adjacent blocks, as in the documented example.
    TokenSeq values = sample_tokens(rng, t, vocab);
    std::vector<int> amounts = random_partition(rng, l, t);
    TokenSeq input;
    input.reserve(static_cast<std::size_t>(l));
    for (int i = 0; i < t; ++i) {
        input.insert(input.end(), static_cast<std::size_t>(amounts[static_cast<std::size_t>(i)]),
                     values[static_cast<std::size_t>(i)]);
    }
    return make_example(input, deduplicate_target(input));
}

Example gen_last_token(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    TokenSeq input = sample_tokens(rng, l, vocab);
    return make_example(input, {input.back()});
}

Example gen_first_token(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    TokenSeq input = sample_tokens(rng, l, vocab);
    return make_example(input, {input.front()});
}

Example gen_longest_word(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    int w = static_cast<int>(rng.range(1, (l + 1) / 2));
    std::vector<int> word_lens = random_partition(rng, l - w + 1, w);
    TokenSeq input;
    input.reserve(static_cast<std::size_t>(l));
    for (int i = 0; i < w; ++i) {
        if (i) input.push_back(Vocab::SEP);
        TokenSeq word = sample_tokens(rng, word_lens[static_cast<std::size_t>(i)], vocab);
        input.insert(input.end(), word.begin(), word.end());
    }
    return make_example(input, {Vocab::int_token(longest_word_target(input))});
}

Example gen_search(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    auto [seq1, seq2] = planted_pair(rng, vocab, cfg);
    TokenId answer = search_target(seq1, seq2) ? Vocab::YES : Vocab::NO;
    return make_example(join_with_sep(seq1, seq2), {answer});
}

Example gen_length(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int l = sample_length(rng, cfg.min_len, cfg.max_len);
    TokenSeq input = sample_tokens(rng, l, vocab);
    return make_example(input, {Vocab::int_token(static_cast<int>(input.size()))});
}

Example gen_count(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    int total = sample_length(rng, std::max(cfg.min_len, 3), cfg.max_len);
    int l = total - 2;
    TokenId t = sample_content_token(rng, vocab);
    int c = static_cast<int>(rng.range(0, l));
    TokenSeq seq1;
    seq1.reserve(static_cast<std::size_t>(l));
    seq1.insert(seq1.end(), static_cast<std::size_t>(c), t);
    for (int i = c; i < l; ++i) {
        TokenId other = t;
        while (other == t) other = sample_content_token(rng, vocab);
        seq1.push_back(other);
    }
    rng.shuffle(seq1);
    TokenSeq input = join_with_sep(seq1, {t});
    return make_example(input, {Vocab::int_token(count_target(seq1, t))});
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

namespace {

const std::map<std::string, Generator>& registry() {
    static const std::map<std::string, Generator> reg = {
        {"set", gen_set},
        {"delete", gen_delete},
        {"sort", gen_sort},
        {"identity", gen_identity},
        {"union", gen_union},
        {"set1_minus_set2", gen_set1_minus_set2},
        {"replace", gen_replace},
        {"duplicate", gen_duplicate},
        {"intersect", gen_intersect},
        {"reverse", gen_reverse},
        {"set2_minus_set1", gen_set2_minus_set1},
        {"deduplicate", gen_deduplicate},
        {"last_token", gen_last_token},
        {"first_token", gen_first_token},
        {"longest_word", gen_longest_word},
        {"search", gen_search},
        {"length", gen_length},
        {"count", gen_count},
        {"lime", [](Rng& r, const Vocab& v, const GenConfig& c) { return gen_lime_mixture(r, v, c); }},
        {"lime_deduct",
         [](Rng& r, const Vocab& v, const GenConfig& c) { return gen_lime(r, v, c, LimeVariant::Deduct); }},
        {"lime_induct",
         [](Rng& r, const Vocab& v, const GenConfig& c) { return gen_lime(r, v, c, LimeVariant::Induct); }},
        {"lime_abduct",
         [](Rng& r, const Vocab& v, const GenConfig& c) { return gen_lime(r, v, c, LimeVariant::Abduct); }},
        {"dyck", gen_dyck},
        {"nonsense_summary", gen_nonsense_summary},
    };
    return reg;
}

}  // namespace

const std::vector<std::string>& simple_task_names() {
    static const std::vector<std::string> names = {
        "set",       "delete",         "sort",      "identity",       "union",
        "set1_minus_set2", "replace",  "duplicate", "intersect",      "reverse",
        "set2_minus_set1", "deduplicate", "last_token", "first_token",
        "longest_word",    "search",   "length",    "count",
    };
    return names;
}

const std::vector<std::string>& all_task_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& [name, gen] : registry()) out.push_back(name);
        return out;
    }();
    return names;
}

bool is_known_task(const std::string& name) { return registry().count(name) > 0; }

Example generate_example(const std::string& task, std::uint64_t global_seed,
                         std::uint64_t index, const Vocab& vocab, const GenConfig& cfg) {
    auto it = registry().find(task);
    if (it == registry().end()) throw ConfigError("unknown task: " + task);
    cfg.validate();
    Rng stream = Rng(global_seed).derive(task, index);
    Example ex = it->second(stream, vocab, cfg);
    ex.task = task;
    ex.index = index;
    if (ex.input.empty() || ex.target.empty()) {
        throw DataError("generator produced an empty sequence for task " + task);
    }
    return ex;
}

std::vector<Example> generate_range(const std::string& task, std::uint64_t global_seed,
                                    std::uint64_t begin, std::uint64_t end,
                                    const Vocab& vocab, const GenConfig& cfg, int threads) {
    if (end < begin) throw ConfigError("generate_range: end < begin");
    std::vector<Example> out(static_cast<std::size_t>(end - begin));
    auto work = [&](std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) {
            out[static_cast<std::size_t>(i - begin)] =
                generate_example(task, global_seed, i, vocab, cfg);
        }
    };
    const std::uint64_t n = end - begin;
    if (threads <= 1 || n < 2) {
        work(begin, end);
        return out;
    }
    const std::uint64_t nt = std::min<std::uint64_t>(static_cast<std::uint64_t>(threads), n);
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < nt; ++w) {
        std::uint64_t lo = begin + n * w / nt;
        std::uint64_t hi = begin + n * (w + 1) / nt;
        pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
    return out;
}

}  // namespace sptc
