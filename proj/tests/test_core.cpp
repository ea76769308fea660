#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <thread>

#include "sptc/error.hpp"
#include "sptc/jsonl.hpp"
#include "sptc/rng.hpp"
#include "sptc/sampling.hpp"
#include "sptc/vocab.hpp"

using namespace sptc;

TEST_CASE("vocab regions are disjoint and ordered") {
    Vocab v(32000);
    CHECK(Vocab::SENTINEL_BASE == 16);
    CHECK(Vocab::INT_BASE == 144);
    CHECK(Vocab::CONTENT_BASE == 744);
    CHECK(v.content_size() == 32000 - 744);
    CHECK_THROWS_AS(Vocab(512), ConfigError);
    CHECK_NOTHROW(Vocab(1024));
}

TEST_CASE("integer literal round trip over the full region") {
    CHECK(Vocab::int_token(0) == 144);
    CHECK(Vocab::int_token(599) == 743);
    for (int i = 0; i < 600; ++i) {
        CHECK(Vocab::token_int(Vocab::int_token(i)) == i);
    }
    CHECK_THROWS_AS(Vocab::int_token(600), ConfigError);
    CHECK_THROWS_AS(Vocab::int_token(-1), ConfigError);
    // Wrong-decoder use is a detected error, not silent garbage.
    CHECK_THROWS_AS(Vocab::token_int(744), DataError);
    CHECK_THROWS_AS(Vocab::sentinel_index(Vocab::int_token(3)), DataError);
}

TEST_CASE("derived rng streams are deterministic and independent of order") {
    Rng root(1234);
    Rng a1 = root.derive("task", 7);
    Rng a2 = Rng(1234).derive("task", 7);
    for (int i = 0; i < 100; ++i) CHECK(a1.next_u64() == a2.next_u64());

    // Different indices and tags give different streams.
    Rng b = Rng(1234).derive("task", 8);
    Rng c = Rng(1234).derive("other", 7);
    Rng a3 = Rng(1234).derive("task", 7);
    CHECK(a3.next_u64() != b.next_u64());
    CHECK(Rng(1234).derive("task", 7).next_u64() != c.next_u64());
}

TEST_CASE("rng uniform range and bernoulli sanity") {
    Rng rng(99);
    for (int i = 0; i < 1000; ++i) {
        auto v = rng.range(3, 5);
        CHECK(v >= 3);
        CHECK(v <= 5);
    }
    int heads = 0;
    for (int i = 0; i < 10000; ++i) heads += rng.bernoulli(0.75) ? 1 : 0;
    CHECK(heads > 7200);
    CHECK(heads < 7800);
}

TEST_CASE("sample_length degenerate and bounds") {
    Rng rng(5);
    CHECK(sample_length(rng, 5, 5) == 5);
    for (int i = 0; i < 200; ++i) {
        int l = sample_length(rng, 1, 2);
        CHECK((l == 1 || l == 2));
    }
    CHECK_THROWS_AS(sample_length(rng, 3, 2), ConfigError);
    CHECK_THROWS_AS(sample_length(rng, 0, 2), ConfigError);
}

TEST_CASE("sample_length is uniform by chi-square") {
    // 10^5 draws over [10, 220]; chi-square vs the uniform distribution.
    Rng rng(42);
    const int lo = 10, hi = 220;
    const int k = hi - lo + 1;
    const int n = 100000;
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < n; ++i) counts[static_cast<std::size_t>(sample_length(rng, lo, hi) - lo)]++;
    double expected = static_cast<double>(n) / k;
    double chi2 = 0;
    for (int c : counts) {
        double d = c - expected;
        chi2 += d * d / expected;
    }
    // 210 degrees of freedom; 99.9th percentile is ~276.
    CHECK(chi2 < 276.0);
}

TEST_CASE("random_partition composition property") {
    Rng rng(7);
    CHECK(random_partition(rng, 4, 4) == std::vector<int>{1, 1, 1, 1});
    CHECK(random_partition(rng, 4, 1) == std::vector<int>{4});
    CHECK_THROWS_AS(random_partition(rng, 3, 4), ConfigError);
    for (int i = 0; i < 10000; ++i) {
        auto p = random_partition(rng, 8, 3);
        CHECK(p.size() == 3);
        int sum = 0;
        for (int x : p) {
            CHECK(x >= 1);
            sum += x;
        }
        CHECK(sum == 8);
    }
}

TEST_CASE("random_partition is uniform over compositions") {
    // C(7,2) = 21 compositions of 8 into 3 parts; each should appear
    // with frequency ~ 1/21.
    Rng rng(11);
    std::map<std::vector<int>, int> freq;
    const int n = 21000;
    for (int i = 0; i < n; ++i) freq[random_partition(rng, 8, 3)]++;
    CHECK(freq.size() == 21);
    for (const auto& [comp, c] : freq) {
        CHECK(c > 700);
        CHECK(c < 1300);
    }
}

TEST_CASE("sample_tokens stays in the content region") {
    Vocab v(1024);
    Rng rng(3);
    CHECK(sample_tokens(rng, 0, v).empty());
    auto uniq = sample_tokens(rng, 5, v, true);
    std::set<TokenId> s(uniq.begin(), uniq.end());
    CHECK(s.size() == 5);
    auto bulk = sample_tokens(rng, 10000, v);
    for (TokenId t : bulk) {
        CHECK(t >= 744);
        CHECK(t < 1024);
    }
    CHECK_THROWS_AS(sample_tokens(rng, 281, v, true), ConfigError);
}

TEST_CASE("jsonl round trip") {
    Example ex;
    ex.task = "set";
    ex.index = 12;
    ex.input = {744, 745, 744};
    ex.target = {744, 745};
    std::ostringstream os;
    write_jsonl_line(os, ex);
    CHECK(os.str() ==
          "{\"task\":\"set\",\"index\":12,\"input\":[744,745,744],\"target\":[744,745]}\n");
    Example back = parse_jsonl_line("{\"task\":\"set\",\"index\":12,\"input\":[744,745,744],"
                                    "\"target\":[744,745]}");
    CHECK(back.task == ex.task);
    CHECK(back.index == ex.index);
    CHECK(back.input == ex.input);
    CHECK(back.target == ex.target);
    CHECK_THROWS_AS(parse_jsonl_line("{\"task\":\"set\"}"), DataError);
    CHECK_THROWS_AS(parse_jsonl_line("not json"), DataError);
}
