#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "sptc/taskgen.hpp"

using namespace sptc;

namespace {

const Vocab kVocab(2048);
const GenConfig kCfg;

// Toy-symbol mapping used by the documented worked examples: each letter
// stands for a distinct content token.
TokenSeq toks(const std::string& letters) {
    TokenSeq out;
    for (char c : letters) {
        if (c == ' ') continue;
        if (c == '|') {
            out.push_back(Vocab::SEP);
        } else {
            out.push_back(kVocab.content_begin() + (c - 'a'));
        }
    }
    return out;
}

Example gen_nth(const std::string& task, std::uint64_t i) {
    return generate_example(task, 17, i, kVocab, kCfg);
}

}  // namespace

TEST_CASE("worked examples reproduce under the toy mapping") {
    CHECK(set_target(toks("a b a a b b c d")) == toks("a b c d"));
    CHECK(sort_target(toks("c b a a b c b a d"), toks("b a c d")) == toks("b b b a a a c c d"));
    CHECK(union_target(toks("c b a a b"), toks("c b a e f")) == toks("c b a e f"));
    CHECK(set1_minus_set2_target(toks("c b a a b"), toks("c a e f")) == toks("b"));
    CHECK(set2_minus_set1_target(toks("c b c b b"), toks("a a b x y z")) == toks("a x y z"));
    CHECK(intersect_target(toks("c a b c a a b"), toks("a a b")) == toks("a b"));
    CHECK(replace_target(toks("c b a a b"), toks("a")[0], toks("x")[0]) == toks("c b x x b"));
    CHECK(duplicate_target(toks("c a b a a b")) == toks("c c a a b b a a a a b b"));
    CHECK(deduplicate_target(toks("c b b c c d d d d e f e")) == toks("c b c d e f e"));
    CHECK(reverse_target(toks("c a b c a a b")) == toks("b a a c b a c"));
    CHECK(toks("c b b c c a").back() == toks("a")[0]);   // last token
    CHECK(toks("c b b c c a").front() == toks("c")[0]);  // first token
    CHECK(longest_word_target(toks("c b | s | b a f | s d | a a b c w q")) == 6);
    CHECK_FALSE(search_target(toks("a a b c w q a b d e"), toks("c w e")));
    CHECK(toks("a a b c w").size() == 5);  // length
    CHECK(count_target(toks("a a b c a a a w"), toks("a")[0]) == 5);
}

TEST_CASE("delete removes the leftmost contiguous match") {
    CHECK(delete_target(toks("c b a d"), toks("b a")) == toks("c d"));
    // No match leaves sequence 1 unchanged.
    CHECK(delete_target(toks("c b a d"), toks("x y")) == toks("c b a d"));
    // Leftmost of several matches.
    CHECK(delete_target(toks("a b a b a b"), toks("a b")) == toks("a b a b"));
}

TEST_CASE("degenerate inputs") {
    CHECK(set_target(toks("x x x x x x x x x x")) == toks("x"));
    TokenSeq pal = toks("a b a");
    CHECK(reverse_target(pal) == pal);
    CHECK(sort_target(toks("a a a"), toks("a")) == toks("a a a"));
    CHECK(intersect_target(toks("a b"), toks("c d")).empty());
    CHECK(replace_target(toks("a b"), toks("a")[0], toks("a")[0]) == toks("a b"));
}

TEST_CASE("every simple task passes its oracle on 1000 examples") {
    const int n = 1000;
    for (const std::string& task : simple_task_names()) {
        CAPTURE(task);
        for (int i = 0; i < n; ++i) {
            Example ex = gen_nth(task, static_cast<std::uint64_t>(i));
            REQUIRE(!ex.input.empty());
            REQUIRE(!ex.target.empty());
            CHECK(ex.input.size() >= static_cast<std::size_t>(kCfg.min_len));
            CHECK(ex.input.size() <= static_cast<std::size_t>(kCfg.max_len));

            TokenSeq expect;
            if (task == "set") {
                expect = oracle::set_of(ex.input);
            } else if (task == "identity") {
                expect = ex.input;
            } else if (task == "duplicate") {
                expect = oracle::duplicate_each(ex.input);
            } else if (task == "reverse") {
                expect = oracle::reversed(ex.input);
            } else if (task == "deduplicate") {
                expect = oracle::drop_adjacent_dups(ex.input);
            } else if (task == "first_token") {
                expect = {ex.input.front()};
            } else if (task == "last_token") {
                expect = {ex.input.back()};
            } else if (task == "length") {
                expect = {Vocab::int_token(static_cast<int>(ex.input.size()))};
            } else if (task == "longest_word") {
                expect = {Vocab::int_token(oracle::longest_word(ex.input))};
            } else {
                auto [s1, s2] = oracle::split_at_sep(ex.input);
                if (task == "delete") {
                    expect = oracle::delete_first(s1, s2);
                } else if (task == "sort") {
                    expect = oracle::sort_by_order(s1, s2);
                } else if (task == "union") {
                    expect = oracle::union_of(s1, s2);
                } else if (task == "intersect") {
                    expect = oracle::intersect_of(s1, s2);
                } else if (task == "set1_minus_set2") {
                    expect = oracle::minus_of(s1, s2);
                } else if (task == "set2_minus_set1") {
                    expect = oracle::minus_of(s2, s1);
                } else if (task == "replace") {
                    REQUIRE(s2.size() == 2);
                    expect = oracle::replace_all(s1, s2[0], s2[1]);
                } else if (task == "search") {
                    expect = {oracle::contains(s1, s2) ? Vocab::YES : Vocab::NO};
                } else if (task == "count") {
                    REQUIRE(s2.size() == 1);
                    expect = {Vocab::int_token(oracle::count_of(s1, s2[0]))};
                } else {
                    FAIL("unhandled task ", task);
                }
            }
            if (expect.empty()) expect.push_back(Vocab::EOS);
            REQUIRE(ex.target == expect);
        }
    }
}

TEST_CASE("set-family targets never contain duplicates") {
    for (const std::string task :
         {"set", "union", "intersect", "set1_minus_set2", "set2_minus_set1"}) {
        for (int i = 0; i < 300; ++i) {
            Example ex = gen_nth(task, static_cast<std::uint64_t>(i));
            std::set<TokenId> uniq(ex.target.begin(), ex.target.end());
            CHECK(uniq.size() == ex.target.size());
        }
    }
}

TEST_CASE("search answers are an exact mix of planted and absent cases") {
    int yes = 0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        Example ex = gen_nth("search", static_cast<std::uint64_t>(i));
        if (ex.target == TokenSeq{Vocab::YES}) ++yes;
    }
    // 0.75 planted; planting cannot produce "no", absence cannot produce "yes".
    CHECK(yes > n * 0.70);
    CHECK(yes < n * 0.80);
}

TEST_CASE("planted delete shortens sequence 1 by the match length") {
    for (int i = 0; i < 500; ++i) {
        Example ex = gen_nth("delete", static_cast<std::uint64_t>(i));
        auto [s1, s2] = oracle::split_at_sep(ex.input);
        if (oracle::contains(s1, s2)) {
            CHECK(ex.target.size() == s1.size() - s2.size());
        } else {
            CHECK(ex.target == s1);
        }
    }
}

TEST_CASE("regeneration is byte-identical at any worker count") {
    GenConfig cfg;
    cfg.max_len = 60;
    auto serial = generate_range("set", 99, 0, 64, kVocab, cfg, 1);
    auto parallel = generate_range("set", 99, 0, 64, kVocab, cfg, 4);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].input == parallel[i].input);
        CHECK(serial[i].target == parallel[i].target);
        CHECK(serial[i].index == parallel[i].index);
    }
    // And across disjoint sub-ranges.
    auto tail = generate_range("set", 99, 32, 64, kVocab, cfg, 2);
    for (std::size_t i = 0; i < tail.size(); ++i) {
        CHECK(tail[i].input == serial[i + 32].input);
    }
}

TEST_CASE("unknown task is a config error") {
    CHECK_THROWS_AS(generate_example("nosuch", 1, 0, kVocab, kCfg), ConfigError);
    CHECK(is_known_task("set"));
    CHECK_FALSE(is_known_task("nosuch"));
    CHECK(simple_task_names().size() == 18);
}
