#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "sptc/lime.hpp"
#include "sptc/taskgen.hpp"

using namespace sptc;

namespace {

const Vocab kVocab(2048);
const GenConfig kCfg;

// The documented worked instance: rule A * A + B = C with substitutions
// {A: a, B: b, C: d + e}, under a toy mapping of glyphs to content tokens.
LimeInstance worked_instance() {
    LimeInstance inst;
    TokenId A = kVocab.content_begin() + 100;
    TokenId B = kVocab.content_begin() + 101;
    TokenId C = kVocab.content_begin() + 102;
    TokenId star = kVocab.content_begin() + 200;
    TokenId plus = kVocab.content_begin() + 201;
    TokenId eq = kVocab.content_begin() + 202;
    TokenId a = kVocab.content_begin() + 203;
    TokenId b = kVocab.content_begin() + 204;
    TokenId d = kVocab.content_begin() + 205;
    TokenId e = kVocab.content_begin() + 206;
    inst.rule_symbols = {A, B, C};
    inst.math_symbols = {star, plus, eq, a, b, d, e};
    inst.rule = {A, star, A, plus, B, eq, C};
    inst.substitutions = {{a}, {b}, {d, plus, e}};
    inst.result = lime_substitute(inst.rule, inst.rule_symbols, inst.substitutions);
    return inst;
}

}  // namespace

TEST_CASE("worked instance: deduct result and serialization layout") {
    LimeInstance inst = worked_instance();
    TokenId A = inst.rule_symbols[0], B = inst.rule_symbols[1], C = inst.rule_symbols[2];
    TokenId star = inst.math_symbols[0], plus = inst.math_symbols[1], eq = inst.math_symbols[2];
    TokenId a = inst.math_symbols[3], b = inst.math_symbols[4], d = inst.math_symbols[5],
            e = inst.math_symbols[6];

    // a * a + b = d + e
    CHECK(inst.result == TokenSeq{a, star, a, plus, b, eq, d, plus, e});

    // <RuleSymbols> A B C <MathSymbols> * + = a b d e
    CHECK(lime_header(inst) ==
          TokenSeq{Vocab::RULE_SYMBOLS, A, B, C, Vocab::MATH_SYMBOLS, star, plus, eq, a, b, d, e});

    // {A : a , B : b , C : d + e}
    CHECK(lime_dict_tokens(inst) ==
          TokenSeq{Vocab::LBRACE, A, Vocab::COLON, a, Vocab::COMMA, B, Vocab::COLON, b,
                   Vocab::COMMA, C, Vocab::COLON, d, plus, e, Vocab::RBRACE});

    // Deduct input is header <s> rule <s> dict; target is the result.
    TokenSeq expected = lime_header(inst);
    expected.push_back(Vocab::SEP);
    expected.insert(expected.end(), inst.rule.begin(), inst.rule.end());
    expected.push_back(Vocab::SEP);
    TokenSeq dict = lime_dict_tokens(inst);
    expected.insert(expected.end(), dict.begin(), dict.end());
    CHECK(lime_input(inst, LimeVariant::Deduct) == expected);
    CHECK(lime_target(inst, LimeVariant::Deduct) == inst.result);

    // Induct: dict + result -> rule. Abduct: rule + result -> dict.
    CHECK(lime_target(inst, LimeVariant::Induct) == inst.rule);
    CHECK(lime_target(inst, LimeVariant::Abduct) == dict);
    TokenSeq induct = lime_input(inst, LimeVariant::Induct);
    CHECK(std::equal(dict.begin(), dict.end(),
                     induct.begin() + static_cast<std::ptrdiff_t>(lime_header(inst).size()) + 1));
}

TEST_CASE("identity substitution leaves the rule unchanged") {
    LimeInstance inst = worked_instance();
    std::vector<TokenSeq> identity;
    for (TokenId s : inst.rule_symbols) identity.push_back({s});
    CHECK(lime_substitute(inst.rule, inst.rule_symbols, identity) == inst.rule);
}

TEST_CASE("sampled instances satisfy the rewriting oracle and ranges") {
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng(5).derive("lime-test", static_cast<std::uint64_t>(i));
        LimeInstance inst = sample_lime_instance(rng, kVocab);
        // every rule symbol occurs in the rule
        for (TokenId s : inst.rule_symbols) {
            CHECK(oracle::member(inst.rule, s));
        }
        // symbol sets disjoint
        for (TokenId s : inst.rule_symbols) {
            CHECK_FALSE(oracle::member(TokenSeq(inst.math_symbols.begin(), inst.math_symbols.end()), s));
        }
        CHECK(inst.result == oracle::rewrite(inst.rule, inst.rule_symbols, inst.substitutions));
    }
    for (int i = 0; i < n; ++i) {
        Example ex = generate_example("lime", 5, static_cast<std::uint64_t>(i), kVocab, kCfg);
        CHECK(ex.input.size() >= static_cast<std::size_t>(kCfg.lime_input_min));
        CHECK(ex.input.size() <= static_cast<std::size_t>(kCfg.lime_input_max));
        CHECK(ex.target.size() >= static_cast<std::size_t>(kCfg.lime_output_min));
        CHECK(ex.target.size() <= static_cast<std::size_t>(kCfg.lime_output_max));
    }
}

TEST_CASE("the three variants of one instance are mutually consistent") {
    for (int i = 0; i < 200; ++i) {
        Rng rng = Rng(6).derive("lime-consistency", static_cast<std::uint64_t>(i));
        LimeInstance inst = sample_lime_instance(rng, kVocab);
        // rule + dict determine the result (deduct target) via the oracle
        CHECK(lime_target(inst, LimeVariant::Deduct) ==
              oracle::rewrite(inst.rule, inst.rule_symbols, inst.substitutions));
        // induct target is the rule whose rewrite is the stored result
        CHECK(oracle::rewrite(lime_target(inst, LimeVariant::Induct), inst.rule_symbols,
                              inst.substitutions) == inst.result);
        // abduct target re-serializes to the same dictionary the rewrite used
        CHECK(lime_target(inst, LimeVariant::Abduct) == lime_dict_tokens(inst));
    }
}

TEST_CASE("infeasible ranges raise after bounded resampling") {
    GenConfig cfg;
    cfg.lime_input_min = 1;
    cfg.lime_input_max = 2;  // no serialized instance is this short
    Rng rng(0);
    CHECK_THROWS_AS(gen_lime(rng, kVocab, cfg, LimeVariant::Deduct), ConfigError);
}
