#include "sptc/lime.hpp"

#include <algorithm>
#include <unordered_set>

#include "sptc/error.hpp"
#include "sptc/sampling.hpp"
#include "sptc/taskgen.hpp"

namespace sptc {

namespace {

int index_of(const std::vector<TokenId>& v, TokenId t) {
    auto it = std::find(v.begin(), v.end(), t);
    return it == v.end() ? -1 : static_cast<int>(it - v.begin());
}

}  // namespace

TokenSeq lime_substitute(const TokenSeq& rule, const std::vector<TokenId>& rule_symbols,
                         const std::vector<TokenSeq>& substitutions) {
    TokenSeq out;
    for (TokenId t : rule) {
        int i = index_of(rule_symbols, t);
        if (i >= 0) {
            const TokenSeq& v = substitutions[static_cast<std::size_t>(i)];
            out.insert(out.end(), v.begin(), v.end());
        } else {
            out.push_back(t);
        }
    }
    return out;
}

TokenSeq lime_header(const LimeInstance& inst) {
    TokenSeq header;
    header.push_back(Vocab::RULE_SYMBOLS);
    header.insert(header.end(), inst.rule_symbols.begin(), inst.rule_symbols.end());
    header.push_back(Vocab::MATH_SYMBOLS);
    // Math symbols are declared in first-appearance order: rule first, then
    // the substitution values in dictionary order.
    std::unordered_set<TokenId> rule_set(inst.rule_symbols.begin(), inst.rule_symbols.end());
    std::unordered_set<TokenId> seen;
    auto declare = [&](TokenId t) {
        if (!rule_set.count(t) && seen.insert(t).second) header.push_back(t);
    };
    for (TokenId t : inst.rule) declare(t);
    for (const TokenSeq& v : inst.substitutions) {
        for (TokenId t : v) declare(t);
    }
    return header;
}

TokenSeq lime_dict_tokens(const LimeInstance& inst) {
    TokenSeq out;
    out.push_back(Vocab::LBRACE);
    for (std::size_t i = 0; i < inst.rule_symbols.size(); ++i) {
        if (i) out.push_back(Vocab::COMMA);
        out.push_back(inst.rule_symbols[i]);
        out.push_back(Vocab::COLON);
        const TokenSeq& v = inst.substitutions[i];
        out.insert(out.end(), v.begin(), v.end());
    }
    out.push_back(Vocab::RBRACE);
    return out;
}

TokenSeq lime_input(const LimeInstance& inst, LimeVariant variant) {
    // The two given elements keep their canonical (rule, dict, result) order.
    TokenSeq a;
    TokenSeq b;
    switch (variant) {
        case LimeVariant::Deduct:
            a = inst.rule;
            b = lime_dict_tokens(inst);
            break;
        case LimeVariant::Induct:
            a = lime_dict_tokens(inst);
            b = inst.result;
            break;
        case LimeVariant::Abduct:
            a = inst.rule;
            b = inst.result;
            break;
    }
    TokenSeq input = lime_header(inst);
    input.push_back(Vocab::SEP);
    input.insert(input.end(), a.begin(), a.end());
    input.push_back(Vocab::SEP);
    input.insert(input.end(), b.begin(), b.end());
    return input;
}

TokenSeq lime_target(const LimeInstance& inst, LimeVariant variant) {
    switch (variant) {
        case LimeVariant::Deduct:
            return inst.result;
        case LimeVariant::Induct:
            return inst.rule;
        case LimeVariant::Abduct:
            return lime_dict_tokens(inst);
    }
    throw ConfigError("invalid rewriting variant");
}

LimeInstance sample_lime_instance(Rng& rng, const Vocab& vocab) {
    LimeInstance inst;
    int n_rule = static_cast<int>(rng.range(2, 6));
    int n_math = static_cast<int>(rng.range(4, 12));
    TokenSeq symbols = sample_tokens(rng, n_rule + n_math, vocab, /*unique=*/true);
    inst.rule_symbols.assign(symbols.begin(), symbols.begin() + n_rule);
    inst.math_symbols.assign(symbols.begin() + n_rule, symbols.end());

    int rule_len = static_cast<int>(rng.range(std::max(8, n_rule), 40));
    inst.rule.assign(static_cast<std::size_t>(rule_len), 0);
    // Force every rule symbol to appear: distinct slots first, then fill the
    // rest uniformly over the full symbol union.
    std::vector<int> slots(static_cast<std::size_t>(rule_len));
    for (int i = 0; i < rule_len; ++i) slots[static_cast<std::size_t>(i)] = i;
    rng.shuffle(slots);
    std::vector<bool> fixed(static_cast<std::size_t>(rule_len), false);
    for (int i = 0; i < n_rule; ++i) {
        inst.rule[static_cast<std::size_t>(slots[static_cast<std::size_t>(i)])] =
            inst.rule_symbols[static_cast<std::size_t>(i)];
        fixed[static_cast<std::size_t>(slots[static_cast<std::size_t>(i)])] = true;
    }
    for (int i = 0; i < rule_len; ++i) {
        if (fixed[static_cast<std::size_t>(i)]) continue;
        std::size_t pick = static_cast<std::size_t>(rng.below(symbols.size()));
        inst.rule[static_cast<std::size_t>(i)] = symbols[pick];
    }

    for (int i = 0; i < n_rule; ++i) {
        int vlen = static_cast<int>(rng.range(1, 4));
        TokenSeq value;
        value.reserve(static_cast<std::size_t>(vlen));
        for (int k = 0; k < vlen; ++k) {
            value.push_back(
                inst.math_symbols[static_cast<std::size_t>(rng.below(inst.math_symbols.size()))]);
        }
        inst.substitutions.push_back(std::move(value));
    }
    inst.result = lime_substitute(inst.rule, inst.rule_symbols, inst.substitutions);
    return inst;
}

Example gen_lime(Rng& rng, const Vocab& vocab, const GenConfig& cfg, LimeVariant variant) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        LimeInstance inst = sample_lime_instance(rng, vocab);
        TokenSeq input = lime_input(inst, variant);
        TokenSeq target = lime_target(inst, variant);
        int il = static_cast<int>(input.size());
        int tl = static_cast<int>(target.size());
        if (il < cfg.lime_input_min || il > cfg.lime_input_max) continue;
        if (tl < cfg.lime_output_min || tl > cfg.lime_output_max) continue;
        Example ex;
        ex.input = std::move(input);
        ex.target = std::move(target);
        return ex;
    }
    throw ConfigError("rewriting-task length ranges infeasible after 1000 attempts");
}

Example gen_lime_mixture(Rng& rng, const Vocab& vocab, const GenConfig& cfg) {
    static const LimeVariant variants[3] = {LimeVariant::Deduct, LimeVariant::Induct,
                                            LimeVariant::Abduct};
    LimeVariant v = variants[rng.below(3)];
    return gen_lime(rng, vocab, cfg, v);
}

}  // namespace sptc
