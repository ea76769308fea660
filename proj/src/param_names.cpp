#include "sptc/param_names.hpp"

#include <algorithm>

#include "sptc/error.hpp"

namespace sptc {

std::vector<TensorSpec> param_specs(const ModelConfig& cfg) {
    cfg.validate();
    const auto d = static_cast<std::size_t>(cfg.d_model);
    const auto inner = static_cast<std::size_t>(cfg.inner_dim());
    const auto f = static_cast<std::size_t>(cfg.d_mlp);
    const auto v = static_cast<std::size_t>(cfg.vocab_size);
    const auto heads = static_cast<std::size_t>(cfg.n_heads);
    const auto buckets = static_cast<std::size_t>(cfg.relpos_buckets);

    std::vector<TensorSpec> specs;
    specs.push_back({"token_embedder/embedding", {v, d}});
    specs.push_back({"encoder/relpos_bias/rel_embedding", {heads, buckets}});
    specs.push_back({"encoder/encoder_norm/scale", {d}});
    for (int l = 0; l < cfg.n_enc_layers; ++l) {
        std::string p = "encoder/layers_" + std::to_string(l) + "/";
        specs.push_back({p + "pre_attention_layer_norm/scale", {d}});
        for (const char* w : {"query", "key", "value"}) {
            specs.push_back({p + "attention/" + w + "/kernel", {d, inner}});
        }
        specs.push_back({p + "attention/out/kernel", {inner, d}});
        specs.push_back({p + "pre_mlp_layer_norm/scale", {d}});
        specs.push_back({p + "mlp/wi/kernel", {d, f}});
        specs.push_back({p + "mlp/wo/kernel", {f, d}});
    }
    specs.push_back({"decoder/relpos_bias/rel_embedding", {heads, buckets}});
    specs.push_back({"decoder/decoder_norm/scale", {d}});
    for (int l = 0; l < cfg.n_dec_layers; ++l) {
        std::string p = "decoder/layers_" + std::to_string(l) + "/";
        specs.push_back({p + "pre_self_attention_layer_norm/scale", {d}});
        for (const char* w : {"query", "key", "value"}) {
            specs.push_back({p + "self_attention/" + w + "/kernel", {d, inner}});
        }
        specs.push_back({p + "self_attention/out/kernel", {inner, d}});
        specs.push_back({p + "pre_cross_attention_layer_norm/scale", {d}});
        for (const char* w : {"query", "key", "value"}) {
            specs.push_back({p + "encoder_decoder_attention/" + w + "/kernel", {d, inner}});
        }
        specs.push_back({p + "encoder_decoder_attention/out/kernel", {inner, d}});
        specs.push_back({p + "pre_mlp_layer_norm/scale", {d}});
        specs.push_back({p + "mlp/wi/kernel", {d, f}});
        specs.push_back({p + "mlp/wo/kernel", {f, d}});
    }
    if (!cfg.tie_embeddings) {
        specs.push_back({"decoder/logits_dense/kernel", {d, v}});
    }
    std::sort(specs.begin(), specs.end(),
              [](const TensorSpec& a, const TensorSpec& b) { return a.name < b.name; });
    return specs;
}

bool is_layer_norm(const std::string& name) {
    return name.size() >= 6 && name.compare(name.size() - 6, 6, "/scale") == 0;
}

namespace {

bool contains(const std::string& name, const char* piece) {
    return name.find(piece) != std::string::npos;
}

}  // namespace

std::string param_type(const std::string& name) {
    if (name == "token_embedder/embedding") return "embedding";
    if (contains(name, "relpos_bias")) return "relpos";
    if (contains(name, "logits_dense")) return "logits";
    if (contains(name, "encoder_norm")) return "encoder_norm";
    if (contains(name, "decoder_norm")) return "decoder_norm";
    if (contains(name, "pre_attention_layer_norm")) return "pre_attention_layer_norm";
    if (contains(name, "pre_self_attention_layer_norm")) return "pre_self_attention_layer_norm";
    if (contains(name, "pre_cross_attention_layer_norm")) return "pre_cross_attention_layer_norm";
    if (contains(name, "pre_mlp_layer_norm")) return "pre_mlp_layer_norm";
    if (contains(name, "/query/")) return "query";
    if (contains(name, "/key/")) return "key";
    if (contains(name, "/value/")) return "value";
    if (contains(name, "/out/")) return "out";
    if (contains(name, "/wi/")) return "wi";
    if (contains(name, "/wo/")) return "wo";
    throw DataError("cannot classify parameter: " + name);
}

std::string param_group(const std::string& name) {
    auto layers = name.find("/layers_");
    if (layers != std::string::npos) {
        auto end = name.find('/', layers + 1);
        return name.substr(0, end);
    }
    auto slash = name.find('/');
    return name.substr(0, slash);
}

ParamSubset parse_subset(const std::string& name) {
    if (name == "attention") return ParamSubset::Attention;
    if (name == "mlp") return ParamSubset::Mlp;
    if (name == "pre_attention_layer_norms") return ParamSubset::PreAttentionLayerNorms;
    if (name == "pre_mlp_layer_norms") return ParamSubset::PreMlpLayerNorms;
    throw ConfigError("unknown parameter subset: " + name);
}

std::string subset_name(ParamSubset subset) {
    switch (subset) {
        case ParamSubset::Attention: return "attention";
        case ParamSubset::Mlp: return "mlp";
        case ParamSubset::PreAttentionLayerNorms: return "pre_attention_layer_norms";
        case ParamSubset::PreMlpLayerNorms: return "pre_mlp_layer_norms";
    }
    throw ConfigError("invalid subset");
}

bool subset_contains(ParamSubset subset, const std::string& name) {
    const std::string type = param_type(name);
    switch (subset) {
        case ParamSubset::Attention:
            return type == "query" || type == "key" || type == "value" || type == "out";
        case ParamSubset::Mlp:
            return type == "wi" || type == "wo";
        case ParamSubset::PreAttentionLayerNorms:
            return type == "pre_attention_layer_norm" ||
                   type == "pre_self_attention_layer_norm" ||
                   type == "pre_cross_attention_layer_norm";
        case ParamSubset::PreMlpLayerNorms:
            return type == "pre_mlp_layer_norm";
    }
    return false;
}

bool is_pre_attention_ln(const std::string& name, PreAttnSelector selector) {
    const std::string type = param_type(name);
    if (type == "pre_attention_layer_norm" || type == "pre_self_attention_layer_norm") {
        return true;
    }
    return selector == PreAttnSelector::All && type == "pre_cross_attention_layer_norm";
}

}  // namespace sptc
