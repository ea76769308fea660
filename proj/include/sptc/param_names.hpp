#pragma once

#include <string>
#include <vector>

#include "sptc/model_config.hpp"

namespace sptc {

/// Name and shape of one model parameter, following the t5x naming scheme
/// (encoder/layers_0/attention/query/kernel, .../pre_attention_layer_norm/scale,
/// encoder/relpos_bias/rel_embedding, token_embedder/embedding, ...).
struct TensorSpec {
    std::string name;
    std::vector<std::size_t> shape;
};

/// All parameter names with shapes for a configuration, sorted by name.
std::vector<TensorSpec> param_specs(const ModelConfig& cfg);

/// Layer-norm scale vectors are exactly the tensors whose names end in
/// "/scale"; relpos and embeddings count as non-layer-norm.
bool is_layer_norm(const std::string& name);

/// Pooled-statistics type of a parameter: query, key, value, out, wi, wo,
/// pre_attention_layer_norm, pre_self_attention_layer_norm,
/// pre_cross_attention_layer_norm, pre_mlp_layer_norm, encoder_norm,
/// decoder_norm, relpos, embedding, logits.
std::string param_type(const std::string& name);

/// Layer grouping for per-layer statistics: "encoder/layers_i",
/// "decoder/layers_i", or the stack-level groups "encoder", "decoder",
/// "token_embedder" for tensors outside any layer.
std::string param_group(const std::string& name);

/// Subsets of the scale-statistics initialization schemes.
enum class ParamSubset {
    Attention,             // all attention kernels (self, cross, encoder)
    Mlp,                   // wi and wo kernels
    PreAttentionLayerNorms,  // encoder pre-attention + decoder pre-self/pre-cross
    PreMlpLayerNorms,
};

ParamSubset parse_subset(const std::string& name);
std::string subset_name(ParamSubset subset);
bool subset_contains(ParamSubset subset, const std::string& name);

/// Which layer-norm families count as "pre-attention" for the constant-value
/// initialization: all three families, or only the self-attention ones.
enum class PreAttnSelector { All, SelfOnly };

bool is_pre_attention_ln(const std::string& name, PreAttnSelector selector);

}  // namespace sptc
