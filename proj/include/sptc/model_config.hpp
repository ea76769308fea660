#pragma once

#include <string>

#include "sptc/error.hpp"

namespace sptc {

/// Encoder-decoder transformer dimensions. Defaults are the paper-scale
/// T5-Small shape; desk-scale runs shrink every field.
struct ModelConfig {
    int n_enc_layers = 6;
    int n_dec_layers = 6;
    int n_heads = 8;
    int d_head = 64;
    int d_model = 512;
    int d_mlp = 2048;
    int vocab_size = 32000;
    int relpos_buckets = 32;
    int relpos_max_distance = 128;
    bool tie_embeddings = true;
    bool geglu = false;  // v1.1 activation; config stub only

    int inner_dim() const { return n_heads * d_head; }

    void validate() const {
        auto positive = [](int v, const char* what) {
            if (v < 1) throw ConfigError(std::string(what) + " must be >= 1");
        };
        positive(n_enc_layers, "n_enc_layers");
        positive(n_dec_layers, "n_dec_layers");
        positive(n_heads, "n_heads");
        positive(d_head, "d_head");
        positive(d_model, "d_model");
        positive(d_mlp, "d_mlp");
        positive(vocab_size, "vocab_size");
        positive(relpos_buckets, "relpos_buckets");
        positive(relpos_max_distance, "relpos_max_distance");
        if (relpos_buckets < 4) throw ConfigError("relpos_buckets must be >= 4");
        if (geglu) throw ConfigError("geglu is a config stub; only the relu mlp is implemented");
    }
};

}  // namespace sptc
