#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sptc/model_config.hpp"
#include "sptc/param_names.hpp"
#include "sptc/rng.hpp"
#include "sptc/sequence.hpp"
#include "sptc/tensor.hpp"

namespace sptc {

/// T5-style relative position bucket. `relative_position` is
/// memory position minus query position.
int relpos_bucket(int relative_position, bool bidirectional, int num_buckets,
                  int max_distance);

/// Default initialization: layer-norm scales 1.0, relative-position bias 0,
/// kernels and embedding truncated normal with mean 0 and SD fan_in^-1/2
/// (variance-corrected so the realized SD matches the target). Each tensor
/// draws from its own stream keyed by (seed, name), so partial
/// re-initializations leave untouched tensors bit-identical.
ParamSet default_init(const ModelConfig& cfg, std::uint64_t seed);

/// One unpadded sequence pair, viewed into caller storage.
struct ItemView {
    const TokenId* enc_ids = nullptr;
    int enc_len = 0;
    const TokenId* dec_in = nullptr;   // shifted-right target, PAD as BOS
    const TokenId* target = nullptr;
    int dec_len = 0;
};

/// Padded batch: the unit the training loop consumes. Pad positions carry
/// PAD ids and contribute zero loss; per-item true lengths drive the masks.
struct Batch {
    int batch_size = 0;
    int enc_width = 0;  // padded widths
    int dec_width = 0;
    std::vector<TokenId> enc_ids;  // batch_size x enc_width
    std::vector<TokenId> dec_in;   // batch_size x dec_width
    std::vector<TokenId> target;   // batch_size x dec_width
    std::vector<int> enc_lens;
    std::vector<int> dec_lens;

    ItemView item(int b) const;
    long total_target_tokens() const;
};

/// Builds a batch from examples. Targets get a trailing EOS unless they are
/// the bare-EOS empty encoding; inputs/targets longer than the caps raise a
/// data error naming the example.
Batch assemble_batch(const std::vector<Example>& examples, const std::vector<std::size_t>& idx,
                     int max_enc_len, int max_dec_len);

template <typename T>
struct AttentionWeights {
    std::vector<T> wq, wk, wv, wo;
};

template <typename T>
struct EncoderLayerParams {
    std::vector<T> ln_attn;
    AttentionWeights<T> attn;
    std::vector<T> ln_mlp;
    std::vector<T> wi, wo;
};

template <typename T>
struct DecoderLayerParams {
    std::vector<T> ln_self;
    AttentionWeights<T> self_attn;
    std::vector<T> ln_cross;
    AttentionWeights<T> cross_attn;
    std::vector<T> ln_mlp;
    std::vector<T> wi, wo;
};

/// Typed working storage for the transformer; also the shape of gradient and
/// optimizer-moment accumulators. Converts to and from the named ParamSet.
template <typename T>
struct ModelParams {
    ModelConfig cfg;
    std::vector<T> embedding;
    std::vector<T> enc_relpos, dec_relpos;
    std::vector<T> enc_norm, dec_norm;
    std::vector<EncoderLayerParams<T>> enc;
    std::vector<DecoderLayerParams<T>> dec;
    std::vector<T> logits_kernel;  // untied only

    ModelParams() = default;
    explicit ModelParams(const ModelConfig& cfg_);

    struct Ref {
        std::string name;
        std::vector<T>* data;
        std::vector<std::size_t> shape;
    };
    /// Named references in lexicographic name order.
    std::vector<Ref> tensors();

    void fill_zero();
    void load(const ParamSet& params);
    ParamSet dump() const;
    std::size_t total_entries();
};

extern template struct ModelParams<float>;
extern template struct ModelParams<double>;

ModelConfig infer_config(const ParamSet& params, int relpos_max_distance = 128);

/// Per-item activation cache; reused across steps.
template <typename T>
struct ItemCache;

template <typename T>
struct ItemResult {
    double loss_sum = 0;    // summed over target positions
    long tokens = 0;        // target positions
    long correct = 0;       // argmax matches under teacher forcing
};

/// Teacher-forced forward pass for one item. Logits stay in the cache.
/// Nonzero dropout needs an rng and applies inverted dropout to the
/// embedding output and every sublayer output; the masks are cached for the
/// backward pass.
template <typename T>
ItemResult<T> forward_item(const ModelParams<T>& p, const ItemView& item, ItemCache<T>& cache,
                           double dropout = 0.0, Rng* rng = nullptr);

/// Backward pass for one item; `loss_scale` is the weight of each target
/// token in the batch loss (1 / total non-pad target tokens). Gradients
/// accumulate into `grads`.
template <typename T>
void backward_item(const ModelParams<T>& p, const ItemView& item, ItemCache<T>& cache,
                   T loss_scale, ModelParams<T>& grads);

/// Teacher-forced logits for one item (dec_len x vocab), for tests and
/// diagnostics.
template <typename T>
std::vector<T> forward_logits(const ModelParams<T>& p, const ItemView& item);

/// Cache factories (ItemCache is an incomplete type at the interface).
template <typename T>
ItemCache<T>* new_item_cache();
template <typename T>
void free_item_cache(ItemCache<T>* cache);

template <typename T>
struct ItemCacheHandle {
    ItemCache<T>* ptr;
    ItemCacheHandle() : ptr(new_item_cache<T>()) {}
    ~ItemCacheHandle() { free_item_cache(ptr); }
    ItemCacheHandle(const ItemCacheHandle&) = delete;
    ItemCacheHandle& operator=(const ItemCacheHandle&) = delete;
    ItemCache<T>& operator*() { return *ptr; }
};

/// Greedy autoregressive decode with cached keys/values. Stops after
/// emitting EOS (kept in the output) or after max_len tokens.
TokenSeq decode_greedy(const ModelParams<float>& p, const TokenSeq& input, int max_len);

}  // namespace sptc
