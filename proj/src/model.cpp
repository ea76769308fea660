#include "sptc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "sptc/error.hpp"
#include "sptc/vocab.hpp"

namespace sptc {

namespace {

constexpr double kRmsEps = 1e-6;
// SD of a standard normal truncated to [-2, 2]; divides the truncated draw
// so the realized SD matches the requested one.
constexpr double kTruncNormStd = 0.87962566103423978;

// ---------------------------------------------------------------------------
// Small dense kernels, row-major.
// ---------------------------------------------------------------------------

template <typename T>
void mm(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
    if (!accumulate) std::fill(c, c + static_cast<std::size_t>(m) * n, T(0));
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<std::size_t>(i) * k;
        T* crow = c + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            T av = arow[kk];
            const T* brow = b + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// c(k x n) += a^T b with a: m x k, b: m x n
template <typename T>
void mm_at_b(const T* a, const T* b, T* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<std::size_t>(i) * k;
        const T* brow = b + static_cast<std::size_t>(i) * n;
        for (int kk = 0; kk < k; ++kk) {
            T av = arow[kk];
            T* crow = c + static_cast<std::size_t>(kk) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// c(m x k) (+)= a b^T with a: m x n, b: k x n
template <typename T>
void mm_a_bt(const T* a, const T* b, T* c, int m, int n, int k, bool accumulate = false) {
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<std::size_t>(i) * n;
        T* crow = c + static_cast<std::size_t>(i) * k;
        for (int kk = 0; kk < k; ++kk) {
            const T* brow = b + static_cast<std::size_t>(kk) * n;
            T acc = 0;
            for (int j = 0; j < n; ++j) acc += arow[j] * brow[j];
            if (accumulate) {
                crow[kk] += acc;
            } else {
                crow[kk] = acc;
            }
        }
    }
}

template <typename T>
void rmsnorm_fwd(const T* x, const T* scale, T* out, T* rinv, int rows, int d) {
    for (int i = 0; i < rows; ++i) {
        const T* xr = x + static_cast<std::size_t>(i) * d;
        T* or_ = out + static_cast<std::size_t>(i) * d;
        double ss = 0;
        for (int c = 0; c < d; ++c) ss += static_cast<double>(xr[c]) * xr[c];
        T r = static_cast<T>(1.0 / std::sqrt(ss / d + kRmsEps));
        rinv[i] = r;
        for (int c = 0; c < d; ++c) or_[c] = xr[c] * r * scale[c];
    }
}

// dx accumulates; dscale accumulates.
template <typename T>
void rmsnorm_bwd(const T* x, const T* scale, const T* rinv, const T* g, T* dx, T* dscale,
                 int rows, int d) {
    for (int i = 0; i < rows; ++i) {
        const T* xr = x + static_cast<std::size_t>(i) * d;
        const T* gr = g + static_cast<std::size_t>(i) * d;
        T* dxr = dx + static_cast<std::size_t>(i) * d;
        T r = rinv[i];
        double dot = 0;
        for (int c = 0; c < d; ++c) dot += static_cast<double>(gr[c]) * scale[c] * xr[c];
        T k = static_cast<T>(static_cast<double>(r) * r * r * dot / d);
        for (int c = 0; c < d; ++c) {
            dscale[c] += gr[c] * xr[c] * r;
            dxr[c] += gr[c] * scale[c] * r - k * xr[c];
        }
    }
}

}  // namespace

int relpos_bucket(int relative_position, bool bidirectional, int num_buckets, int max_distance) {
    int ret = 0;
    int n = -relative_position;
    if (bidirectional) {
        num_buckets /= 2;
        if (n < 0) ret += num_buckets;
        n = std::abs(n);
    } else {
        n = std::max(n, 0);
    }
    const int max_exact = num_buckets / 2;
    if (n < max_exact) {
        ret += n;
    } else {
        int val = max_exact +
                  static_cast<int>(std::log(static_cast<double>(n) / max_exact) /
                                   std::log(static_cast<double>(max_distance) / max_exact) *
                                   (num_buckets - max_exact));
        ret += std::min(val, num_buckets - 1);
    }
    return ret;
}

// ---------------------------------------------------------------------------
// ModelParams
// ---------------------------------------------------------------------------

template <typename T>
ModelParams<T>::ModelParams(const ModelConfig& cfg_) : cfg(cfg_) {
    cfg.validate();
    const auto d = static_cast<std::size_t>(cfg.d_model);
    const auto inner = static_cast<std::size_t>(cfg.inner_dim());
    const auto f = static_cast<std::size_t>(cfg.d_mlp);
    embedding.assign(static_cast<std::size_t>(cfg.vocab_size) * d, T(0));
    enc_relpos.assign(static_cast<std::size_t>(cfg.n_heads) * cfg.relpos_buckets, T(0));
    dec_relpos.assign(static_cast<std::size_t>(cfg.n_heads) * cfg.relpos_buckets, T(0));
    enc_norm.assign(d, T(0));
    dec_norm.assign(d, T(0));
    enc.resize(static_cast<std::size_t>(cfg.n_enc_layers));
    for (auto& l : enc) {
        l.ln_attn.assign(d, T(0));
        l.attn.wq.assign(d * inner, T(0));
        l.attn.wk.assign(d * inner, T(0));
        l.attn.wv.assign(d * inner, T(0));
        l.attn.wo.assign(inner * d, T(0));
        l.ln_mlp.assign(d, T(0));
        l.wi.assign(d * f, T(0));
        l.wo.assign(f * d, T(0));
    }
    dec.resize(static_cast<std::size_t>(cfg.n_dec_layers));
    for (auto& l : dec) {
        l.ln_self.assign(d, T(0));
        l.self_attn.wq.assign(d * inner, T(0));
        l.self_attn.wk.assign(d * inner, T(0));
        l.self_attn.wv.assign(d * inner, T(0));
        l.self_attn.wo.assign(inner * d, T(0));
        l.ln_cross.assign(d, T(0));
        l.cross_attn.wq.assign(d * inner, T(0));
        l.cross_attn.wk.assign(d * inner, T(0));
        l.cross_attn.wv.assign(d * inner, T(0));
        l.cross_attn.wo.assign(inner * d, T(0));
        l.ln_mlp.assign(d, T(0));
        l.wi.assign(d * f, T(0));
        l.wo.assign(f * d, T(0));
    }
    if (!cfg.tie_embeddings) {
        logits_kernel.assign(d * static_cast<std::size_t>(cfg.vocab_size), T(0));
    }
}

template <typename T>
std::vector<typename ModelParams<T>::Ref> ModelParams<T>::tensors() {
    std::vector<Ref> out;
    auto add = [&](const std::string& name, std::vector<T>& v, std::vector<std::size_t> shape) {
        out.push_back(Ref{name, &v, std::move(shape)});
    };
    const auto d = static_cast<std::size_t>(cfg.d_model);
    const auto inner = static_cast<std::size_t>(cfg.inner_dim());
    const auto f = static_cast<std::size_t>(cfg.d_mlp);
    const auto v = static_cast<std::size_t>(cfg.vocab_size);
    const auto heads = static_cast<std::size_t>(cfg.n_heads);
    const auto buckets = static_cast<std::size_t>(cfg.relpos_buckets);

    add("token_embedder/embedding", embedding, {v, d});
    add("encoder/relpos_bias/rel_embedding", enc_relpos, {heads, buckets});
    add("encoder/encoder_norm/scale", enc_norm, {d});
    for (int l = 0; l < cfg.n_enc_layers; ++l) {
        std::string p = "encoder/layers_" + std::to_string(l) + "/";
        auto& e = enc[static_cast<std::size_t>(l)];
        add(p + "pre_attention_layer_norm/scale", e.ln_attn, {d});
        add(p + "attention/query/kernel", e.attn.wq, {d, inner});
        add(p + "attention/key/kernel", e.attn.wk, {d, inner});
        add(p + "attention/value/kernel", e.attn.wv, {d, inner});
        add(p + "attention/out/kernel", e.attn.wo, {inner, d});
        add(p + "pre_mlp_layer_norm/scale", e.ln_mlp, {d});
        add(p + "mlp/wi/kernel", e.wi, {d, f});
        add(p + "mlp/wo/kernel", e.wo, {f, d});
    }
    add("decoder/relpos_bias/rel_embedding", dec_relpos, {heads, buckets});
    add("decoder/decoder_norm/scale", dec_norm, {d});
    for (int l = 0; l < cfg.n_dec_layers; ++l) {
        std::string p = "decoder/layers_" + std::to_string(l) + "/";
        auto& dl = dec[static_cast<std::size_t>(l)];
        add(p + "pre_self_attention_layer_norm/scale", dl.ln_self, {d});
        add(p + "self_attention/query/kernel", dl.self_attn.wq, {d, inner});
        add(p + "self_attention/key/kernel", dl.self_attn.wk, {d, inner});
        add(p + "self_attention/value/kernel", dl.self_attn.wv, {d, inner});
        add(p + "self_attention/out/kernel", dl.self_attn.wo, {inner, d});
        add(p + "pre_cross_attention_layer_norm/scale", dl.ln_cross, {d});
        add(p + "encoder_decoder_attention/query/kernel", dl.cross_attn.wq, {d, inner});
        add(p + "encoder_decoder_attention/key/kernel", dl.cross_attn.wk, {d, inner});
        add(p + "encoder_decoder_attention/value/kernel", dl.cross_attn.wv, {d, inner});
        add(p + "encoder_decoder_attention/out/kernel", dl.cross_attn.wo, {inner, d});
        add(p + "pre_mlp_layer_norm/scale", dl.ln_mlp, {d});
        add(p + "mlp/wi/kernel", dl.wi, {d, f});
        add(p + "mlp/wo/kernel", dl.wo, {f, d});
    }
    if (!cfg.tie_embeddings) {
        add("decoder/logits_dense/kernel", logits_kernel, {d, v});
    }
    std::sort(out.begin(), out.end(), [](const Ref& a, const Ref& b) { return a.name < b.name; });
    return out;
}

template <typename T>
void ModelParams<T>::fill_zero() {
    for (auto& ref : tensors()) std::fill(ref.data->begin(), ref.data->end(), T(0));
}

template <typename T>
void ModelParams<T>::load(const ParamSet& params) {
    for (auto& ref : tensors()) {
        const Tensor& t = params.at(ref.name);
        if (t.shape != ref.shape) {
            std::string msg = "tensor " + ref.name + " has shape (";
            for (auto s : t.shape) msg += std::to_string(s) + ",";
            msg += ") but the model expects (";
            for (auto s : ref.shape) msg += std::to_string(s) + ",";
            msg += ")";
            throw DataError(msg);
        }
        ref.data->resize(t.data.size());
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            (*ref.data)[i] = static_cast<T>(t.data[i]);
        }
    }
}

template <typename T>
ParamSet ModelParams<T>::dump() const {
    ParamSet out;
    auto& self = const_cast<ModelParams<T>&>(*this);
    for (auto& ref : self.tensors()) {
        Tensor t;
        t.shape = ref.shape;
        t.data.resize(ref.data->size());
        for (std::size_t i = 0; i < t.data.size(); ++i) {
            t.data[i] = static_cast<float>((*ref.data)[i]);
        }
        out.insert(ref.name, std::move(t));
    }
    return out;
}

template <typename T>
std::size_t ModelParams<T>::total_entries() {
    std::size_t n = 0;
    for (auto& ref : tensors()) n += ref.data->size();
    return n;
}

template struct ModelParams<float>;
template struct ModelParams<double>;

// ---------------------------------------------------------------------------
// Initialization
// ---------------------------------------------------------------------------

ParamSet default_init(const ModelConfig& cfg, std::uint64_t seed) {
    ParamSet out;
    Rng root(seed);
    for (const TensorSpec& spec : param_specs(cfg)) {
        Tensor t(spec.shape);
        if (is_layer_norm(spec.name)) {
            std::fill(t.data.begin(), t.data.end(), 1.0f);
        } else if (param_type(spec.name) == "relpos") {
            // zero-initialized
        } else {
            // fan-in: leading dim for kernels, trailing (model) dim for the
            // embedding table.
            std::size_t fan_in =
                spec.name == "token_embedder/embedding" ? spec.shape[1] : spec.shape[0];
            double sd = 1.0 / std::sqrt(static_cast<double>(fan_in));
            Rng rng = root.derive(spec.name);
            for (float& v : t.data) {
                v = static_cast<float>(rng.truncated_normal2() / kTruncNormStd * sd);
            }
        }
        out.insert(spec.name, std::move(t));
    }
    return out;
}

ModelConfig infer_config(const ParamSet& params, int relpos_max_distance) {
    ModelConfig cfg;
    const Tensor& emb = params.at("token_embedder/embedding");
    if (emb.shape.size() != 2) throw DataError("embedding must be rank 2");
    cfg.vocab_size = static_cast<int>(emb.shape[0]);
    cfg.d_model = static_cast<int>(emb.shape[1]);
    const Tensor& rp = params.at("encoder/relpos_bias/rel_embedding");
    cfg.n_heads = static_cast<int>(rp.shape[0]);
    cfg.relpos_buckets = static_cast<int>(rp.shape[1]);
    const Tensor& q = params.at("encoder/layers_0/attention/query/kernel");
    cfg.d_head = static_cast<int>(q.shape[1]) / cfg.n_heads;
    const Tensor& wi = params.at("encoder/layers_0/mlp/wi/kernel");
    cfg.d_mlp = static_cast<int>(wi.shape[1]);
    int n_enc = 0;
    while (params.contains("encoder/layers_" + std::to_string(n_enc) +
                           "/pre_attention_layer_norm/scale")) {
        ++n_enc;
    }
    int n_dec = 0;
    while (params.contains("decoder/layers_" + std::to_string(n_dec) +
                           "/pre_self_attention_layer_norm/scale")) {
        ++n_dec;
    }
    cfg.n_enc_layers = n_enc;
    cfg.n_dec_layers = n_dec;
    cfg.tie_embeddings = !params.contains("decoder/logits_dense/kernel");
    cfg.relpos_max_distance = relpos_max_distance;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Batch assembly
// ---------------------------------------------------------------------------

ItemView Batch::item(int b) const {
    ItemView v;
    v.enc_ids = enc_ids.data() + static_cast<std::size_t>(b) * enc_width;
    v.enc_len = enc_lens[static_cast<std::size_t>(b)];
    v.dec_in = dec_in.data() + static_cast<std::size_t>(b) * dec_width;
    v.target = target.data() + static_cast<std::size_t>(b) * dec_width;
    v.dec_len = dec_lens[static_cast<std::size_t>(b)];
    return v;
}

long Batch::total_target_tokens() const {
    long n = 0;
    for (int l : dec_lens) n += l;
    return n;
}

Batch assemble_batch(const std::vector<Example>& examples, const std::vector<std::size_t>& idx,
                     int max_enc_len, int max_dec_len) {
    Batch batch;
    batch.batch_size = static_cast<int>(idx.size());
    int enc_w = 1, dec_w = 1;
    for (std::size_t i : idx) {
        const Example& ex = examples.at(i);
        int el = static_cast<int>(ex.input.size());
        bool bare_eos = ex.target.size() == 1 && ex.target[0] == Vocab::EOS;
        int dl = static_cast<int>(ex.target.size()) + (bare_eos ? 0 : 1);
        if (el > max_enc_len) {
            throw DataError("example " + ex.task + "/" + std::to_string(ex.index) +
                            " input length " + std::to_string(el) + " exceeds seq_len " +
                            std::to_string(max_enc_len));
        }
        if (dl > max_dec_len) {
            throw DataError("example " + ex.task + "/" + std::to_string(ex.index) +
                            " target length " + std::to_string(dl) + " exceeds seq_len " +
                            std::to_string(max_dec_len));
        }
        enc_w = std::max(enc_w, el);
        dec_w = std::max(dec_w, dl);
    }
    batch.enc_width = enc_w;
    batch.dec_width = dec_w;
    batch.enc_ids.assign(static_cast<std::size_t>(batch.batch_size) * enc_w, Vocab::PAD);
    batch.dec_in.assign(static_cast<std::size_t>(batch.batch_size) * dec_w, Vocab::PAD);
    batch.target.assign(static_cast<std::size_t>(batch.batch_size) * dec_w, Vocab::PAD);
    for (int b = 0; b < batch.batch_size; ++b) {
        const Example& ex = examples.at(idx[static_cast<std::size_t>(b)]);
        auto* er = batch.enc_ids.data() + static_cast<std::size_t>(b) * enc_w;
        std::copy(ex.input.begin(), ex.input.end(), er);
        batch.enc_lens.push_back(static_cast<int>(ex.input.size()));
        TokenSeq full = ex.target;
        if (!(full.size() == 1 && full[0] == Vocab::EOS)) full.push_back(Vocab::EOS);
        auto* tr = batch.target.data() + static_cast<std::size_t>(b) * dec_w;
        std::copy(full.begin(), full.end(), tr);
        auto* dr = batch.dec_in.data() + static_cast<std::size_t>(b) * dec_w;
        dr[0] = Vocab::PAD;  // BOS
        std::copy(full.begin(), full.end() - 1, dr + 1);
        batch.dec_lens.push_back(static_cast<int>(full.size()));
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Forward / backward
// ---------------------------------------------------------------------------

namespace {

template <typename T>
struct AttnCache {
    std::vector<T> h;  // normed query-side input
    std::vector<T> q, k, v;
    std::vector<T> p;  // heads x Lq x Lk, zero beyond the causal frontier
    std::vector<T> ctx;
};

template <typename T>
struct EncLayerCache {
    std::vector<T> x_in, r1;
    AttnCache<T> attn;
    std::vector<T> x_mid, r2, h2, u;
    std::vector<T> attn_mask, mlp_mask;  // dropout masks, empty when inactive
};

template <typename T>
struct DecLayerCache {
    std::vector<T> x_in, r1;
    AttnCache<T> self_attn;
    std::vector<T> x_mid, r2;
    AttnCache<T> cross_attn;  // k/v hold the encoder projections
    std::vector<T> x_mid2, r3, h3, u;
    std::vector<T> self_mask, cross_mask, mlp_mask;
};

}  // namespace

template <typename T>
struct ItemCache {
    int enc_len = 0, dec_len = 0;
    std::vector<EncLayerCache<T>> enc;
    std::vector<T> enc_pre_final, enc_rfinal, enc_out;
    std::vector<DecLayerCache<T>> dec;
    std::vector<T> dec_pre_final, dec_rfinal, dec_out;
    std::vector<T> logits;
    std::vector<int> enc_buckets, dec_buckets;
    std::vector<T> enc_embed_mask, dec_embed_mask;
    double dropout = 0.0;
    Rng* drop_rng = nullptr;

    // backward scratch
    std::vector<T> dx, g, dq, dk, dv, dctx, du, dh, d_enc_out, dlogits, srow, dprow, bg;
};

namespace {

// Inverted dropout: entries are 0 or 1/(1-p).
template <typename T>
void sample_mask(std::vector<T>& mask, std::size_t n, double p, Rng* rng) {
    mask.resize(n);
    const T keep = static_cast<T>(1.0 / (1.0 - p));
    for (std::size_t i = 0; i < n; ++i) mask[i] = rng->bernoulli(p) ? T(0) : keep;
}

// Adds src (through an optional dropout mask) into dst.
template <typename T>
void residual_add(std::vector<T>& dst, const std::vector<T>& src, const std::vector<T>& mask) {
    if (mask.empty()) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += mask[i] * src[i];
    }
}

// Branch gradient through an optional dropout mask; returns dx when inactive.
template <typename T>
const T* masked_grad(const std::vector<T>& dx, const std::vector<T>& mask, std::vector<T>& scratch) {
    if (mask.empty()) return dx.data();
    scratch.resize(dx.size());
    for (std::size_t i = 0; i < dx.size(); ++i) scratch[i] = dx[i] * mask[i];
    return scratch.data();
}

template <typename T>
void build_bias_table(std::vector<int>& buckets, int lq, int lk, bool bidirectional,
                      const ModelConfig& cfg) {
    buckets.assign(static_cast<std::size_t>(lq) * lk, 0);
    for (int i = 0; i < lq; ++i) {
        for (int j = 0; j < lk; ++j) {
            buckets[static_cast<std::size_t>(i) * lk + j] =
                relpos_bucket(j - i, bidirectional, cfg.relpos_buckets, cfg.relpos_max_distance);
        }
    }
}

// Scores, softmax and context for all heads. bias may be null (cross
// attention carries no position bias).
template <typename T>
void attn_fwd(const T* q, const T* k, const T* v, T* p, T* ctx, const T* bias,
              const int* buckets, int heads, int dh, int lq, int lk, bool causal,
              int n_buckets, std::vector<T>& srow) {
    const int inner = heads * dh;
    const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
    srow.resize(static_cast<std::size_t>(lk));
    std::fill(p, p + static_cast<std::size_t>(heads) * lq * lk, T(0));
    std::fill(ctx, ctx + static_cast<std::size_t>(lq) * inner, T(0));
    for (int hh = 0; hh < heads; ++hh) {
        const int o = hh * dh;
        T* ph = p + static_cast<std::size_t>(hh) * lq * lk;
        for (int i = 0; i < lq; ++i) {
            const int jmax = causal ? i : lk - 1;
            const T* qi = q + static_cast<std::size_t>(i) * inner + o;
            T best = -std::numeric_limits<T>::infinity();
            for (int j = 0; j <= jmax; ++j) {
                const T* kj = k + static_cast<std::size_t>(j) * inner + o;
                T acc = 0;
                for (int c = 0; c < dh; ++c) acc += qi[c] * kj[c];
                acc *= inv;
                if (bias) {
                    acc += bias[hh * n_buckets + buckets[static_cast<std::size_t>(i) * lk + j]];
                }
                srow[static_cast<std::size_t>(j)] = acc;
                best = std::max(best, acc);
            }
            double denom = 0;
            for (int j = 0; j <= jmax; ++j) {
                double e = std::exp(static_cast<double>(srow[static_cast<std::size_t>(j)] - best));
                srow[static_cast<std::size_t>(j)] = static_cast<T>(e);
                denom += e;
            }
            T* pr = ph + static_cast<std::size_t>(i) * lk;
            T* ci = ctx + static_cast<std::size_t>(i) * inner + o;
            for (int j = 0; j <= jmax; ++j) {
                T pv = static_cast<T>(srow[static_cast<std::size_t>(j)] / denom);
                pr[j] = pv;
                const T* vj = v + static_cast<std::size_t>(j) * inner + o;
                for (int c = 0; c < dh; ++c) ci[c] += pv * vj[c];
            }
        }
    }
}

// Backward through softmax attention. dq/dk/dv must be zeroed by the caller;
// dbias (the relative-position gradient) accumulates when non-null.
template <typename T>
void attn_bwd(const T* q, const T* k, const T* v, const T* p, const T* dctx, T* dq, T* dk,
              T* dv, T* dbias, const int* buckets, int heads, int dh, int lq, int lk,
              bool causal, int n_buckets, std::vector<T>& dprow) {
    const int inner = heads * dh;
    const T inv = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));
    dprow.resize(static_cast<std::size_t>(lk));
    for (int hh = 0; hh < heads; ++hh) {
        const int o = hh * dh;
        const T* ph = p + static_cast<std::size_t>(hh) * lq * lk;
        for (int i = 0; i < lq; ++i) {
            const int jmax = causal ? i : lk - 1;
            const T* pr = ph + static_cast<std::size_t>(i) * lk;
            const T* dci = dctx + static_cast<std::size_t>(i) * inner + o;
            double psum = 0;
            for (int j = 0; j <= jmax; ++j) {
                const T* vj = v + static_cast<std::size_t>(j) * inner + o;
                T acc = 0;
                for (int c = 0; c < dh; ++c) acc += dci[c] * vj[c];
                dprow[static_cast<std::size_t>(j)] = acc;
                psum += static_cast<double>(pr[j]) * acc;
                T* dvj = dv + static_cast<std::size_t>(j) * inner + o;
                T pv = pr[j];
                for (int c = 0; c < dh; ++c) dvj[c] += pv * dci[c];
            }
            const T* qi = q + static_cast<std::size_t>(i) * inner + o;
            T* dqi = dq + static_cast<std::size_t>(i) * inner + o;
            for (int j = 0; j <= jmax; ++j) {
                T ds = pr[j] * (dprow[static_cast<std::size_t>(j)] - static_cast<T>(psum));
                if (dbias) {
                    dbias[hh * n_buckets + buckets[static_cast<std::size_t>(i) * lk + j]] += ds;
                }
                T dsi = ds * inv;
                const T* kj = k + static_cast<std::size_t>(j) * inner + o;
                T* dkj = dk + static_cast<std::size_t>(j) * inner + o;
                for (int c = 0; c < dh; ++c) {
                    dqi[c] += dsi * kj[c];
                    dkj[c] += dsi * qi[c];
                }
            }
        }
    }
}

template <typename T>
void embed_rows(const std::vector<T>& table, const TokenId* ids, int n, int d, std::vector<T>& out,
                int vocab_size) {
    out.assign(static_cast<std::size_t>(n) * d, T(0));
    for (int i = 0; i < n; ++i) {
        TokenId id = ids[i];
        if (id < 0 || id >= vocab_size) {
            throw DataError("token id " + std::to_string(id) + " outside model vocab of " +
                            std::to_string(vocab_size));
        }
        std::copy(table.begin() + static_cast<std::size_t>(id) * d,
                  table.begin() + (static_cast<std::size_t>(id) + 1) * d,
                  out.begin() + static_cast<std::size_t>(i) * d);
    }
}

template <typename T>
void encoder_forward(const ModelParams<T>& p, const ItemView& item, ItemCache<T>& c) {
    const ModelConfig& cfg = p.cfg;
    const int d = cfg.d_model;
    const int inner = cfg.inner_dim();
    const int f = cfg.d_mlp;
    const int le = item.enc_len;

    c.enc.resize(p.enc.size());
    build_bias_table<T>(c.enc_buckets, le, le, /*bidirectional=*/true, cfg);
    std::vector<T> x;
    embed_rows(p.embedding, item.enc_ids, le, d, x, cfg.vocab_size);
    const bool drop = c.dropout > 0.0 && c.drop_rng != nullptr;
    if (drop) {
        sample_mask(c.enc_embed_mask, x.size(), c.dropout, c.drop_rng);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= c.enc_embed_mask[i];
    } else {
        c.enc_embed_mask.clear();
    }

    for (std::size_t l = 0; l < p.enc.size(); ++l) {
        const auto& lp = p.enc[l];
        auto& lc = c.enc[l];
        lc.x_in = x;
        lc.r1.resize(static_cast<std::size_t>(le));
        lc.attn.h.resize(static_cast<std::size_t>(le) * d);
        rmsnorm_fwd(x.data(), lp.ln_attn.data(), lc.attn.h.data(), lc.r1.data(), le, d);
        lc.attn.q.resize(static_cast<std::size_t>(le) * inner);
        lc.attn.k.resize(static_cast<std::size_t>(le) * inner);
        lc.attn.v.resize(static_cast<std::size_t>(le) * inner);
        mm(lc.attn.h.data(), lp.attn.wq.data(), lc.attn.q.data(), le, d, inner);
        mm(lc.attn.h.data(), lp.attn.wk.data(), lc.attn.k.data(), le, d, inner);
        mm(lc.attn.h.data(), lp.attn.wv.data(), lc.attn.v.data(), le, d, inner);
        lc.attn.p.resize(static_cast<std::size_t>(cfg.n_heads) * le * le);
        lc.attn.ctx.resize(static_cast<std::size_t>(le) * inner);
        attn_fwd(lc.attn.q.data(), lc.attn.k.data(), lc.attn.v.data(), lc.attn.p.data(),
                 lc.attn.ctx.data(), p.enc_relpos.data(), c.enc_buckets.data(), cfg.n_heads,
                 cfg.d_head, le, le, /*causal=*/false, cfg.relpos_buckets, c.srow);
        // residual add of ctx @ wo
        c.g.resize(static_cast<std::size_t>(le) * d);
        mm(lc.attn.ctx.data(), lp.attn.wo.data(), c.g.data(), le, inner, d);
        if (drop) {
            sample_mask(lc.attn_mask, c.g.size(), c.dropout, c.drop_rng);
        } else {
            lc.attn_mask.clear();
        }
        residual_add(x, c.g, lc.attn_mask);

        lc.x_mid = x;
        lc.r2.resize(static_cast<std::size_t>(le));
        lc.h2.resize(static_cast<std::size_t>(le) * d);
        rmsnorm_fwd(x.data(), lp.ln_mlp.data(), lc.h2.data(), lc.r2.data(), le, d);
        lc.u.resize(static_cast<std::size_t>(le) * f);
        mm(lc.h2.data(), lp.wi.data(), lc.u.data(), le, d, f);
        for (auto& uv : lc.u) uv = std::max(uv, T(0));
        c.g.resize(static_cast<std::size_t>(le) * d);
        mm(lc.u.data(), lp.wo.data(), c.g.data(), le, f, d);
        if (drop) {
            sample_mask(lc.mlp_mask, c.g.size(), c.dropout, c.drop_rng);
        } else {
            lc.mlp_mask.clear();
        }
        residual_add(x, c.g, lc.mlp_mask);
    }
    c.enc_pre_final = x;
    c.enc_rfinal.resize(static_cast<std::size_t>(le));
    c.enc_out.resize(static_cast<std::size_t>(le) * d);
    rmsnorm_fwd(x.data(), p.enc_norm.data(), c.enc_out.data(), c.enc_rfinal.data(), le, d);
}

template <typename T>
void decoder_forward(const ModelParams<T>& p, const ItemView& item, ItemCache<T>& c) {
    const ModelConfig& cfg = p.cfg;
    const int d = cfg.d_model;
    const int inner = cfg.inner_dim();
    const int f = cfg.d_mlp;
    const int ld = item.dec_len;
    const int le = item.enc_len;

    c.dec.resize(p.dec.size());
    build_bias_table<T>(c.dec_buckets, ld, ld, /*bidirectional=*/false, cfg);
    std::vector<T> x;
    embed_rows(p.embedding, item.dec_in, ld, d, x, cfg.vocab_size);
    const bool drop = c.dropout > 0.0 && c.drop_rng != nullptr;
    if (drop) {
        sample_mask(c.dec_embed_mask, x.size(), c.dropout, c.drop_rng);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= c.dec_embed_mask[i];
    } else {
        c.dec_embed_mask.clear();
    }

    for (std::size_t l = 0; l < p.dec.size(); ++l) {
        const auto& lp = p.dec[l];
        auto& lc = c.dec[l];
        lc.x_in = x;
        lc.r1.resize(static_cast<std::size_t>(ld));
        lc.self_attn.h.resize(static_cast<std::size_t>(ld) * d);
        rmsnorm_fwd(x.data(), lp.ln_self.data(), lc.self_attn.h.data(), lc.r1.data(), ld, d);
        lc.self_attn.q.resize(static_cast<std::size_t>(ld) * inner);
        lc.self_attn.k.resize(static_cast<std::size_t>(ld) * inner);
        lc.self_attn.v.resize(static_cast<std::size_t>(ld) * inner);
        mm(lc.self_attn.h.data(), lp.self_attn.wq.data(), lc.self_attn.q.data(), ld, d, inner);
        mm(lc.self_attn.h.data(), lp.self_attn.wk.data(), lc.self_attn.k.data(), ld, d, inner);
        mm(lc.self_attn.h.data(), lp.self_attn.wv.data(), lc.self_attn.v.data(), ld, d, inner);
        lc.self_attn.p.resize(static_cast<std::size_t>(cfg.n_heads) * ld * ld);
        lc.self_attn.ctx.resize(static_cast<std::size_t>(ld) * inner);
        attn_fwd(lc.self_attn.q.data(), lc.self_attn.k.data(), lc.self_attn.v.data(),
                 lc.self_attn.p.data(), lc.self_attn.ctx.data(), p.dec_relpos.data(),
                 c.dec_buckets.data(), cfg.n_heads, cfg.d_head, ld, ld, /*causal=*/true,
                 cfg.relpos_buckets, c.srow);
        c.g.resize(static_cast<std::size_t>(ld) * d);
        mm(lc.self_attn.ctx.data(), lp.self_attn.wo.data(), c.g.data(), ld, inner, d);
        if (drop) {
            sample_mask(lc.self_mask, c.g.size(), c.dropout, c.drop_rng);
        } else {
            lc.self_mask.clear();
        }
        residual_add(x, c.g, lc.self_mask);

        lc.x_mid = x;
        lc.r2.resize(static_cast<std::size_t>(ld));
        lc.cross_attn.h.resize(static_cast<std::size_t>(ld) * d);
        rmsnorm_fwd(x.data(), lp.ln_cross.data(), lc.cross_attn.h.data(), lc.r2.data(), ld, d);
        lc.cross_attn.q.resize(static_cast<std::size_t>(ld) * inner);
        lc.cross_attn.k.resize(static_cast<std::size_t>(le) * inner);
        lc.cross_attn.v.resize(static_cast<std::size_t>(le) * inner);
        mm(lc.cross_attn.h.data(), lp.cross_attn.wq.data(), lc.cross_attn.q.data(), ld, d, inner);
        mm(c.enc_out.data(), lp.cross_attn.wk.data(), lc.cross_attn.k.data(), le, d, inner);
        mm(c.enc_out.data(), lp.cross_attn.wv.data(), lc.cross_attn.v.data(), le, d, inner);
        lc.cross_attn.p.resize(static_cast<std::size_t>(cfg.n_heads) * ld * le);
        lc.cross_attn.ctx.resize(static_cast<std::size_t>(ld) * inner);
        attn_fwd(lc.cross_attn.q.data(), lc.cross_attn.k.data(), lc.cross_attn.v.data(),
                 lc.cross_attn.p.data(), lc.cross_attn.ctx.data(), static_cast<const T*>(nullptr),
                 static_cast<const int*>(nullptr), cfg.n_heads, cfg.d_head, ld, le,
                 /*causal=*/false, cfg.relpos_buckets, c.srow);
        c.g.resize(static_cast<std::size_t>(ld) * d);
        mm(lc.cross_attn.ctx.data(), lp.cross_attn.wo.data(), c.g.data(), ld, inner, d);
        if (drop) {
            sample_mask(lc.cross_mask, c.g.size(), c.dropout, c.drop_rng);
        } else {
            lc.cross_mask.clear();
        }
        residual_add(x, c.g, lc.cross_mask);

        lc.x_mid2 = x;
        lc.r3.resize(static_cast<std::size_t>(ld));
        lc.h3.resize(static_cast<std::size_t>(ld) * d);
        rmsnorm_fwd(x.data(), lp.ln_mlp.data(), lc.h3.data(), lc.r3.data(), ld, d);
        lc.u.resize(static_cast<std::size_t>(ld) * f);
        mm(lc.h3.data(), lp.wi.data(), lc.u.data(), ld, d, f);
        for (auto& uv : lc.u) uv = std::max(uv, T(0));
        c.g.resize(static_cast<std::size_t>(ld) * d);
        mm(lc.u.data(), lp.wo.data(), c.g.data(), ld, f, d);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += c.g[i];
    }
    c.dec_pre_final = x;
    c.dec_rfinal.resize(static_cast<std::size_t>(ld));
    c.dec_out.resize(static_cast<std::size_t>(ld) * d);
    rmsnorm_fwd(x.data(), p.dec_norm.data(), c.dec_out.data(), c.dec_rfinal.data(), ld, d);

    // logits
    const int v = cfg.vocab_size;
    c.logits.resize(static_cast<std::size_t>(ld) * v);
    if (cfg.tie_embeddings) {
        const T s = static_cast<T>(1.0 / std::sqrt(static_cast<double>(d)));
        mm_a_bt(c.dec_out.data(), p.embedding.data(), c.logits.data(), ld, d, v);
        for (auto& lv : c.logits) lv *= s;
    } else {
        mm(c.dec_out.data(), p.logits_kernel.data(), c.logits.data(), ld, d, v);
    }
}

}  // namespace

template <typename T>
ItemResult<T> forward_item(const ModelParams<T>& p, const ItemView& item, ItemCache<T>& c) {
    if (item.enc_len < 1) throw DataError("empty encoder input");
    c.enc_len = item.enc_len;
    c.dec_len = item.dec_len;
    ItemResult<T> res;
    if (item.dec_len < 1) return res;  // all-pad target: no loss, no gradient
    encoder_forward(p, item, c);
    decoder_forward(p, item, c);
    const int v = p.cfg.vocab_size;
    for (int t = 0; t < item.dec_len; ++t) {
        const T* row = c.logits.data() + static_cast<std::size_t>(t) * v;
        TokenId tgt = item.target[t];
        if (tgt < 0 || tgt >= v) throw DataError("target id outside model vocab");
        T best = row[0];
        int arg = 0;
        for (int j = 1; j < v; ++j) {
            if (row[j] > best) {
                best = row[j];
                arg = j;
            }
        }
        double denom = 0;
        for (int j = 0; j < v; ++j) denom += std::exp(static_cast<double>(row[j] - best));
        res.loss_sum += std::log(denom) - static_cast<double>(row[tgt] - best);
        res.tokens += 1;
        res.correct += (arg == tgt) ? 1 : 0;
    }
    return res;
}

template <typename T>
void backward_item(const ModelParams<T>& p, const ItemView& item, ItemCache<T>& c, T loss_scale,
                   ModelParams<T>& grads) {
    if (item.dec_len < 1) return;
    const ModelConfig& cfg = p.cfg;
    const int d = cfg.d_model;
    const int inner = cfg.inner_dim();
    const int f = cfg.d_mlp;
    const int v = cfg.vocab_size;
    const int ld = item.dec_len;
    const int le = item.enc_len;

    // d loss / d logits = (softmax - onehot) * loss_scale
    c.dlogits.resize(static_cast<std::size_t>(ld) * v);
    for (int t = 0; t < ld; ++t) {
        const T* row = c.logits.data() + static_cast<std::size_t>(t) * v;
        T* gr = c.dlogits.data() + static_cast<std::size_t>(t) * v;
        T best = row[0];
        for (int j = 1; j < v; ++j) best = std::max(best, row[j]);
        double denom = 0;
        for (int j = 0; j < v; ++j) denom += std::exp(static_cast<double>(row[j] - best));
        for (int j = 0; j < v; ++j) {
            gr[j] = static_cast<T>(std::exp(static_cast<double>(row[j] - best)) / denom) *
                    loss_scale;
        }
        gr[item.target[t]] -= loss_scale;
    }

    // logits projection
    c.dx.assign(static_cast<std::size_t>(ld) * d, T(0));  // d dec_out
    if (cfg.tie_embeddings) {
        const T s = static_cast<T>(1.0 / std::sqrt(static_cast<double>(d)));
        for (auto& gv : c.dlogits) gv *= s;
        mm(c.dlogits.data(), p.embedding.data(), c.dx.data(), ld, v, d);
        mm_at_b(c.dlogits.data(), c.dec_out.data(), grads.embedding.data(), ld, v, d);
    } else {
        mm_a_bt(c.dlogits.data(), p.logits_kernel.data(), c.dx.data(), ld, v, d);
        mm_at_b(c.dec_out.data(), c.dlogits.data(), grads.logits_kernel.data(), ld, d, v);
    }

    // decoder final norm
    c.g.assign(static_cast<std::size_t>(ld) * d, T(0));
    rmsnorm_bwd(c.dec_pre_final.data(), p.dec_norm.data(), c.dec_rfinal.data(), c.dx.data(),
                c.g.data(), grads.dec_norm.data(), ld, d);
    std::vector<T>& dx = c.dx;
    dx = c.g;  // gradient w.r.t. the running decoder stream

    c.d_enc_out.assign(static_cast<std::size_t>(le) * d, T(0));

    for (int li = static_cast<int>(p.dec.size()) - 1; li >= 0; --li) {
        const auto& lp = p.dec[static_cast<std::size_t>(li)];
        auto& lc = c.dec[static_cast<std::size_t>(li)];
        auto& gl = grads.dec[static_cast<std::size_t>(li)];

        // mlp: x = x_mid2 + relu(h3 wi) wo
        c.du.assign(static_cast<std::size_t>(ld) * f, T(0));
        mm_a_bt(dx.data(), lp.wo.data(), c.du.data(), ld, d, f);
        mm_at_b(lc.u.data(), dx.data(), gl.wo.data(), ld, f, d);
        for (std::size_t i = 0; i < c.du.size(); ++i) {
            if (lc.u[i] <= T(0)) c.du[i] = T(0);
        }
        c.dh.assign(static_cast<std::size_t>(ld) * d, T(0));
        mm_a_bt(c.du.data(), lp.wi.data(), c.dh.data(), ld, f, d);
        mm_at_b(lc.h3.data(), c.du.data(), gl.wi.data(), ld, d, f);
        rmsnorm_bwd(lc.x_mid2.data(), lp.ln_mlp.data(), lc.r3.data(), c.dh.data(), dx.data(),
                    gl.ln_mlp.data(), ld, d);

        // cross attention: x_mid2 = x_mid + (attn(h2, enc_out)) wo
        c.dctx.assign(static_cast<std::size_t>(ld) * inner, T(0));
        mm_a_bt(dx.data(), lp.cross_attn.wo.data(), c.dctx.data(), ld, d, inner);
        mm_at_b(lc.cross_attn.ctx.data(), dx.data(), gl.cross_attn.wo.data(), ld, inner, d);
        c.dq.assign(static_cast<std::size_t>(ld) * inner, T(0));
        c.dk.assign(static_cast<std::size_t>(le) * inner, T(0));
        c.dv.assign(static_cast<std::size_t>(le) * inner, T(0));
        attn_bwd(lc.cross_attn.q.data(), lc.cross_attn.k.data(), lc.cross_attn.v.data(),
                 lc.cross_attn.p.data(), c.dctx.data(), c.dq.data(), c.dk.data(), c.dv.data(),
                 static_cast<T*>(nullptr), static_cast<const int*>(nullptr), cfg.n_heads,
                 cfg.d_head, ld, le, /*causal=*/false, cfg.relpos_buckets, c.dprow);
        // q side
        c.dh.assign(static_cast<std::size_t>(ld) * d, T(0));
        mm_a_bt(c.dq.data(), lp.cross_attn.wq.data(), c.dh.data(), ld, inner, d);
        mm_at_b(lc.cross_attn.h.data(), c.dq.data(), gl.cross_attn.wq.data(), ld, d, inner);
        rmsnorm_bwd(lc.x_mid.data(), lp.ln_cross.data(), lc.r2.data(), c.dh.data(), dx.data(),
                    gl.ln_cross.data(), ld, d);
        // k/v side flows into the encoder output
        mm_a_bt(c.dk.data(), lp.cross_attn.wk.data(), c.d_enc_out.data(), le, inner, d, true);
        mm_at_b(c.enc_out.data(), c.dk.data(), gl.cross_attn.wk.data(), le, d, inner);
        mm_a_bt(c.dv.data(), lp.cross_attn.wv.data(), c.d_enc_out.data(), le, inner, d, true);
        mm_at_b(c.enc_out.data(), c.dv.data(), gl.cross_attn.wv.data(), le, d, inner);

        // self attention: x_mid = x_in + attn(h) wo
        c.dctx.assign(static_cast<std::size_t>(ld) * inner, T(0));
        mm_a_bt(dx.data(), lp.self_attn.wo.data(), c.dctx.data(), ld, d, inner);
        mm_at_b(lc.self_attn.ctx.data(), dx.data(), gl.self_attn.wo.data(), ld, inner, d);
        c.dq.assign(static_cast<std::size_t>(ld) * inner, T(0));
        c.dk.assign(static_cast<std::size_t>(ld) * inner, T(0));
        c.dv.assign(static_cast<std::size_t>(ld) * inner, T(0));
        attn_bwd(lc.self_attn.q.data(), lc.self_attn.k.data(), lc.self_attn.v.data(),
                 lc.self_attn.p.data(), c.dctx.data(), c.dq.data(), c.dk.data(), c.dv.data(),
                 grads.dec_relpos.data(), c.dec_buckets.data(), cfg.n_heads, cfg.d_head, ld, ld,
                 /*causal=*/true, cfg.relpos_buckets, c.dprow);
        c.dh.assign(static_cast<std::size_t>(ld) * d, T(0));
        mm_a_bt(c.dq.data(), lp.self_attn.wq.data(), c.dh.data(), ld, inner, d, true);
        mm_a_bt(c.dk.data(), lp.self_attn.wk.data(), c.dh.data(), ld, inner, d, true);
        mm_a_bt(c.dv.data(), lp.self_attn.wv.data(), c.dh.data(), ld, inner, d, true);
        mm_at_b(lc.self_attn.h.data(), c.dq.data(), gl.self_attn.wq.data(), ld, d, inner);
        mm_at_b(lc.self_attn.h.data(), c.dk.data(), gl.self_attn.wk.data(), ld, d, inner);
        mm_at_b(lc.self_attn.h.data(), c.dv.data(), gl.self_attn.wv.data(), ld, d, inner);
        rmsnorm_bwd(lc.x_in.data(), lp.ln_self.data(), lc.r1.data(), c.dh.data(), dx.data(),
                    gl.ln_self.data(), ld, d);
    }

    // decoder embedding gather
    for (int t = 0; t < ld; ++t) {
        TokenId id = item.dec_in[t];
        T* row = grads.embedding.data() + static_cast<std::size_t>(id) * d;
        const T* gr = dx.data() + static_cast<std::size_t>(t) * d;
        for (int cdim = 0; cdim < d; ++cdim) row[cdim] += gr[cdim];
    }

    // encoder final norm
    c.g.assign(static_cast<std::size_t>(le) * d, T(0));
    rmsnorm_bwd(c.enc_pre_final.data(), p.enc_norm.data(), c.enc_rfinal.data(),
                c.d_enc_out.data(), c.g.data(), grads.enc_norm.data(), le, d);
    std::vector<T>& ex = c.d_enc_out;
    ex = c.g;

    for (int li = static_cast<int>(p.enc.size()) - 1; li >= 0; --li) {
        const auto& lp = p.enc[static_cast<std::size_t>(li)];
        auto& lc = c.enc[static_cast<std::size_t>(li)];
        auto& gl = grads.enc[static_cast<std::size_t>(li)];

        c.du.assign(static_cast<std::size_t>(le) * f, T(0));
        mm_a_bt(ex.data(), lp.wo.data(), c.du.data(), le, d, f);
        mm_at_b(lc.u.data(), ex.data(), gl.wo.data(), le, f, d);
        for (std::size_t i = 0; i < c.du.size(); ++i) {
            if (lc.u[i] <= T(0)) c.du[i] = T(0);
        }
        c.dh.assign(static_cast<std::size_t>(le) * d, T(0));
        mm_a_bt(c.du.data(), lp.wi.data(), c.dh.data(), le, f, d);
        mm_at_b(lc.h2.data(), c.du.data(), gl.wi.data(), le, d, f);
        rmsnorm_bwd(lc.x_mid.data(), lp.ln_mlp.data(), lc.r2.data(), c.dh.data(), ex.data(),
                    gl.ln_mlp.data(), le, d);

        c.dctx.assign(static_cast<std::size_t>(le) * inner, T(0));
        mm_a_bt(ex.data(), lp.attn.wo.data(), c.dctx.data(), le, d, inner);
        mm_at_b(lc.attn.ctx.data(), ex.data(), gl.attn.wo.data(), le, inner, d);
        c.dq.assign(static_cast<std::size_t>(le) * inner, T(0));
        c.dk.assign(static_cast<std::size_t>(le) * inner, T(0));
        c.dv.assign(static_cast<std::size_t>(le) * inner, T(0));
        attn_bwd(lc.attn.q.data(), lc.attn.k.data(), lc.attn.v.data(), lc.attn.p.data(),
                 c.dctx.data(), c.dq.data(), c.dk.data(), c.dv.data(), grads.enc_relpos.data(),
                 c.enc_buckets.data(), cfg.n_heads, cfg.d_head, le, le, /*causal=*/false,
                 cfg.relpos_buckets, c.dprow);
        c.dh.assign(static_cast<std::size_t>(le) * d, T(0));
        mm_a_bt(c.dq.data(), lp.attn.wq.data(), c.dh.data(), le, inner, d, true);
        mm_a_bt(c.dk.data(), lp.attn.wk.data(), c.dh.data(), le, inner, d, true);
        mm_a_bt(c.dv.data(), lp.attn.wv.data(), c.dh.data(), le, inner, d, true);
        mm_at_b(lc.attn.h.data(), c.dq.data(), gl.attn.wq.data(), le, d, inner);
        mm_at_b(lc.attn.h.data(), c.dk.data(), gl.attn.wk.data(), le, d, inner);
        mm_at_b(lc.attn.h.data(), c.dv.data(), gl.attn.wv.data(), le, d, inner);
        rmsnorm_bwd(lc.x_in.data(), lp.ln_attn.data(), lc.r1.data(), c.dh.data(), ex.data(),
                    gl.ln_attn.data(), le, d);
    }

    for (int t = 0; t < le; ++t) {
        TokenId id = item.enc_ids[t];
        T* row = grads.embedding.data() + static_cast<std::size_t>(id) * d;
        const T* gr = ex.data() + static_cast<std::size_t>(t) * d;
        for (int cdim = 0; cdim < d; ++cdim) row[cdim] += gr[cdim];
    }
}

template <typename T>
std::vector<T> forward_logits(const ModelParams<T>& p, const ItemView& item) {
    ItemCacheHandle<T> cache;
    forward_item(p, item, *cache);
    return (*cache).logits;
}

template <typename T>
ItemCache<T>* new_item_cache() {
    return new ItemCache<T>();
}

template <typename T>
void free_item_cache(ItemCache<T>* cache) {
    delete cache;
}

template ItemResult<float> forward_item(const ModelParams<float>&, const ItemView&,
                                        ItemCache<float>&);
template ItemResult<double> forward_item(const ModelParams<double>&, const ItemView&,
                                         ItemCache<double>&);
template void backward_item(const ModelParams<float>&, const ItemView&, ItemCache<float>&, float,
                            ModelParams<float>&);
template void backward_item(const ModelParams<double>&, const ItemView&, ItemCache<double>&,
                            double, ModelParams<double>&);
template std::vector<float> forward_logits(const ModelParams<float>&, const ItemView&);
template std::vector<double> forward_logits(const ModelParams<double>&, const ItemView&);
template ItemCache<float>* new_item_cache<float>();
template ItemCache<double>* new_item_cache<double>();
template void free_item_cache<float>(ItemCache<float>*);
template void free_item_cache<double>(ItemCache<double>*);

// ---------------------------------------------------------------------------
// Greedy decode with cached keys/values
// ---------------------------------------------------------------------------

TokenSeq decode_greedy(const ModelParams<float>& p, const TokenSeq& input, int max_len) {
    if (max_len < 1) return {};
    if (input.empty()) throw DataError("cannot decode from an empty input");
    const ModelConfig& cfg = p.cfg;
    const int d = cfg.d_model;
    const int inner = cfg.inner_dim();
    const int f = cfg.d_mlp;
    const int le = static_cast<int>(input.size());
    const int n_dec = cfg.n_dec_layers;

    // run the encoder once
    ItemCacheHandle<float> cache;
    ItemView enc_item;
    enc_item.enc_ids = input.data();
    enc_item.enc_len = le;
    enc_item.dec_len = 0;
    (*cache).enc_len = le;
    encoder_forward(p, enc_item, *cache);
    const std::vector<float>& enc_out = (*cache).enc_out;

    // cross-attention projections are fixed for the whole decode
    std::vector<std::vector<float>> cross_k(static_cast<std::size_t>(n_dec));
    std::vector<std::vector<float>> cross_v(static_cast<std::size_t>(n_dec));
    for (int l = 0; l < n_dec; ++l) {
        cross_k[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(le) * inner);
        cross_v[static_cast<std::size_t>(l)].resize(static_cast<std::size_t>(le) * inner);
        mm(enc_out.data(), p.dec[static_cast<std::size_t>(l)].cross_attn.wk.data(),
           cross_k[static_cast<std::size_t>(l)].data(), le, d, inner);
        mm(enc_out.data(), p.dec[static_cast<std::size_t>(l)].cross_attn.wv.data(),
           cross_v[static_cast<std::size_t>(l)].data(), le, d, inner);
    }

    std::vector<std::vector<float>> self_k(static_cast<std::size_t>(n_dec));
    std::vector<std::vector<float>> self_v(static_cast<std::size_t>(n_dec));

    TokenSeq out;
    TokenId prev = Vocab::PAD;  // BOS
    std::vector<float> x(static_cast<std::size_t>(d));
    std::vector<float> h(static_cast<std::size_t>(d)), q(static_cast<std::size_t>(inner)),
        kv(static_cast<std::size_t>(inner)), ctx(static_cast<std::size_t>(inner)),
        tmp(static_cast<std::size_t>(d)), u(static_cast<std::size_t>(f)), rinv(1);
    const float inv = 1.0f / std::sqrt(static_cast<float>(cfg.d_head));

    for (int t = 0; t < max_len; ++t) {
        std::copy(p.embedding.begin() + static_cast<std::size_t>(prev) * d,
                  p.embedding.begin() + (static_cast<std::size_t>(prev) + 1) * d, x.begin());
        for (int l = 0; l < n_dec; ++l) {
            const auto& lp = p.dec[static_cast<std::size_t>(l)];
            auto& sk = self_k[static_cast<std::size_t>(l)];
            auto& sv = self_v[static_cast<std::size_t>(l)];

            rmsnorm_fwd(x.data(), lp.ln_self.data(), h.data(), rinv.data(), 1, d);
            mm(h.data(), lp.self_attn.wq.data(), q.data(), 1, d, inner);
            mm(h.data(), lp.self_attn.wk.data(), kv.data(), 1, d, inner);
            sk.insert(sk.end(), kv.begin(), kv.end());
            mm(h.data(), lp.self_attn.wv.data(), kv.data(), 1, d, inner);
            sv.insert(sv.end(), kv.begin(), kv.end());
            const int lk = t + 1;
            std::fill(ctx.begin(), ctx.end(), 0.0f);
            std::vector<float> srow(static_cast<std::size_t>(lk));
            for (int hh = 0; hh < cfg.n_heads; ++hh) {
                const int o = hh * cfg.d_head;
                float best = -std::numeric_limits<float>::infinity();
                for (int j = 0; j < lk; ++j) {
                    const float* kj = sk.data() + static_cast<std::size_t>(j) * inner + o;
                    float acc = 0;
                    for (int cdim = 0; cdim < cfg.d_head; ++cdim) acc += q[static_cast<std::size_t>(o + cdim)] * kj[cdim];
                    acc = acc * inv +
                          p.dec_relpos[static_cast<std::size_t>(hh) * cfg.relpos_buckets +
                                       relpos_bucket(j - t, false, cfg.relpos_buckets,
                                                     cfg.relpos_max_distance)];
                    srow[static_cast<std::size_t>(j)] = acc;
                    best = std::max(best, acc);
                }
                double denom = 0;
                for (int j = 0; j < lk; ++j) {
                    double e = std::exp(static_cast<double>(srow[static_cast<std::size_t>(j)] - best));
                    srow[static_cast<std::size_t>(j)] = static_cast<float>(e);
                    denom += e;
                }
                for (int j = 0; j < lk; ++j) {
                    float pv = static_cast<float>(srow[static_cast<std::size_t>(j)] / denom);
                    const float* vj = sv.data() + static_cast<std::size_t>(j) * inner + o;
                    for (int cdim = 0; cdim < cfg.d_head; ++cdim) {
                        ctx[static_cast<std::size_t>(o + cdim)] += pv * vj[cdim];
                    }
                }
            }
            mm(ctx.data(), lp.self_attn.wo.data(), tmp.data(), 1, inner, d);
            for (int cdim = 0; cdim < d; ++cdim) x[static_cast<std::size_t>(cdim)] += tmp[static_cast<std::size_t>(cdim)];

            rmsnorm_fwd(x.data(), lp.ln_cross.data(), h.data(), rinv.data(), 1, d);
            mm(h.data(), lp.cross_attn.wq.data(), q.data(), 1, d, inner);
            const auto& ck = cross_k[static_cast<std::size_t>(l)];
            const auto& cv = cross_v[static_cast<std::size_t>(l)];
            std::fill(ctx.begin(), ctx.end(), 0.0f);
            std::vector<float> srow2(static_cast<std::size_t>(le));
            for (int hh = 0; hh < cfg.n_heads; ++hh) {
                const int o = hh * cfg.d_head;
                float best = -std::numeric_limits<float>::infinity();
                for (int j = 0; j < le; ++j) {
                    const float* kj = ck.data() + static_cast<std::size_t>(j) * inner + o;
                    float acc = 0;
                    for (int cdim = 0; cdim < cfg.d_head; ++cdim) acc += q[static_cast<std::size_t>(o + cdim)] * kj[cdim];
                    acc *= inv;
                    srow2[static_cast<std::size_t>(j)] = acc;
                    best = std::max(best, acc);
                }
                double denom = 0;
                for (int j = 0; j < le; ++j) {
                    double e = std::exp(static_cast<double>(srow2[static_cast<std::size_t>(j)] - best));
                    srow2[static_cast<std::size_t>(j)] = static_cast<float>(e);
                    denom += e;
                }
                for (int j = 0; j < le; ++j) {
                    float pv = static_cast<float>(srow2[static_cast<std::size_t>(j)] / denom);
                    const float* vj = cv.data() + static_cast<std::size_t>(j) * inner + o;
                    for (int cdim = 0; cdim < cfg.d_head; ++cdim) {
                        ctx[static_cast<std::size_t>(o + cdim)] += pv * vj[cdim];
                    }
                }
            }
            mm(ctx.data(), lp.cross_attn.wo.data(), tmp.data(), 1, inner, d);
            for (int cdim = 0; cdim < d; ++cdim) x[static_cast<std::size_t>(cdim)] += tmp[static_cast<std::size_t>(cdim)];

            rmsnorm_fwd(x.data(), lp.ln_mlp.data(), h.data(), rinv.data(), 1, d);
            mm(h.data(), lp.wi.data(), u.data(), 1, d, f);
            for (auto& uv : u) uv = std::max(uv, 0.0f);
            mm(u.data(), lp.wo.data(), tmp.data(), 1, f, d);
            for (int cdim = 0; cdim < d; ++cdim) x[static_cast<std::size_t>(cdim)] += tmp[static_cast<std::size_t>(cdim)];
        }
        rmsnorm_fwd(x.data(), p.dec_norm.data(), h.data(), rinv.data(), 1, d);
        // argmax over logits
        int arg = 0;
        float best = -std::numeric_limits<float>::infinity();
        const float s = cfg.tie_embeddings ? 1.0f / std::sqrt(static_cast<float>(d)) : 1.0f;
        for (int vv = 0; vv < cfg.vocab_size; ++vv) {
            float acc = 0;
            if (cfg.tie_embeddings) {
                const float* row = p.embedding.data() + static_cast<std::size_t>(vv) * d;
                for (int cdim = 0; cdim < d; ++cdim) acc += h[static_cast<std::size_t>(cdim)] * row[cdim];
                acc *= s;
            } else {
                for (int cdim = 0; cdim < d; ++cdim) {
                    acc += h[static_cast<std::size_t>(cdim)] *
                           p.logits_kernel[static_cast<std::size_t>(cdim) * cfg.vocab_size + vv];
                }
            }
            if (acc > best) {
                best = acc;
                arg = vv;
            }
        }
        out.push_back(arg);
        if (arg == Vocab::EOS) break;
        prev = arg;
    }
    return out;
}

}  // namespace sptc
