#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sptc/model.hpp"
#include "sptc/sequence.hpp"

namespace sptc {

enum class OptimizerKind { Adam, Adafactor };

OptimizerKind parse_optimizer(const std::string& name);
std::string optimizer_name(OptimizerKind kind);

/// Training hyperparameters. Paper-scale defaults are batch 128, sequence
/// length 512, eval every 5000 steps; desk-scale runs override them.
struct TrainConfig {
    int batch_size = 128;
    int seq_len = 512;
    long max_steps = 10000;
    long eval_every = 5000;
    double base_lr_scale = 1.0;     // multiplies 1/sqrt(max(n, warmup_floor))
    long warmup_floor = 10000;
    std::optional<double> constant_lr;  // fine-tuning uses a constant rate
    std::vector<double> lr_sweep = {1e-2, 3e-3, 1e-3};
    OptimizerKind optimizer = OptimizerKind::Adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double dropout = 0.0;           // embedding/residual dropout probability
    double validation_fraction = 0.01;  // last fraction of the corpus, by index
    bool stop_at_selection = true;  // stop once the accuracy rule fires
    std::uint64_t seed = 0;
    int threads = 2;

    void validate() const;
};

/// Inverse square root schedule: base_lr_scale / sqrt(max(n, warmup_floor)).
double lr_at(long step, double base_lr_scale = 1.0, long warmup_floor = 10000);

struct EvalRecord {
    long step = 0;
    double token_val_acc = 0.0;
    double loss = 0.0;
};

struct TrainLog {
    std::vector<EvalRecord> records;
    long selected_step = -1;          // -1 when nothing was evaluated
    bool selection_rule_fired = false;  // true when acc > 0.99 picked it
    double selected_accuracy = 0.0;
    std::string optimizer;
    double wall_clock_sec = 0.0;

    std::string to_csv() const;  // step,token_val_acc,loss
};

struct TrainResult {
    ParamSet params;  // the selected checkpoint
    TrainLog log;
};

/// Adam with bias correction; the single required optimizer. Adafactor is a
/// recognized-but-unimplemented plug-in slot and raises a config error.
class AdamOptimizer {
public:
    AdamOptimizer(const ModelConfig& cfg, double beta1, double beta2, double eps);
    void step(ModelParams<float>& params, ModelParams<float>& grads, double lr);
    long steps_taken() const { return t_; }

private:
    ModelParams<float> m_;
    ModelParams<float> v_;
    double beta1_, beta2_, eps_;
    long t_ = 0;
};

/// Teacher-forced token accuracy over a set of examples.
double token_accuracy(const ParamSet& params, const std::vector<Example>& examples,
                      int seq_len = 512, int threads = 2);

/// Fraction of examples whose greedy decode equals the target exactly.
double exact_match(const ParamSet& params, const std::vector<Example>& examples,
                   int max_len = 512, int threads = 2);

/// Pre-train from a default initialization (or the given params) with the
/// inverse-sqrt schedule; selects the first checkpoint whose validation token
/// accuracy exceeds 0.99, falling back to the max-accuracy checkpoint.
TrainResult pretrain(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                     const std::vector<Example>& corpus,
                     const ParamSet* init_params = nullptr);

/// Fine-tune with a constant learning rate. When the config carries no
/// constant_lr, runs the sweep and returns the best run by final validation
/// token accuracy.
TrainResult finetune(const ParamSet& init_params, const TrainConfig& train_cfg,
                     const std::vector<Example>& corpus);

/// Split helper: last `fraction` of the corpus (by index) is validation.
std::pair<std::vector<Example>, std::vector<Example>> split_validation(
    const std::vector<Example>& corpus, double fraction);

}  // namespace sptc
