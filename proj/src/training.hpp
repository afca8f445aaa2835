#ifndef TDGAT_TRAINING_HPP
#define TDGAT_TRAINING_HPP

// Optimizers, input dropout, mini-batch training over variable-size
// graphs with the two-phase Adam -> SGD schedule, and evaluation.

#include "datasets.hpp"
#include "embeddings.hpp"
#include "model.hpp"
#include "rng.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tdgat {

struct TrainConfig {
    int batch_size = 32;
    double lambda_l2 = 1e-4;
    double dropout_rate = 0.7;
    double adam_lr = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    double sgd_lr = 1e-4;
    int switch_patience = 5; // epochs without improvement before the SGD phase
    int switch_epoch = -1;   // fixed switch point; -1 leaves it patience-driven
    int max_epochs = 30;
    uint64_t seed = 0;
    // Final-model mode: trained on train+dev, selects by best train loss.
    bool final_mode = false;

    void validate() const;
};

enum class Phase { adam = 0, sgd = 1 };

const char* to_string(Phase p);

struct OptimizerState {
    std::vector<Matrix> m; // first moments, aligned with the parameter list
    std::vector<Matrix> v; // second moments
    long long step = 0;
    Phase phase = Phase::adam;
};

OptimizerState make_optimizer(const std::vector<ad::Tensor>& params);

// Bias-corrected Adam update in place, reading each tensor's grad.
void adam_step(std::vector<ad::Tensor>& params, OptimizerState& state, const TrainConfig& config);

// p <- p - lr * g
void sgd_step(std::vector<ad::Tensor>& params, double lr);

// Inverted dropout: entries zeroed with probability rate, survivors
// scaled by 1/(1-rate). Identity in evaluation mode.
Matrix apply_dropout(const Matrix& x, double rate, Rng& rng, bool training);

struct EpochRecord {
    int epoch = 0;
    Phase phase = Phase::adam;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double dev_accuracy = 0.0; // NaN when no dev set
    double wall_seconds = 0.0;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;

    void write_jsonl(std::ostream& out) const;
    void render_table(std::ostream& out) const;
};

struct TrainResult {
    ModelParams params;
    TrainLog log;
};

// Shuffled mini-batches; batch loss is the mean of per-example losses
// with the L2 term added once per batch. Adam until dev accuracy stops
// improving for switch_patience epochs (or until switch_epoch), then
// SGD until max_epochs. Returns the best parameters seen.
TrainResult train(const ModelConfig& model_config, const Corpus& train_set, const Corpus& dev_set,
                  const EmbeddingTable& embeddings, const TrainConfig& config);

// Fraction of examples whose argmax class equals the label; ties break
// toward the lowest class index.
double evaluate(const ModelParams& params, const Corpus& dataset, const EmbeddingTable& embeddings);

struct Prediction {
    int label = 0;
    std::vector<double> probs;
};

Prediction predict(const ModelParams& params, const DepGraph& graph, const EmbeddingTable& embeddings);

struct AblationArm {
    Variant variant = Variant::TDGAT;
    int layers = 0;
    double accuracy = 0.0;
};

struct AblationReport {
    std::vector<int> depths;
    std::vector<AblationArm> arms; // GAT row first, then TDGAT, per depth

    void render_table(std::ostream& out) const;
};

// Trains both variants under identical seeds and configs, one pair of
// arms per depth, and reports eval-set accuracy.
AblationReport ablate(const ModelConfig& model_config, const Corpus& train_set, const Corpus& dev_set,
                      const Corpus& eval_set, const EmbeddingTable& embeddings, const TrainConfig& config,
                      std::vector<int> depths = {});

} // namespace tdgat

#endif
