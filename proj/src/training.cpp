#include "training.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

namespace tdgat {

using ad::Tape;
using ad::Tensor;

const char* to_string(Phase p) { return p == Phase::adam ? "adam" : "sgd"; }

void TrainConfig::validate() const {
    if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be >= 1");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
        throw std::invalid_argument("train config: dropout_rate must be in [0,1)");
    if (adam_lr <= 0.0 || sgd_lr <= 0.0)
        throw std::invalid_argument("train config: learning rates must be positive");
    if (lambda_l2 < 0.0) throw std::invalid_argument("train config: lambda_l2 must be non-negative");
    if (max_epochs < 0) throw std::invalid_argument("train config: max_epochs must be non-negative");
}

OptimizerState make_optimizer(const std::vector<Tensor>& params) {
    OptimizerState state;
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Tensor& p : params) {
        state.m.emplace_back(p.rows(), p.cols());
        state.v.emplace_back(p.rows(), p.cols());
    }
    return state;
}

void adam_step(std::vector<Tensor>& params, OptimizerState& state, const TrainConfig& config) {
    if (state.m.size() != params.size())
        throw std::invalid_argument("adam_step: optimizer state does not match parameter list");
    ++state.step;
    const double b1 = config.adam_beta1;
    const double b2 = config.adam_beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        Matrix& value = params[i].value();
        const Matrix& g = params[i].grad();
        Matrix& m = state.m[i];
        Matrix& v = state.v[i];
        if (!same_shape(value, g) || !same_shape(value, m))
            throw std::invalid_argument("adam_step: shape mismatch");
        for (size_t c = 0; c < value.data.size(); ++c) {
            m.data[c] = b1 * m.data[c] + (1.0 - b1) * g.data[c];
            v.data[c] = b2 * v.data[c] + (1.0 - b2) * g.data[c] * g.data[c];
            const double m_hat = m.data[c] / corr1;
            const double v_hat = v.data[c] / corr2;
            value.data[c] -= config.adam_lr * m_hat / (std::sqrt(v_hat) + config.adam_eps);
        }
    }
}

void sgd_step(std::vector<Tensor>& params, double lr) {
    for (Tensor& p : params) {
        Matrix& value = p.value();
        const Matrix& g = p.grad();
        if (!same_shape(value, g)) throw std::invalid_argument("sgd_step: shape mismatch");
        for (size_t c = 0; c < value.data.size(); ++c) value.data[c] -= lr * g.data[c];
    }
}

Matrix apply_dropout(const Matrix& x, double rate, Rng& rng, bool training) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("dropout: rate must be in [0,1)");
    if (!training || rate == 0.0) return x;
    Matrix out = x;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& v : out.data) v = rng.uniform() < rate ? 0.0 : v * keep_scale;
    return out;
}

namespace {

int argmax_lowest_tie(const std::vector<double>& probs) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(probs.size()); ++i)
        if (probs[i] > probs[best]) best = i;
    return best;
}

} // namespace

double evaluate(const ModelParams& params, const Corpus& dataset, const EmbeddingTable& embeddings) {
    if (dataset.examples.empty()) throw std::invalid_argument("evaluate: empty dataset");
    size_t correct = 0;
    for (const Example& e : dataset.examples) {
        const std::vector<double> probs = forward(params, e.graph, node_features(e.graph, embeddings));
        if (argmax_lowest_tie(probs) == static_cast<int>(e.label)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

Prediction predict(const ModelParams& params, const DepGraph& graph, const EmbeddingTable& embeddings) {
    Prediction p;
    p.probs = forward(params, graph, node_features(graph, embeddings));
    p.label = argmax_lowest_tie(p.probs);
    return p;
}

void TrainLog::write_jsonl(std::ostream& out) const {
    using nlohmann::json;
    for (const EpochRecord& r : epochs) {
        json j{{"epoch", r.epoch},
               {"phase", to_string(r.phase)},
               {"train_loss", r.train_loss},
               {"train_accuracy", r.train_accuracy},
               {"wall_seconds", r.wall_seconds}};
        if (std::isnan(r.dev_accuracy))
            j["dev_accuracy"] = nullptr;
        else
            j["dev_accuracy"] = r.dev_accuracy;
        out << j.dump() << '\n';
    }
}

void TrainLog::render_table(std::ostream& out) const {
    out << "epoch  phase  train_loss  train_acc  dev_acc   seconds\n";
    for (const EpochRecord& r : epochs) {
        out << std::setw(5) << r.epoch << "  " << std::setw(5) << to_string(r.phase) << "  " << std::fixed
            << std::setprecision(6) << std::setw(10) << r.train_loss << "  " << std::setprecision(4)
            << std::setw(9) << r.train_accuracy << "  ";
        if (std::isnan(r.dev_accuracy))
            out << std::setw(7) << "-";
        else
            out << std::setw(7) << r.dev_accuracy;
        out << "  " << std::setprecision(2) << std::setw(8) << r.wall_seconds << '\n';
        out.unsetf(std::ios::fixed);
    }
}

TrainResult train(const ModelConfig& model_config, const Corpus& train_set, const Corpus& dev_set,
                  const EmbeddingTable& embeddings, const TrainConfig& config) {
    model_config.validate();
    config.validate();
    if (train_set.examples.empty()) throw std::invalid_argument("train: empty dataset");
    if (embeddings.dim != model_config.embed_dim)
        throw std::invalid_argument("train: embedding dim " + std::to_string(embeddings.dim) +
                                    " disagrees with model embed_dim " +
                                    std::to_string(model_config.embed_dim));
    if (dev_set.examples.empty() && !config.final_mode)
        throw std::invalid_argument("train: dev set is empty; use final-model mode");

    ModelParams params = init_params(model_config, config.seed);
    std::vector<Tensor> trainable = params.trainable_tensors();
    OptimizerState opt = make_optimizer(trainable);
    Rng rng(config.seed ^ 0x5DEECE66Dull);

    TrainResult result{params.clone(), {}};
    if (config.max_epochs == 0) return result;

    // embeddings are frozen, so base features are fixed per example
    std::vector<Matrix> base_features;
    base_features.reserve(train_set.size());
    for (const Example& e : train_set.examples) base_features.push_back(node_features(e.graph, embeddings));

    double best_dev = -1.0;
    double best_train_loss = std::numeric_limits<double>::infinity();
    int epochs_since_improvement = 0;

    std::vector<size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        if (opt.phase == Phase::adam && config.switch_epoch >= 0 && epoch > config.switch_epoch)
            opt.phase = Phase::sgd;

        rng.shuffle(order);
        double loss_sum = 0.0;
        size_t correct = 0;

        for (size_t start = 0; start < order.size(); start += config.batch_size) {
            const size_t stop = std::min(order.size(), start + config.batch_size);
            Tape tape;
            Tensor batch_ce;
            for (size_t b = start; b < stop; ++b) {
                const Example& e = train_set.examples[order[b]];
                const Matrix x = apply_dropout(base_features[order[b]], config.dropout_rate, rng, true);
                Tensor probs = build_forward(tape, params, e.graph, x, model_config.variant);
                if (argmax_lowest_tie(probs.value().data) == static_cast<int>(e.label)) ++correct;
                Tensor ce = build_loss(tape, probs, static_cast<int>(e.label), params, 0.0);
                batch_ce = batch_ce.defined() ? tape.add(batch_ce, ce) : ce;
            }
            Tensor batch_loss = tape.scale(batch_ce, 1.0 / static_cast<double>(stop - start));
            if (config.lambda_l2 > 0.0) {
                Tensor l2;
                for (const Tensor& t : trainable) {
                    Tensor sq = tape.sum_all(tape.mul(t, t));
                    l2 = l2.defined() ? tape.add(l2, sq) : sq;
                }
                batch_loss = tape.add(batch_loss, tape.scale(l2, config.lambda_l2));
            }

            for (Tensor& t : trainable) t.zero_grad();
            tape.backward(batch_loss);
            if (opt.phase == Phase::adam)
                adam_step(trainable, opt, config);
            else
                sgd_step(trainable, config.sgd_lr);
            loss_sum += batch_loss.item() * static_cast<double>(stop - start);
        }

        EpochRecord record;
        record.epoch = epoch;
        record.phase = opt.phase;
        record.train_loss = loss_sum / static_cast<double>(train_set.size());
        record.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_set.size());
        record.dev_accuracy = dev_set.examples.empty() ? std::numeric_limits<double>::quiet_NaN()
                                                       : evaluate(params, dev_set, embeddings);
        record.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.log.epochs.push_back(record);

        bool improved;
        if (config.final_mode) {
            improved = record.train_loss < best_train_loss;
            if (improved) best_train_loss = record.train_loss;
        } else {
            improved = record.dev_accuracy > best_dev;
            if (improved) best_dev = record.dev_accuracy;
        }
        if (improved) {
            result.params = params.clone();
            epochs_since_improvement = 0;
        } else {
            ++epochs_since_improvement;
        }
        if (opt.phase == Phase::adam && config.switch_epoch < 0 &&
            epochs_since_improvement >= config.switch_patience)
            opt.phase = Phase::sgd;
    }
    return result;
}

void AblationReport::render_table(std::ostream& out) const {
    out << "layers      ";
    for (int d : depths) out << std::setw(8) << d;
    out << '\n';
    for (Variant variant : {Variant::GAT, Variant::TDGAT}) {
        out << std::left << std::setw(12) << (variant == Variant::GAT ? "GAT" : "TD-GAT") << std::right;
        for (int d : depths) {
            for (const AblationArm& arm : arms)
                if (arm.variant == variant && arm.layers == d)
                    out << std::fixed << std::setprecision(4) << std::setw(8) << arm.accuracy;
        }
        out << '\n';
        out.unsetf(std::ios::fixed);
    }
}

AblationReport ablate(const ModelConfig& model_config, const Corpus& train_set, const Corpus& dev_set,
                      const Corpus& eval_set, const EmbeddingTable& embeddings, const TrainConfig& config,
                      std::vector<int> depths) {
    AblationReport report;
    report.depths = depths.empty() ? std::vector<int>{model_config.layers} : std::move(depths);
    for (int depth : report.depths) {
        for (Variant variant : {Variant::GAT, Variant::TDGAT}) {
            ModelConfig mc = model_config; // identical configs except variant (and depth)
            mc.layers = depth;
            mc.variant = variant;
            TrainResult r = train(mc, train_set, dev_set, embeddings, config);
            report.arms.push_back({variant, depth, evaluate(r.params, eval_set, embeddings)});
        }
    }
    return report;
}

} // namespace tdgat
