#ifndef TDGAT_MODEL_HPP
#define TDGAT_MODEL_HPP

// The target-dependent graph attention network: multi-head attention
// layers over the dependency graph, a cross-layer LSTM cell shared by
// all layers, an input projection and a linear classifier head.

#include "autodiff.hpp"
#include "depgraph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tdgat {

enum class Variant { TDGAT = 0, GAT = 1 };

// Whether the cross-layer LSTM updates every node row or the target
// row alone (non-target rows then pass through like the GAT variant).
enum class LstmScope { all_nodes = 0, target_only = 1 };

const char* to_string(Variant v);
const char* to_string(LstmScope s);
std::optional<Variant> variant_from_string(const std::string& s);
std::optional<LstmScope> lstm_scope_from_string(const std::string& s);

struct ModelConfig {
    int hidden_dim = 300; // D
    int heads = 6;        // K
    int layers = 3;       // L
    int embed_dim = 300;  // d
    int classes = 3;
    double leaky_slope = 0.2;
    bool self_loop = true;
    Variant variant = Variant::TDGAT;
    LstmScope lstm_scope = LstmScope::all_nodes;

    int head_dim() const { return hidden_dim / heads; }
    void validate() const; // D divisible by K, L >= 1, K >= 1, dims positive
};

struct GatHeadParams {
    ad::Tensor W; // [D/K x D]
    ad::Tensor a; // [2D/K x 1], self half on top of the neighbor half
};

struct GatLayerParams {
    std::vector<GatHeadParams> heads;
};

struct LstmParams {
    ad::Tensor W_i, W_f, W_o, W_c; // [D x D], applied to the new observation
    ad::Tensor U_i, U_f, U_o, U_c; // [D x D], applied to the carried state
    ad::Tensor b_i, b_f, b_o, b_c; // [1 x D]
};

struct ProjectionParams {
    ad::Tensor W_p; // [d x D]
    ad::Tensor b_p; // [1 x D]
};

struct ClassifierParams {
    ad::Tensor W; // [classes x D]
    ad::Tensor b; // [1 x classes]
};

struct NamedTensor {
    std::string name;
    ad::Tensor tensor;
};

struct ModelParams {
    ModelConfig config;
    ProjectionParams projection;
    std::vector<GatLayerParams> gat_layers; // length L; one shared LSTM cell across layers
    LstmParams lstm;
    ClassifierParams classifier;

    // Every tensor, in a fixed order (serialization, introspection).
    std::vector<NamedTensor> all_tensors() const;
    // The parameter set the loss regularizes and the optimizer updates.
    // The GAT variant has no LSTM unit, so its tensors are excluded.
    std::vector<ad::Tensor> trainable_tensors() const;

    long long parameter_count() const; // introspective walk over all tensors
    ModelParams clone() const;         // deep copy of values
    void zero_grads() const;
};

// Weight matrices uniform in +-sqrt(6/(fan_in+fan_out)), attention
// vectors uniform in +-sqrt(6/(2D/K)), biases zero.
ModelParams init_params(const ModelConfig& config, uint64_t seed);

// Exact count from the configured shapes.
long long param_count(const ModelConfig& config);

struct LayerState {
    ad::Tensor H; // [N x D]
    ad::Tensor C; // [N x D]
};

// Masked-softmax attention over each node's neighborhood (plus the
// self-loop when configured). Entries outside the neighborhood are 0.
ad::Tensor attention_coefficients(ad::Tape& tape, const ad::Tensor& H, const DepGraph& graph,
                                  const GatHeadParams& head, double slope, bool self_loop);

// One multi-head layer: per head, attention-weighted sum of projected
// neighbor states through a sigmoid; heads concatenated to [N x D].
ad::Tensor gat_layer(ad::Tape& tape, const ad::Tensor& H, const DepGraph& graph,
                     const GatLayerParams& layer, const ModelConfig& config,
                     std::vector<ad::Tensor>* attention_out = nullptr);

// Gated update applied row-wise with shared weights.
LayerState lstm_cell(ad::Tape& tape, const ad::Tensor& x_hat, const LayerState& state,
                     const LstmParams& params);

// Projected input features fed to the LSTM cell with zero states.
LayerState init_states(ad::Tape& tape, const ad::Tensor& X, const ModelParams& params);

// Per-layer, per-head attention matrices captured during a forward pass.
struct ForwardTrace {
    std::vector<std::vector<ad::Tensor>> attention; // [layer][head]
};

// Builds the full forward computation on the tape and returns the
// class probabilities as a [1 x classes] tensor.
ad::Tensor build_forward(ad::Tape& tape, const ModelParams& params, const DepGraph& graph,
                         const Matrix& X, Variant variant, ForwardTrace* trace = nullptr);

// Convenience: fresh tape, config's variant, plain probability values.
std::vector<double> forward(const ModelParams& params, const DepGraph& graph, const Matrix& X);
std::vector<double> forward(const ModelParams& params, const DepGraph& graph, const Matrix& X,
                            Variant variant);

// -log(max(probs[label], 1e-12)) + lambda * sum of squared trainable
// parameter components. Embeddings are frozen and never included.
ad::Tensor build_loss(ad::Tape& tape, const ad::Tensor& probs, int label,
                      const ModelParams& params, double lambda);

void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

// Finite-difference check of the full loss on a random tree graph with
// random input features and a random label, seeded end to end.
ad::GradCheckReport model_grad_check(const ModelConfig& config, int graph_nodes, double lambda,
                                     uint64_t seed, double h = 1e-5);

} // namespace tdgat

#endif
