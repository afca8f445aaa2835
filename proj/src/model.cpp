#include "model.hpp"

#include "errors.hpp"
#include "rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>

namespace tdgat {

using ad::Tape;
using ad::Tensor;

const char* to_string(Variant v) { return v == Variant::TDGAT ? "TDGAT" : "GAT"; }
const char* to_string(LstmScope s) { return s == LstmScope::all_nodes ? "all_nodes" : "target_only"; }

std::optional<Variant> variant_from_string(const std::string& s) {
    if (s == "TDGAT" || s == "tdgat") return Variant::TDGAT;
    if (s == "GAT" || s == "gat") return Variant::GAT;
    return std::nullopt;
}

std::optional<LstmScope> lstm_scope_from_string(const std::string& s) {
    if (s == "all_nodes") return LstmScope::all_nodes;
    if (s == "target_only") return LstmScope::target_only;
    return std::nullopt;
}

void ModelConfig::validate() const {
    if (hidden_dim <= 0 || embed_dim <= 0 || classes <= 0)
        throw std::invalid_argument("model config: dimensions must be positive");
    if (heads < 1) throw std::invalid_argument("model config: heads must be >= 1");
    if (layers < 1) throw std::invalid_argument("model config: layers must be >= 1");
    if (hidden_dim % heads != 0)
        throw std::invalid_argument("model config: hidden_dim " + std::to_string(hidden_dim) +
                                    " not divisible by heads " + std::to_string(heads));
}

namespace {

Matrix uniform_matrix(Rng& rng, int rows, int cols, double bound) {
    Matrix m(rows, cols);
    for (double& v : m.data) v = rng.uniform(-bound, bound);
    return m;
}

} // namespace

ModelParams init_params(const ModelConfig& config, uint64_t seed) {
    config.validate();
    const int d = config.embed_dim;
    const int D = config.hidden_dim;
    const int p = config.head_dim();
    const int C = config.classes;
    Rng rng(seed);

    ModelParams params;
    params.config = config;
    params.projection.W_p = Tensor(uniform_matrix(rng, d, D, std::sqrt(6.0 / (d + D))), true);
    params.projection.b_p = Tensor::zeros(1, D, true);

    for (int l = 0; l < config.layers; ++l) {
        GatLayerParams layer;
        for (int k = 0; k < config.heads; ++k) {
            GatHeadParams head;
            head.W = Tensor(uniform_matrix(rng, p, D, std::sqrt(6.0 / (D + p))), true);
            head.a = Tensor(uniform_matrix(rng, 2 * p, 1, std::sqrt(6.0 / (2.0 * p))), true);
            layer.heads.push_back(std::move(head));
        }
        params.gat_layers.push_back(std::move(layer));
    }

    const double lstm_bound = std::sqrt(6.0 / (2.0 * D));
    for (Tensor* w : {&params.lstm.W_i, &params.lstm.W_f, &params.lstm.W_o, &params.lstm.W_c,
                      &params.lstm.U_i, &params.lstm.U_f, &params.lstm.U_o, &params.lstm.U_c})
        *w = Tensor(uniform_matrix(rng, D, D, lstm_bound), true);
    for (Tensor* b : {&params.lstm.b_i, &params.lstm.b_f, &params.lstm.b_o, &params.lstm.b_c})
        *b = Tensor::zeros(1, D, true);

    params.classifier.W = Tensor(uniform_matrix(rng, C, D, std::sqrt(6.0 / (C + D))), true);
    params.classifier.b = Tensor::zeros(1, C, true);
    return params;
}

std::vector<NamedTensor> ModelParams::all_tensors() const {
    std::vector<NamedTensor> out;
    out.push_back({"projection.W_p", projection.W_p});
    out.push_back({"projection.b_p", projection.b_p});
    for (size_t l = 0; l < gat_layers.size(); ++l) {
        for (size_t k = 0; k < gat_layers[l].heads.size(); ++k) {
            const std::string prefix = "gat." + std::to_string(l) + ".head." + std::to_string(k);
            out.push_back({prefix + ".W", gat_layers[l].heads[k].W});
            out.push_back({prefix + ".a", gat_layers[l].heads[k].a});
        }
    }
    out.push_back({"lstm.W_i", lstm.W_i});
    out.push_back({"lstm.W_f", lstm.W_f});
    out.push_back({"lstm.W_o", lstm.W_o});
    out.push_back({"lstm.W_c", lstm.W_c});
    out.push_back({"lstm.U_i", lstm.U_i});
    out.push_back({"lstm.U_f", lstm.U_f});
    out.push_back({"lstm.U_o", lstm.U_o});
    out.push_back({"lstm.U_c", lstm.U_c});
    out.push_back({"lstm.b_i", lstm.b_i});
    out.push_back({"lstm.b_f", lstm.b_f});
    out.push_back({"lstm.b_o", lstm.b_o});
    out.push_back({"lstm.b_c", lstm.b_c});
    out.push_back({"classifier.W", classifier.W});
    out.push_back({"classifier.b", classifier.b});
    return out;
}

std::vector<Tensor> ModelParams::trainable_tensors() const {
    std::vector<Tensor> out;
    for (const NamedTensor& nt : all_tensors()) {
        if (config.variant == Variant::GAT && nt.name.rfind("lstm.", 0) == 0) continue;
        out.push_back(nt.tensor);
    }
    return out;
}

long long ModelParams::parameter_count() const {
    long long n = 0;
    for (const NamedTensor& nt : all_tensors()) n += static_cast<long long>(nt.tensor.size());
    return n;
}

ModelParams ModelParams::clone() const {
    ModelParams copy = init_params(config, 0);
    auto src = all_tensors();
    auto dst = copy.all_tensors();
    for (size_t i = 0; i < src.size(); ++i) dst[i].tensor.value() = src[i].tensor.value();
    return copy;
}

void ModelParams::zero_grads() const {
    for (const NamedTensor& nt : all_tensors()) {
        Tensor t = nt.tensor;
        t.zero_grad();
    }
}

long long param_count(const ModelConfig& config) {
    config.validate();
    const long long d = config.embed_dim;
    const long long D = config.hidden_dim;
    const long long p = config.head_dim();
    const long long K = config.heads;
    const long long C = config.classes;
    const long long projection = d * D + D;
    const long long per_layer = K * (p * D + 2 * p);
    const long long lstm = 8 * D * D + 4 * D;
    const long long classifier = C * D + C;
    return projection + config.layers * per_layer + lstm + classifier;
}

namespace {

// Row-major [N x N] neighborhood mask; row i actives j in n[i].
std::vector<uint8_t> neighbor_mask(const DepGraph& graph, bool self_loop) {
    const int n = graph.node_count;
    std::vector<uint8_t> mask(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        const std::vector<int> nbrs = neighborhood(graph, i, self_loop);
        if (nbrs.empty())
            throw std::invalid_argument("attention: empty neighborhood for node " + std::to_string(i) +
                                        " (self_loop disabled)");
        for (int j : nbrs) mask[static_cast<size_t>(i) * n + j] = 1;
    }
    return mask;
}

struct HeadAttention {
    Tensor alpha;     // [N x N]
    Tensor projected; // [N x p], rows are W h_j
};

HeadAttention head_attention(Tape& tape, const Tensor& H, const DepGraph& graph,
                             const GatHeadParams& head, double slope, bool self_loop) {
    const int N = graph.node_count;
    const int p = head.W.rows();
    if (head.W.cols() != H.cols())
        throw std::invalid_argument("attention: head width disagrees with state width");
    if (head.a.rows() != 2 * p || head.a.cols() != 1)
        throw std::invalid_argument("attention: context vector must be [2p x 1]");

    Tensor projected = tape.matmul(H, tape.transpose(head.W)); // [N x p]
    Tensor a_self = tape.slice_rows(head.a, 0, p);
    Tensor a_neigh = tape.slice_rows(head.a, p, 2 * p);
    Tensor score_self = tape.matmul(projected, a_self);                    // [N x 1]
    Tensor score_neigh = tape.transpose(tape.matmul(projected, a_neigh));  // [1 x N]

    // logit[i,j] = leaky_relu(a_self . (W h_i) + a_neigh . (W h_j))
    Tensor ones(Matrix::full(1, N, 1.0));
    Tensor logits = tape.leaky_relu(tape.add_row_bias(tape.matmul(score_self, ones), score_neigh), slope);
    Tensor alpha = tape.softmax_rows(logits, neighbor_mask(graph, self_loop));
    return {alpha, projected};
}

} // namespace

Tensor attention_coefficients(Tape& tape, const Tensor& H, const DepGraph& graph,
                              const GatHeadParams& head, double slope, bool self_loop) {
    return head_attention(tape, H, graph, head, slope, self_loop).alpha;
}

Tensor gat_layer(Tape& tape, const Tensor& H, const DepGraph& graph, const GatLayerParams& layer,
                 const ModelConfig& config, std::vector<Tensor>* attention_out) {
    if (H.rows() != graph.node_count || H.cols() != config.hidden_dim)
        throw std::invalid_argument("gat_layer: state shape disagrees with graph/config");
    if (static_cast<int>(layer.heads.size()) != config.heads)
        throw std::invalid_argument("gat_layer: head count disagrees with config");

    std::vector<Tensor> parts;
    parts.reserve(layer.heads.size());
    for (const GatHeadParams& head : layer.heads) {
        HeadAttention ha = head_attention(tape, H, graph, head, config.leaky_slope, config.self_loop);
        if (attention_out) attention_out->push_back(ha.alpha);
        parts.push_back(tape.sigmoid(tape.matmul(ha.alpha, ha.projected)));
    }
    return tape.concat_cols(parts);
}

LayerState lstm_cell(Tape& tape, const Tensor& x_hat, const LayerState& state, const LstmParams& params) {
    auto gate_pre = [&](const Tensor& W, const Tensor& U, const Tensor& b) {
        return tape.add_row_bias(
            tape.add(tape.matmul(x_hat, tape.transpose(W)), tape.matmul(state.H, tape.transpose(U))), b);
    };
    Tensor input_gate = tape.sigmoid(gate_pre(params.W_i, params.U_i, params.b_i));
    Tensor forget_gate = tape.sigmoid(gate_pre(params.W_f, params.U_f, params.b_f));
    Tensor output_gate = tape.sigmoid(gate_pre(params.W_o, params.U_o, params.b_o));
    Tensor candidate = tape.tanh(gate_pre(params.W_c, params.U_c, params.b_c));

    Tensor cell = tape.add(tape.mul(forget_gate, state.C), tape.mul(input_gate, candidate));
    Tensor hidden = tape.mul(output_gate, tape.tanh(cell));
    return {hidden, cell};
}

namespace {

Tensor project_input(Tape& tape, const Tensor& X, const ModelParams& params) {
    if (X.cols() != params.config.embed_dim)
        throw std::invalid_argument("forward: feature width " + std::to_string(X.cols()) +
                                    " disagrees with embed_dim " + std::to_string(params.config.embed_dim));
    return tape.add_row_bias(tape.matmul(X, params.projection.W_p), params.projection.b_p);
}

Tensor one_hot_row(int n, int index) {
    Matrix m(1, n);
    m.at(0, index) = 1.0;
    return Tensor(std::move(m));
}

Tensor one_hot_col(int n, int index) {
    Matrix m(n, 1);
    m.at(index, 0) = 1.0;
    return Tensor(std::move(m));
}

// All-ones except the target row, which is zeroed.
Tensor keep_mask(int n, int d, int target) {
    Matrix m = Matrix::full(n, d, 1.0);
    for (int j = 0; j < d; ++j) m.at(target, j) = 0.0;
    return Tensor(std::move(m));
}

} // namespace

LayerState init_states(Tape& tape, const Tensor& X, const ModelParams& params) {
    Tensor projected = project_input(tape, X, params);
    const int n = projected.rows();
    const int D = projected.cols();
    LayerState zero{Tensor::zeros(n, D), Tensor::zeros(n, D)};
    return lstm_cell(tape, projected, zero, params.lstm);
}

Tensor build_forward(Tape& tape, const ModelParams& params, const DepGraph& graph, const Matrix& X,
                     Variant variant, ForwardTrace* trace) {
    const ModelConfig& config = params.config;
    config.validate();
    graph.validate();
    if (X.rows != graph.node_count)
        throw std::invalid_argument("forward: feature rows disagree with graph size");

    const int N = graph.node_count;
    const int D = config.hidden_dim;
    const int t = graph.target_node;
    Tensor X_t(X);

    Tensor H;
    if (variant == Variant::GAT) {
        // Ablated model: no LSTM unit anywhere.
        H = project_input(tape, X_t, params);
        for (const GatLayerParams& layer : params.gat_layers) {
            std::vector<Tensor> attn;
            H = gat_layer(tape, H, graph, layer, config, trace ? &attn : nullptr);
            if (trace) trace->attention.push_back(std::move(attn));
        }
    } else if (config.lstm_scope == LstmScope::all_nodes) {
        LayerState state = init_states(tape, X_t, params);
        for (const GatLayerParams& layer : params.gat_layers) {
            std::vector<Tensor> attn;
            Tensor observed = gat_layer(tape, state.H, graph, layer, config, trace ? &attn : nullptr);
            if (trace) trace->attention.push_back(std::move(attn));
            state = lstm_cell(tape, observed, state, params.lstm);
        }
        H = state.H;
    } else {
        // target_only: non-target rows pass through like the GAT variant;
        // the target row alone carries LSTM state across layers.
        Tensor e_row = one_hot_row(N, t);
        Tensor e_col = one_hot_col(N, t);
        Tensor keep = keep_mask(N, D, t);

        Tensor projected = project_input(tape, X_t, params);
        LayerState target{Tensor::zeros(1, D), Tensor::zeros(1, D)};
        target = lstm_cell(tape, tape.weighted_row_sum(e_row, projected), target, params.lstm);
        H = tape.add(tape.mul(projected, keep), tape.matmul(e_col, target.H));
        for (const GatLayerParams& layer : params.gat_layers) {
            std::vector<Tensor> attn;
            Tensor observed = gat_layer(tape, H, graph, layer, config, trace ? &attn : nullptr);
            if (trace) trace->attention.push_back(std::move(attn));
            target = lstm_cell(tape, tape.weighted_row_sum(e_row, observed), target, params.lstm);
            H = tape.add(tape.mul(observed, keep), tape.matmul(e_col, target.H));
        }
    }

    Tensor target_hidden = tape.weighted_row_sum(one_hot_row(N, t), H); // [1 x D]
    Tensor logits = tape.add_row_bias(tape.matmul(target_hidden, tape.transpose(params.classifier.W)),
                                      params.classifier.b);
    return tape.softmax_rows(logits);
}

std::vector<double> forward(const ModelParams& params, const DepGraph& graph, const Matrix& X,
                            Variant variant) {
    Tape tape;
    Tensor probs = build_forward(tape, params, graph, X, variant);
    return probs.value().data;
}

std::vector<double> forward(const ModelParams& params, const DepGraph& graph, const Matrix& X) {
    return forward(params, graph, X, params.config.variant);
}

Tensor build_loss(Tape& tape, const Tensor& probs, int label, const ModelParams& params, double lambda) {
    if (probs.rows() != 1) throw std::invalid_argument("loss: probs must be a single row");
    if (label < 0 || label >= probs.cols())
        throw std::invalid_argument("loss: unknown label " + std::to_string(label));

    Tensor picked = tape.matmul(probs, one_hot_col(probs.cols(), label)); // [1 x 1]
    Tensor ce = tape.scale(tape.log(tape.clamp_min(picked, 1e-12)), -1.0);
    if (lambda == 0.0) return ce;

    Tensor l2;
    for (const Tensor& t : params.trainable_tensors()) {
        Tensor sq = tape.sum_all(tape.mul(t, t));
        l2 = l2.defined() ? tape.add(l2, sq) : sq;
    }
    return tape.add(ce, tape.scale(l2, lambda));
}

namespace {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
    return json{{"hidden_dim", c.hidden_dim}, {"heads", c.heads},   {"layers", c.layers},
                {"embed_dim", c.embed_dim},   {"classes", c.classes}, {"leaky_slope", c.leaky_slope},
                {"self_loop", c.self_loop},   {"variant", to_string(c.variant)},
                {"lstm_scope", to_string(c.lstm_scope)}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig c;
    c.hidden_dim = j.at("hidden_dim").get<int>();
    c.heads = j.at("heads").get<int>();
    c.layers = j.at("layers").get<int>();
    c.embed_dim = j.at("embed_dim").get<int>();
    c.classes = j.at("classes").get<int>();
    c.leaky_slope = j.at("leaky_slope").get<double>();
    c.self_loop = j.at("self_loop").get<bool>();
    auto v = variant_from_string(j.at("variant").get<std::string>());
    auto s = lstm_scope_from_string(j.at("lstm_scope").get<std::string>());
    if (!v || !s) throw ParseError("model file: unknown variant or lstm_scope");
    c.variant = *v;
    c.lstm_scope = *s;
    return c;
}

constexpr const char* kModelFormat = "tdgat-model/1";

} // namespace

void save_model(const ModelParams& params, const std::string& path) {
    json tensors = json::object();
    for (const NamedTensor& nt : params.all_tensors()) {
        tensors[nt.name] = json{{"rows", nt.tensor.rows()},
                                {"cols", nt.tensor.cols()},
                                {"data", nt.tensor.value().data}};
    }
    json j{{"format", kModelFormat}, {"config", config_to_json(params.config)}, {"tensors", tensors}};
    std::ofstream out(path);
    if (!out) throw IoError("cannot write model file: " + path);
    out << j.dump() << '\n';
    if (!out) throw IoError("write failed: " + path);
}

ad::GradCheckReport model_grad_check(const ModelConfig& config, int graph_nodes, double lambda,
                                     uint64_t seed, double h) {
    config.validate();
    Rng rng(seed);
    DepGraph graph = random_tree_graph(graph_nodes, rng);
    Matrix X(graph_nodes, config.embed_dim);
    for (double& v : X.data) v = rng.uniform(-1.0, 1.0);
    const int label = static_cast<int>(rng.uniform_index(config.classes));
    ModelParams params = init_params(config, rng.next());

    auto builder = [&](Tape& tape) {
        Tensor probs = build_forward(tape, params, graph, X, config.variant);
        return build_loss(tape, probs, label, params, lambda);
    };
    std::vector<Tensor> trainable = params.trainable_tensors();
    return ad::grad_check(builder, trainable, h);
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open model file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError("model file " + path + ": " + e.what());
    }
    if (!j.contains("format") || j["format"] != kModelFormat)
        throw ParseError("model file " + path + ": unsupported format (want " + kModelFormat + ")");

    ModelParams params = init_params(config_from_json(j.at("config")), 0);
    const json& tensors = j.at("tensors");
    for (NamedTensor nt : params.all_tensors()) {
        if (!tensors.contains(nt.name)) throw ParseError("model file: missing tensor " + nt.name);
        const json& tj = tensors.at(nt.name);
        if (tj.at("rows").get<int>() != nt.tensor.rows() || tj.at("cols").get<int>() != nt.tensor.cols())
            throw ParseError("model file: tensor " + nt.name + " shape disagrees with config");
        auto data = tj.at("data").get<std::vector<double>>();
        if (data.size() != nt.tensor.size())
            throw ParseError("model file: tensor " + nt.name + " has wrong element count");
        nt.tensor.value().data = std::move(data);
    }
    return params;
}

} // namespace tdgat
