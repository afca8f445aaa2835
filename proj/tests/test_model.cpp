#include "model.hpp"

#include "errors.hpp"
#include "rng.hpp"
#include "testutil.hpp"

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

using namespace tdgat;
using ad::Tape;
using ad::Tensor;

namespace {

Matrix random_matrix(Rng& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.uniform(lo, hi);
    return m;
}

DepGraph delivery_graph() {
    ParsedSentence s;
    s.tokens = {"delivery", "was", "early", "too"};
    s.heads = {2, 2, -1, 2};
    s.aspect_span = Span{0, 1};
    return build_graph(s);
}

DepGraph path_graph(int n, int target = 0) {
    DepGraph g;
    g.node_count = n;
    g.adjacency.resize(n);
    g.node_words.resize(n);
    for (int i = 0; i < n; ++i) g.node_words[i] = {"p" + std::to_string(i)};
    for (int i = 0; i + 1 < n; ++i) {
        g.adjacency[i].push_back(i + 1);
        g.adjacency[i + 1].push_back(i);
    }
    for (auto& a : g.adjacency) std::sort(a.begin(), a.end());
    g.target_node = target;
    return g;
}

DepGraph star_graph(int leaves) {
    DepGraph g;
    g.node_count = leaves + 1;
    g.adjacency.resize(g.node_count);
    g.node_words.resize(g.node_count);
    g.node_words[0] = {"hub"};
    for (int i = 1; i <= leaves; ++i) {
        g.node_words[i] = {"leaf" + std::to_string(i)};
        g.adjacency[0].push_back(i);
        g.adjacency[i].push_back(0);
    }
    g.target_node = 0;
    return g;
}

ModelConfig small_config(int layers = 2) {
    ModelConfig c;
    c.hidden_dim = 6;
    c.heads = 3;
    c.layers = layers;
    c.embed_dim = 4;
    return c;
}

LstmParams constant_lstm(int d, double w, double b) {
    LstmParams p;
    for (Tensor* t : {&p.W_i, &p.W_f, &p.W_o, &p.W_c, &p.U_i, &p.U_f, &p.U_o, &p.U_c})
        *t = Tensor(Matrix::full(d, d, w), true);
    for (Tensor* t : {&p.b_i, &p.b_f, &p.b_o, &p.b_c}) *t = Tensor(Matrix::full(1, d, b), true);
    return p;
}

} // namespace

TEST_CASE("config validation") {
    ModelConfig c = small_config();
    c.hidden_dim = 10;
    c.heads = 3;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.layers = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.heads = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK_NOTHROW(small_config().validate());
}

TEST_CASE("init_params is deterministic and shaped as configured") {
    const ModelConfig c = small_config();
    ModelParams a = init_params(c, 7);
    ModelParams b = init_params(c, 7);
    auto ta = a.all_tensors();
    auto tb = b.all_tensors();
    REQUIRE(ta.size() == tb.size());
    for (size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta[i].name == tb[i].name);
        CHECK(std::memcmp(ta[i].tensor.value().data.data(), tb[i].tensor.value().data.data(),
                          ta[i].tensor.size() * sizeof(double)) == 0);
    }
    ModelParams other = init_params(c, 8);
    CHECK(other.projection.W_p.value().data != a.projection.W_p.value().data);

    CHECK(a.projection.W_p.rows() == 4);
    CHECK(a.projection.W_p.cols() == 6);
    CHECK(a.gat_layers.size() == 2);
    CHECK(a.gat_layers[0].heads.size() == 3);
    CHECK(a.gat_layers[0].heads[0].W.rows() == 2);
    CHECK(a.gat_layers[0].heads[0].W.cols() == 6);
    CHECK(a.gat_layers[0].heads[0].a.rows() == 4);
    CHECK(a.classifier.W.rows() == 3);
    CHECK(a.classifier.b.cols() == 3);

    // biases start at zero, weights inside the stated bounds
    for (double v : a.projection.b_p.value().data) CHECK(v == 0.0);
    const double bound = std::sqrt(6.0 / (4 + 6));
    for (double v : a.projection.W_p.value().data) {
        CHECK(v >= -bound);
        CHECK(v <= bound);
    }
}

TEST_CASE("param_count formula and introspective walk agree") {
    ModelConfig c;
    c.hidden_dim = 12;
    c.heads = 3;
    c.layers = 2;
    c.embed_dim = 8;
    // projection 8*12+12=108, per layer 3*(4*12+8)=168, lstm 8*144+48=1200, classifier 39
    CHECK(param_count(c) == 108 + 2 * 168 + 1200 + 39);
    CHECK(init_params(c, 1).parameter_count() == param_count(c));

    // hypothetical zero-layer count: projection + lstm + classifier only
    const long long layer_term = param_count(c) - (108 + 1200 + 39);
    CHECK(layer_term == 2 * 168);
}

TEST_CASE("per-layer parameter delta reproduces the published 90,600") {
    ModelConfig c;
    c.hidden_dim = 300;
    c.heads = 6;
    c.embed_dim = 300;
    c.layers = 3;
    const long long l3 = param_count(c);
    c.layers = 4;
    const long long l4 = param_count(c);
    c.layers = 5;
    const long long l5 = param_count(c);
    CHECK(l4 - l3 == 90600);
    CHECK(l5 - l4 == 90600);
}

TEST_CASE("attention with zero parameters is uniform over the neighborhood") {
    const DepGraph g = delivery_graph();
    GatHeadParams head;
    head.W = Tensor::zeros(2, 6, true);
    head.a = Tensor::zeros(4, 1, true);
    Tape tape;
    Rng rng(3);
    Tensor H(random_matrix(rng, 4, 6));
    Tensor alpha = attention_coefficients(tape, H, g, head, 0.2, true);
    for (int i = 0; i < 4; ++i) {
        const auto nbrs = neighborhood(g, i, true);
        for (int j = 0; j < 4; ++j) {
            const bool in = std::binary_search(nbrs.begin(), nbrs.end(), j);
            CHECK(alpha.value().at(i, j) == doctest::Approx(in ? 1.0 / nbrs.size() : 0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("singleton neighborhood gets attention exactly 1") {
    DepGraph two = path_graph(2);
    Rng rng(4);
    GatHeadParams head;
    head.W = Tensor(random_matrix(rng, 2, 6), true);
    head.a = Tensor(random_matrix(rng, 4, 1), true);
    Tape tape;
    Tensor H(random_matrix(rng, 2, 6));
    // without the self loop each node sees only the other one
    Tensor alpha = attention_coefficients(tape, H, two, head, 0.2, false);
    CHECK(alpha.value().at(0, 1) == 1.0);
    CHECK(alpha.value().at(1, 0) == 1.0);
    CHECK(alpha.value().at(0, 0) == 0.0);
}

TEST_CASE("attention on a 5-node star matches the direct evaluation") {
    const DepGraph g = star_graph(4);
    Rng rng(11);
    GatHeadParams head;
    head.W = Tensor(random_matrix(rng, 3, 6), true);
    head.a = Tensor(random_matrix(rng, 6, 1), true);
    Tape tape;
    Matrix H = random_matrix(rng, 5, 6);
    Tensor alpha = attention_coefficients(tape, Tensor(H), g, head, 0.2, true);

    auto want = oracle::attention(H, head.W.value(), head.a.value().data, g, 0.2, true);
    for (int i = 0; i < 5; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < 5; ++j) {
            CHECK(alpha.value().at(i, j) == doctest::Approx(want[i][j]).epsilon(1e-12));
            row_sum += alpha.value().at(i, j);
        }
        CHECK(std::fabs(row_sum - 1.0) < 1e-9);
    }
}

TEST_CASE("empty neighborhood is rejected when the self loop is off") {
    DepGraph isolated;
    isolated.node_count = 1;
    isolated.adjacency = {{}};
    isolated.node_words = {{"w"}};
    isolated.target_node = 0;
    GatHeadParams head;
    head.W = Tensor::zeros(2, 6, true);
    head.a = Tensor::zeros(4, 1, true);
    Tape tape;
    Tensor H(Matrix(1, 6));
    CHECK_THROWS_AS(attention_coefficients(tape, H, isolated, head, 0.2, false), std::invalid_argument);
}

TEST_CASE("gat_layer with zero parameters outputs sigmoid(0) everywhere") {
    const ModelConfig c = small_config();
    const DepGraph g = delivery_graph();
    GatLayerParams layer;
    for (int k = 0; k < 3; ++k) {
        GatHeadParams head;
        head.W = Tensor::zeros(2, 6, true);
        head.a = Tensor::zeros(4, 1, true);
        layer.heads.push_back(head);
    }
    Tape tape;
    Rng rng(9);
    Tensor H(random_matrix(rng, 4, 6));
    Tensor out = gat_layer(tape, H, g, layer, c);
    REQUIRE(out.rows() == 4);
    REQUIRE(out.cols() == 6);
    for (double v : out.value().data) CHECK(v == 0.5);
}

TEST_CASE("gat_layer on a 3-node path matches the brute-force evaluation") {
    ModelConfig c;
    c.hidden_dim = 4;
    c.heads = 2;
    c.layers = 1;
    c.embed_dim = 4;
    const DepGraph g = path_graph(3, 1);
    Rng rng(21);

    GatLayerParams layer;
    for (int k = 0; k < 2; ++k) {
        GatHeadParams head;
        head.W = Tensor(random_matrix(rng, 2, 4), true);
        head.a = Tensor(random_matrix(rng, 4, 1), true);
        layer.heads.push_back(head);
    }
    Matrix H = random_matrix(rng, 3, 4);
    Tape tape;
    Tensor out = gat_layer(tape, Tensor(H), g, layer, c);

    // direct evaluation with plain loops
    for (int k = 0; k < 2; ++k) {
        const Matrix& W = layer.heads[k].W.value();
        auto alpha = oracle::attention(H, W, layer.heads[k].a.value().data, g, c.leaky_slope, true);
        for (int i = 0; i < 3; ++i) {
            std::vector<double> m(2, 0.0);
            for (int j = 0; j < 3; ++j) {
                if (alpha[i][j] == 0.0) continue;
                std::vector<double> hj(4);
                for (int d = 0; d < 4; ++d) hj[d] = H.at(j, d);
                const std::vector<double> wh = oracle::matvec(W, hj);
                for (int d = 0; d < 2; ++d) m[d] += alpha[i][j] * wh[d];
            }
            for (int d = 0; d < 2; ++d)
                CHECK(out.value().at(i, k * 2 + d) ==
                      doctest::Approx(oracle::sigmoid(m[d])).epsilon(1e-12));
        }
    }
}

TEST_CASE("duplicated heads reduce to single-head aggregation in each half") {
    ModelConfig c;
    c.hidden_dim = 4;
    c.heads = 2;
    c.layers = 1;
    c.embed_dim = 4;
    const DepGraph g = delivery_graph();
    Rng rng(33);

    GatHeadParams head;
    head.W = Tensor(random_matrix(rng, 2, 4), true);
    head.a = Tensor(random_matrix(rng, 4, 1), true);
    GatLayerParams layer;
    layer.heads = {head, head};

    Matrix H = random_matrix(rng, 4, 4);
    Tape tape;
    Tensor out = gat_layer(tape, Tensor(H), g, layer, c);
    for (int i = 0; i < 4; ++i)
        for (int d = 0; d < 2; ++d)
            CHECK(out.value().at(i, d) == out.value().at(i, 2 + d));
}

TEST_CASE("lstm_cell zero case is exact") {
    LstmParams p = constant_lstm(3, 0.0, 0.0);
    Tape tape;
    LayerState zero{Tensor::zeros(2, 3), Tensor::zeros(2, 3)};
    LayerState next = lstm_cell(tape, Tensor::zeros(2, 3), zero, p);
    for (double v : next.C.value().data) CHECK(v == 0.0);
    for (double v : next.H.value().data) CHECK(v == 0.0);

    // gates sit exactly at 0.5: check through the input gate of a nonzero cell
    LayerState carry{Tensor::zeros(2, 3), Tensor(Matrix::full(2, 3, 1.0))};
    LayerState gated = lstm_cell(tape, Tensor::zeros(2, 3), carry, p);
    for (double v : gated.C.value().data) CHECK(v == 0.5); // f = 0.5 exactly
}

TEST_CASE("lstm_cell saturates with a large bias") {
    LstmParams p = constant_lstm(2, 0.0, 0.0);
    p.b_i = Tensor(Matrix::full(1, 2, 100.0), true);
    Tape tape;
    // candidate tanh(0)=0 keeps c' = i*0 + f*c; steer through c to see i
    LayerState state{Tensor::zeros(1, 2), Tensor::zeros(1, 2)};
    p.b_c = Tensor(Matrix::full(1, 2, 100.0), true); // candidate saturates at 1
    LayerState next = lstm_cell(tape, Tensor::zeros(1, 2), state, p);
    // c' = 0.5*0 + i*tanh(100) with i ~ 1
    for (double v : next.C.value().data) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lstm_cell scalar case matches the independent evaluation") {
    LstmParams p = constant_lstm(1, 1.0, 0.0);
    Tape tape;
    LayerState state{Tensor(Matrix::full(1, 1, 0.5)), Tensor(Matrix::full(1, 1, 0.2))};
    LayerState next = lstm_cell(tape, Tensor(Matrix::full(1, 1, 1.0)), state, p);

    const double gate = oracle::sigmoid(1.5); // 1*1 + 1*0.5 + 0
    const double cand = std::tanh(1.5);
    const double c_want = gate * 0.2 + gate * cand;
    const double h_want = gate * std::tanh(c_want);
    CHECK(std::fabs(next.C.value().data[0] - c_want) < 1e-12);
    CHECK(std::fabs(next.H.value().data[0] - h_want) < 1e-12);
    CHECK(c_want == doctest::Approx(0.9035410045900217).epsilon(1e-12));
    CHECK(h_want == doctest::Approx(0.5870329265621965).epsilon(1e-12));
}

TEST_CASE("lstm_cell vector path matches the row-wise oracle") {
    Rng rng(55);
    const int d = 5;
    LstmParams p;
    for (Tensor* t : {&p.W_i, &p.W_f, &p.W_o, &p.W_c, &p.U_i, &p.U_f, &p.U_o, &p.U_c})
        *t = Tensor(random_matrix(rng, d, d), true);
    for (Tensor* t : {&p.b_i, &p.b_f, &p.b_o, &p.b_c}) *t = Tensor(random_matrix(rng, 1, d), true);

    Matrix x_hat = random_matrix(rng, 3, d);
    Matrix h_prev = random_matrix(rng, 3, d);
    Matrix c_prev = random_matrix(rng, 3, d);
    Tape tape;
    LayerState next = lstm_cell(tape, Tensor(x_hat), {Tensor(h_prev), Tensor(c_prev)}, p);

    for (int r = 0; r < 3; ++r) {
        std::vector<double> x(d), h(d), cc(d), bi(d), bf(d), bo(d), bc(d);
        for (int j = 0; j < d; ++j) {
            x[j] = x_hat.at(r, j);
            h[j] = h_prev.at(r, j);
            cc[j] = c_prev.at(r, j);
            bi[j] = p.b_i.value().at(0, j);
            bf[j] = p.b_f.value().at(0, j);
            bo[j] = p.b_o.value().at(0, j);
            bc[j] = p.b_c.value().at(0, j);
        }
        auto step = oracle::lstm_step(p.W_i.value(), p.U_i.value(), bi, p.W_f.value(), p.U_f.value(), bf,
                                      p.W_o.value(), p.U_o.value(), bo, p.W_c.value(), p.U_c.value(), bc,
                                      x, h, cc);
        for (int j = 0; j < d; ++j) {
            CHECK(next.H.value().at(r, j) == doctest::Approx(step.h[j]).epsilon(1e-12));
            CHECK(next.C.value().at(r, j) == doctest::Approx(step.c[j]).epsilon(1e-12));
        }
    }
}

TEST_CASE("init_states zero and identity cases") {
    ModelConfig c = small_config();
    ModelParams zero = init_params(c, 1);
    for (NamedTensor nt : zero.all_tensors())
        std::fill(nt.tensor.value().data.begin(), nt.tensor.value().data.end(), 0.0);

    Tape tape;
    LayerState s = init_states(tape, Tensor::zeros(3, 4), zero);
    for (double v : s.H.value().data) CHECK(v == 0.0);
    for (double v : s.C.value().data) CHECK(v == 0.0);

    // d = D with identity projection and zero LSTM weights still gives H0 = 0
    ModelConfig sq = small_config();
    sq.embed_dim = 6;
    ModelParams idp = init_params(sq, 1);
    for (NamedTensor nt : idp.all_tensors())
        std::fill(nt.tensor.value().data.begin(), nt.tensor.value().data.end(), 0.0);
    for (int i = 0; i < 6; ++i) idp.projection.W_p.value().at(i, i) = 1.0;
    Tape tape2;
    Rng rng(2);
    LayerState s2 = init_states(tape2, Tensor(random_matrix(rng, 3, 6)), idp);
    for (double v : s2.H.value().data) CHECK(v == 0.0);
}

TEST_CASE("init_states matches composing the projection with the LSTM oracle") {
    ModelConfig c = small_config();
    ModelParams params = init_params(c, 12);
    Rng rng(13);
    Matrix X = random_matrix(rng, 3, 4);
    Tape tape;
    LayerState s = init_states(tape, Tensor(X), params);

    const int D = c.hidden_dim;
    for (int r = 0; r < 3; ++r) {
        // projected row by plain loops
        std::vector<double> xp(D, 0.0);
        for (int j = 0; j < D; ++j) {
            for (int k = 0; k < c.embed_dim; ++k) xp[j] += X.at(r, k) * params.projection.W_p.value().at(k, j);
            xp[j] += params.projection.b_p.value().at(0, j);
        }
        std::vector<double> zeros(D, 0.0), bi(D), bf(D), bo(D), bc(D);
        for (int j = 0; j < D; ++j) {
            bi[j] = params.lstm.b_i.value().at(0, j);
            bf[j] = params.lstm.b_f.value().at(0, j);
            bo[j] = params.lstm.b_o.value().at(0, j);
            bc[j] = params.lstm.b_c.value().at(0, j);
        }
        auto step = oracle::lstm_step(params.lstm.W_i.value(), params.lstm.U_i.value(), bi,
                                      params.lstm.W_f.value(), params.lstm.U_f.value(), bf,
                                      params.lstm.W_o.value(), params.lstm.U_o.value(), bo,
                                      params.lstm.W_c.value(), params.lstm.U_c.value(), bc, xp, zeros,
                                      zeros);
        for (int j = 0; j < D; ++j)
            CHECK(s.H.value().at(r, j) == doctest::Approx(step.h[j]).epsilon(1e-12));
    }
}

TEST_CASE("forward yields a probability distribution") {
    const ModelConfig c = small_config();
    const DepGraph g = delivery_graph();
    ModelParams params = init_params(c, 5);
    Rng rng(5);
    const Matrix X = random_matrix(rng, 4, 4);
    const std::vector<double> probs = forward(params, g, X);
    REQUIRE(probs.size() == 3);
    double sum = 0.0;
    for (double p : probs) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        sum += p;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
}

TEST_CASE("zero classifier gives the uniform distribution") {
    const ModelConfig c = small_config();
    ModelParams params = init_params(c, 5);
    std::fill(params.classifier.W.value().data.begin(), params.classifier.W.value().data.end(), 0.0);
    std::fill(params.classifier.b.value().data.begin(), params.classifier.b.value().data.end(), 0.0);
    Rng rng(5);
    const std::vector<double> probs = forward(params, delivery_graph(), random_matrix(rng, 4, 4));
    for (double p : probs) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("TDGAT and GAT variants differ when the LSTM path is active") {
    const ModelConfig c = small_config();
    ModelParams params = init_params(c, 77);
    Rng rng(77);
    const Matrix X = random_matrix(rng, 4, 4);
    const DepGraph g = delivery_graph();
    const std::vector<double> td = forward(params, g, X, Variant::TDGAT);
    const std::vector<double> plain = forward(params, g, X, Variant::GAT);
    double diff = 0.0;
    for (size_t i = 0; i < td.size(); ++i) diff = std::max(diff, std::fabs(td[i] - plain[i]));
    CHECK(diff > 1e-6);
}

TEST_CASE("lstm target_only scope changes the outcome but stays valid") {
    ModelConfig c = small_config();
    ModelParams params = init_params(c, 31);
    Rng rng(31);
    const Matrix X = random_matrix(rng, 4, 4);
    const DepGraph g = delivery_graph();
    const std::vector<double> all_nodes = forward(params, g, X);

    params.config.lstm_scope = LstmScope::target_only;
    const std::vector<double> target_only = forward(params, g, X);
    double sum = 0.0, diff = 0.0;
    for (size_t i = 0; i < target_only.size(); ++i) {
        sum += target_only[i];
        diff = std::max(diff, std::fabs(target_only[i] - all_nodes[i]));
    }
    CHECK(std::fabs(sum - 1.0) < 1e-9);
    CHECK(diff > 1e-9);
}

TEST_CASE("depth 1 runs and classifies") {
    ModelConfig c = small_config(1);
    ModelParams params = init_params(c, 3);
    Rng rng(3);
    const std::vector<double> probs = forward(params, delivery_graph(), random_matrix(rng, 4, 4));
    CHECK(probs.size() == 3);
}

TEST_CASE("permutation equivariance") {
    ModelConfig c = small_config();
    ModelParams params = init_params(c, 100);
    Rng rng(100);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_index(7));
        DepGraph g = random_tree_graph(n, rng);
        Matrix X = random_matrix(rng, n, c.embed_dim);

        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        rng.shuffle(perm);

        DepGraph pg;
        pg.node_count = n;
        pg.adjacency.resize(n);
        pg.node_words.resize(n);
        Matrix pX(n, c.embed_dim);
        for (int i = 0; i < n; ++i) {
            pg.node_words[perm[i]] = g.node_words[i];
            for (int j : g.adjacency[i]) pg.adjacency[perm[i]].push_back(perm[j]);
            for (int d = 0; d < c.embed_dim; ++d) pX.at(perm[i], d) = X.at(i, d);
        }
        for (auto& a : pg.adjacency) std::sort(a.begin(), a.end());
        pg.target_node = perm[g.target_node];

        const std::vector<double> base = forward(params, g, X);
        const std::vector<double> permuted = forward(params, pg, pX);
        for (size_t i = 0; i < base.size(); ++i) CHECK(std::fabs(base[i] - permuted[i]) < 1e-9);
    }
}

TEST_CASE("attention rows sum to 1 at every layer and head") {
    Rng rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        ModelConfig c = small_config(1 + static_cast<int>(rng.uniform_index(3)));
        const int n = 2 + static_cast<int>(rng.uniform_index(6));
        DepGraph g = random_tree_graph(n, rng);
        ModelParams params = init_params(c, rng.next());
        Matrix X = random_matrix(rng, n, c.embed_dim);

        Tape tape;
        ForwardTrace trace;
        build_forward(tape, params, g, X, c.variant, &trace);
        REQUIRE(trace.attention.size() == static_cast<size_t>(c.layers));
        for (const auto& layer : trace.attention) {
            REQUIRE(layer.size() == static_cast<size_t>(c.heads));
            for (const Tensor& alpha : layer)
                for (int i = 0; i < n; ++i) {
                    double sum = 0.0;
                    for (int j = 0; j < n; ++j) sum += alpha.value().at(i, j);
                    CHECK(std::fabs(sum - 1.0) < 1e-9);
                }
        }
    }
}

TEST_CASE("full-model gradients match finite differences") {
    ModelConfig c;
    c.hidden_dim = 6;
    c.heads = 3;
    c.layers = 2;
    c.embed_dim = 4;
    auto report = model_grad_check(c, 5, 1e-4, 17);
    CHECK(report.max_rel_err < 1e-4);
    CHECK(report.components_checked == static_cast<size_t>(param_count(c)));

    c.variant = Variant::GAT;
    CHECK(model_grad_check(c, 5, 1e-4, 18).max_rel_err < 1e-4);

    c.variant = Variant::TDGAT;
    c.lstm_scope = LstmScope::target_only;
    CHECK(model_grad_check(c, 5, 1e-4, 19).max_rel_err < 1e-4);

    c.lstm_scope = LstmScope::all_nodes;
    c.self_loop = false;
    CHECK(model_grad_check(c, 5, 1e-4, 20).max_rel_err < 1e-4);
}

TEST_CASE("GAT variant leaves LSTM gradients at exactly zero") {
    ModelConfig c = small_config();
    c.variant = Variant::GAT;
    ModelParams params = init_params(c, 9);

    const size_t all = params.all_tensors().size();
    CHECK(params.trainable_tensors().size() == all - 12); // 12 LSTM tensors excluded

    Rng rng(9);
    Tape tape;
    Tensor probs = build_forward(tape, params, delivery_graph(), random_matrix(rng, 4, 4), Variant::GAT);
    Tensor loss = build_loss(tape, probs, 1, params, 1e-4);
    params.zero_grads();
    tape.backward(loss);
    for (const Tensor* t : {&params.lstm.W_i, &params.lstm.U_f, &params.lstm.b_o, &params.lstm.W_c})
        for (double g : t->grad().data) CHECK(g == 0.0);
    // while the attention parameters do receive gradient
    double total = 0.0;
    for (double g : params.gat_layers[0].heads[0].W.grad().data) total += std::fabs(g);
    CHECK(total > 0.0);
}

TEST_CASE("loss values") {
    ModelConfig c = small_config();
    ModelParams params = init_params(c, 2);

    Tape tape;
    Matrix sure(1, 3);
    sure.at(0, 0) = 1.0;
    Tensor ce = build_loss(tape, Tensor(sure), 0, params, 0.0);
    CHECK(ce.item() == 0.0);

    Tensor uniform_ce = build_loss(tape, Tensor(Matrix::full(1, 3, 1.0 / 3)), 2, params, 0.0);
    CHECK(uniform_ce.item() == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(build_loss(tape, Tensor(sure), 3, params, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_loss(tape, Tensor(sure), -1, params, 0.0), std::invalid_argument);

    // lambda term equals an independent sum over the parameter set
    double squares = 0.0;
    for (const Tensor& t : params.trainable_tensors())
        for (double v : t.value().data) squares += v * v;
    Tensor with_reg = build_loss(tape, Tensor(Matrix::full(1, 3, 1.0 / 3)), 2, params, 1e-4);
    CHECK(with_reg.item() == doctest::Approx(std::log(3.0) + 1e-4 * squares).epsilon(1e-12));
}

TEST_CASE("model save/load round trip is bit-exact") {
    const auto path = std::filesystem::temp_directory_path() / "tdgat_model_roundtrip.json";
    ModelConfig c = small_config();
    ModelParams params = init_params(c, 1234);
    Rng rng(6);
    const DepGraph g = delivery_graph();
    const Matrix X = random_matrix(rng, 4, 4);
    const std::vector<double> before = forward(params, g, X);

    save_model(params, path.string());
    ModelParams loaded = load_model(path.string());
    const std::vector<double> after = forward(loaded, g, X);
    REQUIRE(before.size() == after.size());
    CHECK(std::memcmp(before.data(), after.data(), before.size() * sizeof(double)) == 0);

    auto a = params.all_tensors();
    auto b = loaded.all_tensors();
    for (size_t i = 0; i < a.size(); ++i)
        CHECK(std::memcmp(a[i].tensor.value().data.data(), b[i].tensor.value().data.data(),
                          a[i].tensor.size() * sizeof(double)) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("model file error paths") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto wrong = dir / "tdgat_model_wrong.json";
    {
        std::ofstream out(wrong);
        out << R"({"format":"something-else/9","config":{},"tensors":{}})";
    }
    CHECK_THROWS_WITH_AS(load_model(wrong.string()), doctest::Contains("unsupported format"), ParseError);

    const auto truncated = dir / "tdgat_model_truncated.json";
    {
        ModelParams params = init_params(small_config(), 1);
        save_model(params, truncated.string());
        std::error_code ec;
        std::filesystem::resize_file(truncated, std::filesystem::file_size(truncated) / 2, ec);
        REQUIRE(!ec);
    }
    CHECK_THROWS_AS(load_model(truncated.string()), ParseError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.json"), IoError);

    std::filesystem::remove(wrong);
    std::filesystem::remove(truncated);
}
