#include "autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tdgat {

bool same_shape(const Matrix& a, const Matrix& b) {
    return a.rows == b.rows && a.cols == b.cols;
}

namespace ad {

Tensor::Tensor(Matrix value, bool requires_grad) : d_(std::make_shared<TensorData>()) {
    d_->value = std::move(value);
    d_->requires_grad = requires_grad;
    if (requires_grad) d_->grad = Matrix::zeros(d_->value.rows, d_->value.cols);
}

Tensor Tensor::zeros(int rows, int cols, bool requires_grad) {
    return Tensor(Matrix::zeros(rows, cols), requires_grad);
}

const Matrix& Tensor::grad() const {
    if (!d_->requires_grad) throw std::logic_error("Tensor: grad requested but requires_grad is false");
    return d_->grad;
}

Matrix& Tensor::grad() {
    if (!d_->requires_grad) throw std::logic_error("Tensor: grad requested but requires_grad is false");
    return d_->grad;
}

void Tensor::zero_grad() {
    if (d_->requires_grad) std::fill(d_->grad.data.begin(), d_->grad.data.end(), 0.0);
}

double Tensor::item() const {
    if (rows() != 1 || cols() != 1) throw std::invalid_argument("Tensor: item() on non-scalar");
    return d_->value.data[0];
}

namespace {

bool any_requires_grad(const std::vector<Tensor>& ts) {
    for (const auto& t : ts)
        if (t.requires_grad()) return true;
    return false;
}

// Adds g into t's grad when t participates in differentiation.
void accumulate(const Tensor& t, const Matrix& g) {
    if (!t.requires_grad()) return;
    Matrix& dst = t.data_ptr()->grad;
    for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += g.data[i];
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!same_shape(a.value(), b.value()))
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

Matrix matmul_values(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            const double* brow = &b.data[static_cast<size_t>(k) * b.cols];
            double* crow = &c.data[static_cast<size_t>(i) * c.cols];
            for (int j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix transpose_values(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) t.at(j, i) = m.at(i, j);
    return t;
}

} // namespace

// Closures capture tensor handles by value; nodes stay relocatable.
Tensor Tape::emit(std::string op, std::vector<Tensor> inputs, Matrix value,
                  std::function<void(Node&)> make_backward) {
    Tensor out(std::move(value), any_requires_grad(inputs));
    Node node;
    node.op = std::move(op);
    node.inputs = std::move(inputs);
    node.output = out;
    if (out.requires_grad()) make_backward(node);
    nodes_.push_back(std::move(node));
    return out;
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    Matrix v = a.value();
    for (size_t i = 0; i < v.data.size(); ++i) v.data[i] += b.value().data[i];
    return emit("add", {a, b}, std::move(v), [](Node& n) {
        Tensor a = n.inputs[0], b = n.inputs[1], out = n.output;
        n.backward = [a, b, out] {
            accumulate(a, out.grad());
            accumulate(b, out.grad());
        };
    });
}

Tensor Tape::sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    Matrix v = a.value();
    for (size_t i = 0; i < v.data.size(); ++i) v.data[i] -= b.value().data[i];
    return emit("sub", {a, b}, std::move(v), [](Node& n) {
        Tensor a = n.inputs[0], b = n.inputs[1], out = n.output;
        n.backward = [a, b, out] {
            accumulate(a, out.grad());
            if (b.requires_grad()) {
                Matrix neg = out.grad();
                for (double& x : neg.data) x = -x;
                accumulate(b, neg);
            }
        };
    });
}

Tensor Tape::mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    Matrix v = a.value();
    for (size_t i = 0; i < v.data.size(); ++i) v.data[i] *= b.value().data[i];
    return emit("mul", {a, b}, std::move(v), [](Node& n) {
        Tensor a = n.inputs[0], b = n.inputs[1], out = n.output;
        n.backward = [a, b, out] {
            const Matrix& g = out.grad();
            if (a.requires_grad()) {
                Matrix da = g;
                for (size_t i = 0; i < da.data.size(); ++i) da.data[i] *= b.value().data[i];
                accumulate(a, da);
            }
            if (b.requires_grad()) {
                Matrix db = g;
                for (size_t i = 0; i < db.data.size(); ++i) db.data[i] *= a.value().data[i];
                accumulate(b, db);
            }
        };
    });
}

Tensor Tape::sigmoid(const Tensor& x) {
    Matrix v = x.value();
    for (double& e : v.data) e = 1.0 / (1.0 + std::exp(-e));
    return emit("sigmoid", {x}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] {
            Matrix dx = out.grad();
            const Matrix& y = out.value();
            for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= y.data[i] * (1.0 - y.data[i]);
            accumulate(x, dx);
        };
    });
}

Tensor Tape::tanh(const Tensor& x) {
    Matrix v = x.value();
    for (double& e : v.data) e = std::tanh(e);
    return emit("tanh", {x}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] {
            Matrix dx = out.grad();
            const Matrix& y = out.value();
            for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= 1.0 - y.data[i] * y.data[i];
            accumulate(x, dx);
        };
    });
}

Tensor Tape::leaky_relu(const Tensor& x, double slope) {
    Matrix v = x.value();
    for (double& e : v.data) e = e >= 0.0 ? e : slope * e;
    return emit("leaky_relu", {x}, std::move(v), [slope](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out, slope] {
            Matrix dx = out.grad();
            const Matrix& in = x.value();
            // input exactly 0 takes the positive branch
            for (size_t i = 0; i < dx.data.size(); ++i)
                dx.data[i] *= in.data[i] >= 0.0 ? 1.0 : slope;
            accumulate(x, dx);
        };
    });
}

Tensor Tape::exp(const Tensor& x) {
    Matrix v = x.value();
    for (double& e : v.data) e = std::exp(e);
    return emit("exp", {x}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] {
            Matrix dx = out.grad();
            const Matrix& y = out.value();
            for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] *= y.data[i];
            accumulate(x, dx);
        };
    });
}

Tensor Tape::log(const Tensor& x) {
    Matrix v = x.value();
    for (double& e : v.data) e = std::log(e);
    return emit("log", {x}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] {
            Matrix dx = out.grad();
            const Matrix& in = x.value();
            for (size_t i = 0; i < dx.data.size(); ++i) dx.data[i] /= in.data[i];
            accumulate(x, dx);
        };
    });
}

Tensor Tape::scale(const Tensor& x, double c) {
    Matrix v = x.value();
    for (double& e : v.data) e *= c;
    return emit("scale", {x}, std::move(v), [c](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out, c] {
            Matrix dx = out.grad();
            for (double& e : dx.data) e *= c;
            accumulate(x, dx);
        };
    });
}

Tensor Tape::clamp_min(const Tensor& x, double floor) {
    Matrix v = x.value();
    for (double& e : v.data) e = std::max(e, floor);
    return emit("clamp_min", {x}, std::move(v), [floor](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out, floor] {
            Matrix dx = out.grad();
            const Matrix& in = x.value();
            for (size_t i = 0; i < dx.data.size(); ++i)
                if (in.data[i] < floor) dx.data[i] = 0.0;
            accumulate(x, dx);
        };
    });
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions disagree");
    return emit("matmul", {a, b}, matmul_values(a.value(), b.value()), [](Node& n) {
        Tensor a = n.inputs[0], b = n.inputs[1], out = n.output;
        n.backward = [a, b, out] {
            const Matrix& g = out.grad();
            if (a.requires_grad()) accumulate(a, matmul_values(g, transpose_values(b.value())));
            if (b.requires_grad()) accumulate(b, matmul_values(transpose_values(a.value()), g));
        };
    });
}

Tensor Tape::transpose(const Tensor& x) {
    return emit("transpose", {x}, transpose_values(x.value()), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] { accumulate(x, transpose_values(out.grad())); };
    });
}

Tensor Tape::add_row_bias(const Tensor& x, const Tensor& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols())
        throw std::invalid_argument("add_row_bias: bias must be 1 x cols(x)");
    Matrix v = x.value();
    for (int i = 0; i < v.rows; ++i)
        for (int j = 0; j < v.cols; ++j) v.at(i, j) += bias.value().at(0, j);
    return emit("add_row_bias", {x, bias}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], bias = n.inputs[1], out = n.output;
        n.backward = [x, bias, out] {
            const Matrix& g = out.grad();
            accumulate(x, g);
            if (bias.requires_grad()) {
                Matrix db(1, g.cols);
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) db.at(0, j) += g.at(i, j);
                accumulate(bias, db);
            }
        };
    });
}

Tensor Tape::slice_rows(const Tensor& x, int r0, int r1) {
    if (r0 < 0 || r1 > x.rows() || r0 >= r1) throw std::invalid_argument("slice_rows: bad range");
    Matrix v(r1 - r0, x.cols());
    for (int i = r0; i < r1; ++i)
        for (int j = 0; j < x.cols(); ++j) v.at(i - r0, j) = x.value().at(i, j);
    return emit("slice_rows", {x}, std::move(v), [r0](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out, r0] {
            const Matrix& g = out.grad();
            Matrix dx = Matrix::zeros(x.rows(), x.cols());
            for (int i = 0; i < g.rows; ++i)
                for (int j = 0; j < g.cols; ++j) dx.at(i + r0, j) = g.at(i, j);
            accumulate(x, dx);
        };
    });
}

Tensor Tape::concat_cols(std::span<const Tensor> parts) {
    if (parts.empty()) throw std::invalid_argument("concat_cols: empty part list");
    int rows = parts[0].rows();
    int cols = 0;
    for (const Tensor& p : parts) {
        if (p.rows() != rows) throw std::invalid_argument("concat_cols: row count mismatch");
        cols += p.cols();
    }
    Matrix v(rows, cols);
    int off = 0;
    for (const Tensor& p : parts) {
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < p.cols(); ++j) v.at(i, off + j) = p.value().at(i, j);
        off += p.cols();
    }
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    return emit("concat_cols", std::move(inputs), std::move(v), [](Node& n) {
        std::vector<Tensor> parts = n.inputs;
        Tensor out = n.output;
        n.backward = [parts, out] {
            const Matrix& g = out.grad();
            int off = 0;
            for (const Tensor& p : parts) {
                if (p.requires_grad()) {
                    Matrix dp(p.rows(), p.cols());
                    for (int i = 0; i < p.rows(); ++i)
                        for (int j = 0; j < p.cols(); ++j) dp.at(i, j) = g.at(i, off + j);
                    accumulate(p, dp);
                }
                off += p.cols();
            }
        };
    });
}

Tensor Tape::softmax_rows(const Tensor& logits, const std::vector<uint8_t>& mask) {
    const Matrix& x = logits.value();
    if (mask.size() != x.data.size()) throw std::invalid_argument("softmax_rows: mask size mismatch");
    Matrix v(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i) {
        // row max over active entries, subtracted before exp
        double mx = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < x.cols; ++j)
            if (mask[static_cast<size_t>(i) * x.cols + j]) mx = std::max(mx, x.at(i, j));
        if (mx == -std::numeric_limits<double>::infinity())
            throw std::invalid_argument("softmax_rows: fully masked row " + std::to_string(i));
        double denom = 0.0;
        for (int j = 0; j < x.cols; ++j)
            if (mask[static_cast<size_t>(i) * x.cols + j]) denom += std::exp(x.at(i, j) - mx);
        for (int j = 0; j < x.cols; ++j)
            if (mask[static_cast<size_t>(i) * x.cols + j]) v.at(i, j) = std::exp(x.at(i, j) - mx) / denom;
    }
    return emit("softmax_rows", {logits}, std::move(v), [&mask](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        std::vector<uint8_t> m = mask;
        n.backward = [x, out, m = std::move(m)] {
            const Matrix& g = out.grad();
            const Matrix& y = out.value();
            Matrix dx(y.rows, y.cols);
            for (int i = 0; i < y.rows; ++i) {
                double dot = 0.0;
                for (int j = 0; j < y.cols; ++j) dot += g.at(i, j) * y.at(i, j);
                for (int j = 0; j < y.cols; ++j)
                    if (m[static_cast<size_t>(i) * y.cols + j])
                        dx.at(i, j) = y.at(i, j) * (g.at(i, j) - dot);
            }
            accumulate(x, dx);
        };
    });
}

Tensor Tape::softmax_rows(const Tensor& logits) {
    return softmax_rows(logits, std::vector<uint8_t>(logits.size(), 1));
}

Tensor Tape::sum_all(const Tensor& x) {
    Matrix v(1, 1);
    for (double e : x.value().data) v.data[0] += e;
    return emit("sum_all", {x}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] {
            accumulate(x, Matrix::full(x.rows(), x.cols(), out.grad().data[0]));
        };
    });
}

Tensor Tape::mean_rows(const Tensor& x) {
    Matrix v(1, x.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j) v.at(0, j) += x.value().at(i, j);
    for (double& e : v.data) e /= x.rows();
    return emit("mean_rows", {x}, std::move(v), [](Node& n) {
        Tensor x = n.inputs[0], out = n.output;
        n.backward = [x, out] {
            const Matrix& g = out.grad();
            Matrix dx(x.rows(), x.cols());
            for (int i = 0; i < dx.rows; ++i)
                for (int j = 0; j < dx.cols; ++j) dx.at(i, j) = g.at(0, j) / dx.rows;
            accumulate(x, dx);
        };
    });
}

Tensor Tape::weighted_row_sum(const Tensor& weights, const Tensor& x) {
    if (weights.rows() != 1 || weights.cols() != x.rows())
        throw std::invalid_argument("weighted_row_sum: weights must be 1 x rows(x)");
    Matrix v(1, x.cols());
    for (int i = 0; i < x.rows(); ++i) {
        const double w = weights.value().at(0, i);
        for (int j = 0; j < x.cols(); ++j) v.at(0, j) += w * x.value().at(i, j);
    }
    return emit("weighted_row_sum", {weights, x}, std::move(v), [](Node& n) {
        Tensor w = n.inputs[0], x = n.inputs[1], out = n.output;
        n.backward = [w, x, out] {
            const Matrix& g = out.grad();
            const Matrix& xv = x.value();
            if (w.requires_grad()) {
                Matrix dw(1, xv.rows);
                for (int i = 0; i < xv.rows; ++i)
                    for (int j = 0; j < xv.cols; ++j) dw.at(0, i) += g.at(0, j) * xv.at(i, j);
                accumulate(w, dw);
            }
            if (x.requires_grad()) {
                Matrix dx(xv.rows, xv.cols);
                for (int i = 0; i < xv.rows; ++i) {
                    const double wi = w.value().at(0, i);
                    for (int j = 0; j < xv.cols; ++j) dx.at(i, j) = wi * g.at(0, j);
                }
                accumulate(x, dx);
            }
        };
    });
}

void Tape::backward(const Tensor& loss) {
    if (loss.rows() != 1 || loss.cols() != 1)
        throw std::invalid_argument("backward: loss must be a 1x1 tensor");
    bool on_tape = false;
    for (const Node& n : nodes_)
        if (n.output.data_ptr() == loss.data_ptr()) on_tape = true;
    if (!on_tape) throw std::invalid_argument("backward: loss was not produced by this tape");
    if (!loss.requires_grad()) return; // nothing upstream wants gradients

    // Node outputs are per-pass scratch; leaf grads accumulate across calls.
    for (Node& n : nodes_) n.output.zero_grad();
    loss.data_ptr()->grad.data[0] = 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
        if (it->backward) it->backward();
}

namespace {

double eval_loss(const LossBuilder& f) {
    Tape tape;
    return f(tape).item();
}

} // namespace

GradCheckReport grad_check_against(const LossBuilder& f, std::span<const Tensor> params,
                                   const std::vector<Matrix>& analytic, double h) {
    if (analytic.size() != params.size())
        throw std::invalid_argument("grad_check_against: analytic gradient count mismatch");
    GradCheckReport report;
    for (size_t p = 0; p < params.size(); ++p) {
        Tensor param = params[p];
        for (size_t c = 0; c < param.size(); ++c) {
            const double orig = param.value().data[c];
            param.value().data[c] = orig + h;
            const double up = eval_loss(f);
            param.value().data[c] = orig - h;
            const double down = eval_loss(f);
            param.value().data[c] = orig;

            const double numeric = (up - down) / (2.0 * h);
            const double a = analytic[p].data[c];
            const double rel = std::fabs(a - numeric) / std::max(1e-8, std::fabs(a) + std::fabs(numeric));
            ++report.components_checked;
            if (rel >= report.max_rel_err) {
                report.max_rel_err = rel;
                report.worst = {p, c, a, numeric, rel};
            }
        }
    }
    return report;
}

GradCheckReport grad_check(const LossBuilder& f, std::span<const Tensor> params, double h) {
    for (const Tensor& p : params) const_cast<Tensor&>(p).zero_grad();
    Tape tape;
    Tensor loss = f(tape);
    tape.backward(loss);
    std::vector<Matrix> analytic;
    analytic.reserve(params.size());
    for (const Tensor& p : params) analytic.push_back(p.grad());
    return grad_check_against(f, params, analytic, h);
}

} // namespace ad
} // namespace tdgat
