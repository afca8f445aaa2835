#ifndef TDGAT_AUTODIFF_HPP
#define TDGAT_AUTODIFF_HPP

// Reverse-mode differentiation over dense double-precision matrices.
// A Tape records every operation; backward() replays the adjoints in
// reverse order. One tape per forward/backward pass, one logical thread
// per tape. Distinct tapes are independent.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tdgat {

// Plain dense row-major matrix. Value type, no autodiff attached.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative shape");
    }

    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return data.size(); }

    static Matrix zeros(int r, int c) { return Matrix(r, c); }
    static Matrix full(int r, int c, double v) {
        Matrix m(r, c);
        std::fill(m.data.begin(), m.data.end(), v);
        return m;
    }
};

bool same_shape(const Matrix& a, const Matrix& b);

namespace ad {

// Shared storage behind a Tensor handle. `grad` is allocated iff
// requires_grad; it accumulates across backward calls until zeroed.
struct TensorData {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
};

// Lightweight handle with shared storage. Copies alias the same data,
// so a parameter tensor can appear on many successive tapes.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(Matrix value, bool requires_grad = false);

    static Tensor zeros(int rows, int cols, bool requires_grad = false);

    bool defined() const { return d_ != nullptr; }
    int rows() const { return d_->value.rows; }
    int cols() const { return d_->value.cols; }
    size_t size() const { return d_->value.size(); }

    const Matrix& value() const { return d_->value; }
    Matrix& value() { return d_->value; }
    const Matrix& grad() const;
    Matrix& grad();

    bool requires_grad() const { return d_->requires_grad; }
    void zero_grad();

    double item() const; // 1x1 tensors only

    TensorData* data_ptr() const { return d_.get(); }

private:
    std::shared_ptr<TensorData> d_;
};

// One recorded operation: forward already ran, `backward` scatters the
// output adjoint into the inputs' grads.
struct Node {
    std::string op;
    std::vector<Tensor> inputs;
    Tensor output;
    std::function<void()> backward;
};

class Tape {
public:
    // Binary elementwise (equal shapes).
    Tensor add(const Tensor& a, const Tensor& b);
    Tensor sub(const Tensor& a, const Tensor& b);
    Tensor mul(const Tensor& a, const Tensor& b);

    // Unary elementwise.
    Tensor sigmoid(const Tensor& x);
    Tensor tanh(const Tensor& x);
    Tensor leaky_relu(const Tensor& x, double slope);
    Tensor exp(const Tensor& x);
    Tensor log(const Tensor& x);
    Tensor scale(const Tensor& x, double c);

    // max(x, floor) elementwise; clamped positions block the gradient.
    Tensor clamp_min(const Tensor& x, double floor);

    Tensor matmul(const Tensor& a, const Tensor& b);
    Tensor transpose(const Tensor& x);

    // out[i,j] = x[i,j] + bias[0,j]; the only broadcast the engine allows.
    Tensor add_row_bias(const Tensor& x, const Tensor& bias);

    // Rows [r0, r1) of x.
    Tensor slice_rows(const Tensor& x, int r0, int r1);

    Tensor concat_cols(std::span<const Tensor> parts);

    // Masked row softmax. mask is row-major rows*cols, nonzero = active.
    // Masked positions output exactly 0; every row needs an active entry.
    Tensor softmax_rows(const Tensor& logits, const std::vector<uint8_t>& mask);
    Tensor softmax_rows(const Tensor& logits);

    Tensor sum_all(const Tensor& x);
    Tensor mean_rows(const Tensor& x);

    // out[0,j] = sum_i weights[0,i] * x[i,j]. One-hot weights select a row.
    Tensor weighted_row_sum(const Tensor& weights, const Tensor& x);

    // Runs adjoints in reverse tape order. `loss` must be a 1x1 tensor
    // produced by this tape. Grads accumulate; zero them between passes.
    void backward(const Tensor& loss);

    size_t node_count() const { return nodes_.size(); }

private:
    Tensor emit(std::string op, std::vector<Tensor> inputs, Matrix value,
                std::function<void(Node&)> make_backward);

    std::vector<Node> nodes_;
};

// Finite-difference verification. rel_err = |a - n| / max(1e-8, |a| + |n|).
struct GradCheckEntry {
    size_t param_index = 0;  // index into the params list
    size_t component = 0;    // flat index within the parameter
    double analytic = 0.0;
    double numeric = 0.0;
    double rel_err = 0.0;
};

struct GradCheckReport {
    double max_rel_err = 0.0;
    GradCheckEntry worst;
    size_t components_checked = 0;

    bool pass(double tol) const { return max_rel_err < tol; }
};

// Builds the loss on the supplied tape. Must be deterministic: same
// parameter values, same loss.
using LossBuilder = std::function<Tensor(Tape&)>;

// Central differences of `f` against the supplied analytic gradients.
GradCheckReport grad_check_against(const LossBuilder& f, std::span<const Tensor> params,
                                   const std::vector<Matrix>& analytic, double h = 1e-5);

// Runs backward once for the analytic gradients, then compares.
GradCheckReport grad_check(const LossBuilder& f, std::span<const Tensor> params, double h = 1e-5);

} // namespace ad
} // namespace tdgat

#endif
