#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "its/base.hpp"

namespace its {

class Tape;

/// Dense array of 64-bit reals, rank 1 or 2, immutable after construction.
/// Values live in shared storage, so copies are cheap and safe to share
/// across threads. A tensor may carry a handle into a Tape, in which case
/// operations consuming it record themselves for reverse-mode
/// differentiation.
class Tensor {
public:
    Tensor() = default;
    Tensor(Shape shape, Array values);

    static Tensor scalar(double v);
    static Tensor zeros(const Shape& shape);
    static Tensor constant(const Shape& shape, double v);
    static Tensor from_vector(std::vector<double> values);
    static Tensor from_matrix(const RowMatrix& m);
    static Tensor uniform(const Shape& shape, double lo, double hi, RngState& rng);

    const Shape& shape() const { return shape_; }
    Index rank() const { return static_cast<Index>(shape_.size()); }
    Index size() const { return data_ ? data_->size() : 0; }
    Index rows() const { return shape_.empty() ? 0 : shape_[0]; }
    Index cols() const { return rank() == 2 ? shape_[1] : 1; }

    /// Flat row-major values.
    const Array& array() const { return *data_; }
    /// Rank-2 view over the flat storage; rank-1 tensors map to a column.
    ConstMatrixMap matrix() const;

    double operator()(Index i) const { return (*data_)[i]; }
    double operator()(Index r, Index c) const { return (*data_)[r * cols() + c]; }
    /// Value of a size-1 tensor.
    double value() const;

    bool taped() const { return tape_ != nullptr; }
    Tape* tape() const { return tape_; }
    Index node() const { return node_; }

    /// Same values, no tape handle.
    Tensor detached() const;

private:
    friend class Tape;

    std::shared_ptr<const Array> data_;
    Shape shape_;
    Tape* tape_ = nullptr;
    Index node_ = -1;
};

/// Accumulates gradient contributions into parent nodes during backward().
class GradSink {
public:
    void add(Index parent, const Array& grad);

private:
    friend class Tape;
    explicit GradSink(std::vector<Array>* grads, std::vector<bool>* has)
        : grads_(grads), has_(has) {}
    std::vector<Array>* grads_;
    std::vector<bool>* has_;
};

using BackwardFn = std::function<void(const Array& grad, GradSink& sink)>;

/// Gradients from one backward() call, addressable by taped tensor.
/// Leaves the loss never reached read back as zeros.
class GradientMap {
public:
    Tensor at(const Tensor& taped) const;
    bool touched(const Tensor& taped) const;

private:
    friend class Tape;
    const Tape* tape_ = nullptr;
    std::vector<Array> grads_;
    std::vector<bool> has_;
};

/// Record of primitive operations in execution order. Execution order is a
/// topological order by construction: an operation's inputs are recorded
/// before its output. Confined to one thread.
class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Registers a value as a differentiable leaf and returns the taped handle.
    Tensor watch(const Tensor& value);

    /// Records one primitive. Used by the op library, not by callers.
    Tensor emit(Shape shape, Array values, std::span<const Tensor* const> parents,
                BackwardFn backward);

    /// Reverse sweep from a taped scalar; visits each recorded node at most
    /// once, in reverse execution order.
    GradientMap backward(const Tensor& loss) const;

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::vector<Index> parents;
        BackwardFn pull;  // empty for leaves
        Shape shape;
    };
    std::vector<Node> nodes_;
};

// -- Primitive operations -----------------------------------------------
//
// Every primitive propagates tape membership: if any input is taped the
// result is taped with recorded parents. Shape violations throw
// std::invalid_argument naming the primitive and the offending shapes.

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
/// Elementwise product.
Tensor mul(const Tensor& a, const Tensor& b);
/// Multiply by an untaped scalar constant.
Tensor scale(const Tensor& a, double c);
/// (m x n)·(n) -> (m), or (m x n)·(n x p) -> (m x p).
Tensor matmul(const Tensor& a, const Tensor& b);
/// Rank-1 inputs joined end to end.
Tensor concat(std::span<const Tensor> parts);
/// Rank-1 inputs of equal width stacked as matrix rows.
Tensor stack_rows(std::span<const Tensor> rows);
/// Gather rows of a rank-2 tensor; gradients scatter-add back.
Tensor take_rows(const Tensor& m, std::span<const Index> ids);
/// Single row of a rank-2 tensor as a rank-1 tensor.
Tensor take_row(const Tensor& m, Index row);
Tensor reshape(const Tensor& t, Shape shape);

Tensor sigmoid(const Tensor& x);
Tensor tanh(const Tensor& x);
Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
/// Clamp to [lo, hi]; gradient passes only through unclamped entries.
Tensor clamp(const Tensor& x, double lo, double hi);

/// Mean over an axis. Rank-1: scalar. Rank-2: axis 0 averages over rows,
/// axis 1 over columns.
Tensor mean(const Tensor& x, int axis = 0);
/// Softmax along an axis, computed with max subtraction. Rank-1: the whole
/// vector. Rank-2, axis 0: each column normalizes over rows.
Tensor softmax(const Tensor& x, int axis = 0);
/// Inverted dropout: x ∘ mask / keep. The mask is an untaped 0/1 tensor;
/// keep probability must be in (0, 1]. With keep == 1 this is the identity.
Tensor dropout(const Tensor& x, double keep, const Tensor& mask);
/// 0/1 mask with P(1) = keep, drawn from the stream.
Tensor dropout_mask(const Shape& shape, double keep, RngState& rng);
Tensor sum_squares(const Tensor& x);

/// sub(1, x), elementwise.
Tensor one_minus(const Tensor& x);
/// add(matmul(w, x), b).
Tensor affine(const Tensor& w, const Tensor& x, const Tensor& b);

// -- Gradient checking ---------------------------------------------------

struct GradCheckRow {
    Index coordinate;
    double analytic;
    double numeric;
    double rel_err;
};

struct GradCheckReport {
    std::vector<GradCheckRow> rows;
    double max_rel_err = 0.0;
    bool passed = false;

    /// Plain-text table: coordinate, analytic, numeric, rel-err.
    std::string table() const;
};

/// Compares the analytic gradient of a scalar-valued function against
/// central finite differences at the given point. f receives a tape and the
/// watched point and must return a taped scalar.
GradCheckReport grad_check(const std::function<Tensor(Tape&, const Tensor&)>& f,
                           const Tensor& point, double step, double tol);

double relative_error(double a, double b);

}  // namespace its
