#include "its/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace its {

namespace {

[[noreturn]] void shape_error(const char* primitive, const Shape& a, const Shape& b) {
    throw std::invalid_argument(std::string(primitive) + ": shape mismatch " + shape_str(a) +
                                " vs " + shape_str(b));
}

void require_rank(const char* primitive, const Tensor& t, Index rank) {
    if (t.rank() != rank) {
        throw std::invalid_argument(std::string(primitive) + ": expected rank " +
                                    std::to_string(rank) + " tensor, got shape " +
                                    shape_str(t.shape()));
    }
}

/// The unique tape shared by the taped inputs, or nullptr when all inputs
/// are plain values. Mixing tensors from two tapes is an error.
Tape* result_tape(const char* primitive, std::initializer_list<const Tensor*> inputs) {
    Tape* tape = nullptr;
    for (const Tensor* t : inputs) {
        if (!t->taped()) continue;
        if (tape == nullptr) {
            tape = t->tape();
        } else if (tape != t->tape()) {
            throw std::invalid_argument(std::string(primitive) +
                                        ": inputs belong to different tapes");
        }
    }
    return tape;
}

Tensor finish(const char* primitive, Shape shape, Array values,
              std::initializer_list<const Tensor*> parents, BackwardFn backward) {
    Tape* tape = result_tape(primitive, parents);
    if (tape == nullptr) return Tensor(std::move(shape), std::move(values));
    std::vector<const Tensor*> ps(parents);
    return tape->emit(std::move(shape), std::move(values), ps, std::move(backward));
}

}  // namespace

// -- Tensor ---------------------------------------------------------------

Tensor::Tensor(Shape shape, Array values) : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 2) {
        throw std::invalid_argument("Tensor: rank must be 1 or 2, got shape " + shape_str(shape_));
    }
    for (Index extent : shape_) {
        if (extent <= 0) {
            throw std::invalid_argument("Tensor: extents must be positive, got shape " +
                                        shape_str(shape_));
        }
    }
    if (shape_size(shape_) != values.size()) {
        throw std::invalid_argument("Tensor: shape " + shape_str(shape_) + " needs " +
                                    std::to_string(shape_size(shape_)) + " values, got " +
                                    std::to_string(values.size()));
    }
    data_ = std::make_shared<const Array>(std::move(values));
}

Tensor Tensor::scalar(double v) { return Tensor({1}, Array::Constant(1, v)); }

Tensor Tensor::zeros(const Shape& shape) {
    return Tensor(shape, Array::Zero(shape_size(shape)));
}

Tensor Tensor::constant(const Shape& shape, double v) {
    return Tensor(shape, Array::Constant(shape_size(shape), v));
}

Tensor Tensor::from_vector(std::vector<double> values) {
    Array a = Eigen::Map<const Array>(values.data(), static_cast<Index>(values.size()));
    return Tensor({static_cast<Index>(values.size())}, std::move(a));
}

Tensor Tensor::from_matrix(const RowMatrix& m) {
    Array a = Eigen::Map<const Array>(m.data(), m.size());
    return Tensor({m.rows(), m.cols()}, std::move(a));
}

Tensor Tensor::uniform(const Shape& shape, double lo, double hi, RngState& rng) {
    Array a(shape_size(shape));
    for (Index i = 0; i < a.size(); ++i) a[i] = rng.uniform(lo, hi);
    return Tensor(shape, std::move(a));
}

ConstMatrixMap Tensor::matrix() const {
    if (rank() == 2) return ConstMatrixMap(data_->data(), shape_[0], shape_[1]);
    return ConstMatrixMap(data_->data(), size(), 1);
}

double Tensor::value() const {
    if (size() != 1) {
        throw std::invalid_argument("Tensor::value: tensor of shape " + shape_str(shape_) +
                                    " is not a scalar");
    }
    return (*data_)[0];
}

Tensor Tensor::detached() const {
    Tensor t = *this;
    t.tape_ = nullptr;
    t.node_ = -1;
    return t;
}

// -- Tape -----------------------------------------------------------------

void GradSink::add(Index parent, const Array& grad) {
    if (parent < 0) return;
    auto& slot = (*grads_)[static_cast<std::size_t>(parent)];
    if ((*has_)[static_cast<std::size_t>(parent)]) {
        slot += grad;
    } else {
        slot = grad;
        (*has_)[static_cast<std::size_t>(parent)] = true;
    }
}

Tensor Tape::watch(const Tensor& value) {
    if (value.taped()) throw std::invalid_argument("Tape::watch: tensor is already taped");
    Tensor t = value;
    t.tape_ = this;
    t.node_ = static_cast<Index>(nodes_.size());
    nodes_.push_back(Node{{}, {}, t.shape_});
    return t;
}

Tensor Tape::emit(Shape shape, Array values, std::span<const Tensor* const> parents,
                  BackwardFn backward) {
    const Index id = static_cast<Index>(nodes_.size());
    Node node;
    node.shape = shape;
    node.pull = std::move(backward);
    for (const Tensor* p : parents) {
        if (!p->taped()) continue;
        if (p->tape() != this) throw std::invalid_argument("Tape::emit: parent from another tape");
        if (p->node_ >= id) throw std::logic_error("Tape::emit: parent recorded after child");
        node.parents.push_back(p->node_);
    }
    nodes_.push_back(std::move(node));
    Tensor t(std::move(shape), std::move(values));
    t.tape_ = this;
    t.node_ = id;
    return t;
}

GradientMap Tape::backward(const Tensor& loss) const {
    if (!loss.taped()) throw std::invalid_argument("Tape::backward: loss tensor is not taped");
    if (loss.tape() != this) throw std::invalid_argument("Tape::backward: loss from another tape");
    if (loss.size() != 1) {
        throw std::invalid_argument("Tape::backward: loss must be scalar, got shape " +
                                    shape_str(loss.shape()));
    }

    GradientMap out;
    out.tape_ = this;
    out.grads_.resize(nodes_.size());
    out.has_.assign(nodes_.size(), false);
    out.grads_[static_cast<std::size_t>(loss.node())] = Array::Ones(1);
    out.has_[static_cast<std::size_t>(loss.node())] = true;

    GradSink sink(&out.grads_, &out.has_);
    for (Index i = loss.node(); i >= 0; --i) {
        const auto idx = static_cast<std::size_t>(i);
        if (!out.has_[idx] || !nodes_[idx].pull) continue;
        nodes_[idx].pull(out.grads_[idx], sink);
    }
    return out;
}

Tensor GradientMap::at(const Tensor& taped) const {
    if (!taped.taped() || taped.tape() != tape_) {
        throw std::invalid_argument("GradientMap::at: tensor is not on this tape");
    }
    const auto idx = static_cast<std::size_t>(taped.node());
    if (idx < has_.size() && has_[idx]) return Tensor(taped.shape(), grads_[idx]);
    return Tensor::zeros(taped.shape());
}

bool GradientMap::touched(const Tensor& taped) const {
    if (!taped.taped() || taped.tape() != tape_) return false;
    const auto idx = static_cast<std::size_t>(taped.node());
    return idx < has_.size() && has_[idx];
}

// -- Elementwise primitives -------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_error("add", a.shape(), b.shape());
    Array out = a.array() + b.array();
    return finish("add", a.shape(), std::move(out), {&a, &b},
                  [pa = a.node(), pb = b.node()](const Array& g, GradSink& sink) {
                      sink.add(pa, g);
                      sink.add(pb, g);
                  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_error("sub", a.shape(), b.shape());
    Array out = a.array() - b.array();
    return finish("sub", a.shape(), std::move(out), {&a, &b},
                  [pa = a.node(), pb = b.node()](const Array& g, GradSink& sink) {
                      sink.add(pa, g);
                      sink.add(pb, Array(-g));
                  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) shape_error("mul", a.shape(), b.shape());
    Array out = a.array() * b.array();
    return finish("mul", a.shape(), std::move(out), {&a, &b},
                  [a, b](const Array& g, GradSink& sink) {
                      sink.add(a.node(), Array(g * b.array()));
                      sink.add(b.node(), Array(g * a.array()));
                  });
}

Tensor scale(const Tensor& a, double c) {
    Array out = a.array() * c;
    return finish("scale", a.shape(), std::move(out), {&a},
                  [pa = a.node(), c](const Array& g, GradSink& sink) {
                      sink.add(pa, Array(g * c));
                  });
}

Tensor one_minus(const Tensor& x) { return sub(Tensor::constant(x.shape(), 1.0), x); }

// -- Linear algebra ---------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
    require_rank("matmul", a, 2);
    if (b.rank() == 1) {
        if (a.cols() != b.size()) shape_error("matmul", a.shape(), b.shape());
        const Index m = a.rows();
        Array out(m);
        Eigen::Map<Eigen::VectorXd>(out.data(), m) =
            a.matrix() * Eigen::Map<const Eigen::VectorXd>(b.array().data(), b.size());
        return finish("matmul", {m}, std::move(out), {&a, &b},
                      [a, b](const Array& g, GradSink& sink) {
                          const auto gv = Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
                          const auto xv =
                              Eigen::Map<const Eigen::VectorXd>(b.array().data(), b.size());
                          if (a.node() >= 0) {
                              RowMatrix ga = gv * xv.transpose();
                              sink.add(a.node(), Eigen::Map<const Array>(ga.data(), ga.size()));
                          }
                          if (b.node() >= 0) {
                              Eigen::VectorXd gb = a.matrix().transpose() * gv;
                              sink.add(b.node(), Eigen::Map<const Array>(gb.data(), gb.size()));
                          }
                      });
    }
    require_rank("matmul", b, 2);
    if (a.cols() != b.rows()) shape_error("matmul", a.shape(), b.shape());
    const Index m = a.rows();
    const Index p = b.cols();
    Array out(m * p);
    MatrixMap(out.data(), m, p) = a.matrix() * b.matrix();
    return finish("matmul", {m, p}, std::move(out), {&a, &b},
                  [a, b, m, p](const Array& g, GradSink& sink) {
                      const ConstMatrixMap gm(g.data(), m, p);
                      if (a.node() >= 0) {
                          RowMatrix ga = gm * b.matrix().transpose();
                          sink.add(a.node(), Eigen::Map<const Array>(ga.data(), ga.size()));
                      }
                      if (b.node() >= 0) {
                          RowMatrix gb = a.matrix().transpose() * gm;
                          sink.add(b.node(), Eigen::Map<const Array>(gb.data(), gb.size()));
                      }
                  });
}

namespace {

Tensor concat_flat(const char* primitive, Shape out_shape, std::span<const Tensor> parts) {
    Index total = 0;
    for (const Tensor& p : parts) total += p.size();
    Array out(total);
    Index offset = 0;
    for (const Tensor& p : parts) {
        out.segment(offset, p.size()) = p.array();
        offset += p.size();
    }

    Tape* tape = nullptr;
    std::vector<const Tensor*> ptrs;
    ptrs.reserve(parts.size());
    for (const Tensor& p : parts) {
        ptrs.push_back(&p);
        if (p.taped()) {
            if (tape != nullptr && tape != p.tape()) {
                throw std::invalid_argument(std::string(primitive) +
                                            ": inputs belong to different tapes");
            }
            tape = p.tape();
        }
    }
    if (tape == nullptr) return Tensor(std::move(out_shape), std::move(out));

    std::vector<std::pair<Index, Index>> slots;  // (node, size)
    slots.reserve(parts.size());
    for (const Tensor& p : parts) slots.emplace_back(p.node(), p.size());
    return tape->emit(std::move(out_shape), std::move(out), ptrs,
                      [slots = std::move(slots)](const Array& g, GradSink& sink) {
                          Index offset = 0;
                          for (const auto& [node, size] : slots) {
                              sink.add(node, Array(g.segment(offset, size)));
                              offset += size;
                          }
                      });
}

}  // namespace

Tensor concat(std::span<const Tensor> parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    Index total = 0;
    for (const Tensor& p : parts) {
        require_rank("concat", p, 1);
        total += p.size();
    }
    return concat_flat("concat", {total}, parts);
}

Tensor stack_rows(std::span<const Tensor> rows) {
    if (rows.empty()) throw std::invalid_argument("stack_rows: no inputs");
    const Index width = rows.front().size();
    for (const Tensor& r : rows) {
        require_rank("stack_rows", r, 1);
        if (r.size() != width) shape_error("stack_rows", rows.front().shape(), r.shape());
    }
    // Row-major layout makes row stacking a flat concatenation.
    return concat_flat("stack_rows", {static_cast<Index>(rows.size()), width}, rows);
}

Tensor take_rows(const Tensor& m, std::span<const Index> ids) {
    require_rank("take_rows", m, 2);
    const Index width = m.cols();
    for (Index id : ids) {
        if (id < 0 || id >= m.rows()) {
            throw std::invalid_argument("take_rows: row " + std::to_string(id) +
                                        " out of range for shape " + shape_str(m.shape()));
        }
    }
    const Index n = static_cast<Index>(ids.size());
    if (n == 0) throw std::invalid_argument("take_rows: no rows requested");
    Array out(n * width);
    for (Index i = 0; i < n; ++i) {
        out.segment(i * width, width) = m.array().segment(ids[static_cast<std::size_t>(i)] * width, width);
    }
    std::vector<Index> idvec(ids.begin(), ids.end());
    return finish("take_rows", {n, width}, std::move(out), {&m},
                  [pm = m.node(), rows = m.rows(), width, idvec = std::move(idvec)](
                      const Array& g, GradSink& sink) {
                      if (pm < 0) return;
                      Array gm = Array::Zero(rows * width);
                      for (std::size_t i = 0; i < idvec.size(); ++i) {
                          gm.segment(idvec[i] * width, width) +=
                              g.segment(static_cast<Index>(i) * width, width);
                      }
                      sink.add(pm, gm);
                  });
}

Tensor take_row(const Tensor& m, Index row) {
    const Index ids[1] = {row};
    return reshape(take_rows(m, ids), {m.cols()});
}

Tensor reshape(const Tensor& t, Shape shape) {
    if (shape_size(shape) != t.size()) shape_error("reshape", t.shape(), shape);
    Array out = t.array();
    return finish("reshape", std::move(shape), std::move(out), {&t},
                  [pt = t.node()](const Array& g, GradSink& sink) { sink.add(pt, g); });
}

// -- Nonlinearities -----------------------------------------------------------

Tensor sigmoid(const Tensor& x) {
    Array out = 1.0 / (1.0 + (-x.array()).exp());
    Array saved = out;
    return finish("sigmoid", x.shape(), std::move(out), {&x},
                  [pt = x.node(), saved = std::move(saved)](const Array& g, GradSink& sink) {
                      sink.add(pt, Array(g * saved * (1.0 - saved)));
                  });
}

Tensor tanh(const Tensor& x) {
    Array out = x.array().tanh();
    Array saved = out;
    return finish("tanh", x.shape(), std::move(out), {&x},
                  [pt = x.node(), saved = std::move(saved)](const Array& g, GradSink& sink) {
                      sink.add(pt, Array(g * (1.0 - saved.square())));
                  });
}

Tensor exp(const Tensor& x) {
    Array out = x.array().exp();
    Array saved = out;
    return finish("exp", x.shape(), std::move(out), {&x},
                  [pt = x.node(), saved = std::move(saved)](const Array& g, GradSink& sink) {
                      sink.add(pt, Array(g * saved));
                  });
}

Tensor log(const Tensor& x) {
    Array out = x.array().log();
    return finish("log", x.shape(), std::move(out), {&x},
                  [x](const Array& g, GradSink& sink) {
                      sink.add(x.node(), Array(g / x.array()));
                  });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
    if (!(lo <= hi)) throw std::invalid_argument("clamp: lo must not exceed hi");
    Array out = x.array().max(lo).min(hi);
    Array pass = ((x.array() >= lo) && (x.array() <= hi)).cast<double>();
    return finish("clamp", x.shape(), std::move(out), {&x},
                  [pt = x.node(), pass = std::move(pass)](const Array& g, GradSink& sink) {
                      sink.add(pt, Array(g * pass));
                  });
}

// -- Reductions and normalization ---------------------------------------------

Tensor mean(const Tensor& x, int axis) {
    if (x.rank() == 1) {
        if (axis != 0) throw std::invalid_argument("mean: rank-1 tensor has only axis 0");
        const double inv = 1.0 / static_cast<double>(x.size());
        Array out = Array::Constant(1, x.array().mean());
        return finish("mean", {1}, std::move(out), {&x},
                      [pt = x.node(), n = x.size(), inv](const Array& g, GradSink& sink) {
                          sink.add(pt, Array(Array::Constant(n, g[0] * inv)));
                      });
    }
    const Index r = x.rows();
    const Index c = x.cols();
    if (axis == 0) {
        Array out(c);
        Eigen::Map<Eigen::RowVectorXd>(out.data(), c) = x.matrix().colwise().mean();
        return finish("mean", {c}, std::move(out), {&x},
                      [pt = x.node(), r, c](const Array& g, GradSink& sink) {
                          if (pt < 0) return;
                          Array gm(r * c);
                          MatrixMap(gm.data(), r, c).rowwise() =
                              Eigen::Map<const Eigen::RowVectorXd>(g.data(), c) /
                              static_cast<double>(r);
                          sink.add(pt, gm);
                      });
    }
    if (axis == 1) {
        Array out(r);
        Eigen::Map<Eigen::VectorXd>(out.data(), r) = x.matrix().rowwise().mean();
        return finish("mean", {r}, std::move(out), {&x},
                      [pt = x.node(), r, c](const Array& g, GradSink& sink) {
                          if (pt < 0) return;
                          Array gm(r * c);
                          MatrixMap(gm.data(), r, c).colwise() =
                              Eigen::Map<const Eigen::VectorXd>(g.data(), r) /
                              static_cast<double>(c);
                          sink.add(pt, gm);
                      });
    }
    throw std::invalid_argument("mean: axis must be 0 or 1");
}

namespace {

void softmax_group(const double* x, double* y, Index n, Index stride) {
    double mx = x[0];
    for (Index i = 1; i < n; ++i) mx = std::max(mx, x[i * stride]);
    double sum = 0.0;
    for (Index i = 0; i < n; ++i) {
        const double e = std::exp(x[i * stride] - mx);
        y[i * stride] = e;
        sum += e;
    }
    for (Index i = 0; i < n; ++i) y[i * stride] /= sum;
}

void softmax_group_grad(const double* s, const double* g, double* out, Index n, Index stride) {
    double dot = 0.0;
    for (Index i = 0; i < n; ++i) dot += s[i * stride] * g[i * stride];
    for (Index i = 0; i < n; ++i) out[i * stride] = s[i * stride] * (g[i * stride] - dot);
}

}  // namespace

Tensor softmax(const Tensor& x, int axis) {
    const bool vector_input = x.rank() == 1;
    if (vector_input && axis != 0) {
        throw std::invalid_argument("softmax: rank-1 tensor has only axis 0");
    }
    if (!vector_input && axis != 0 && axis != 1) {
        throw std::invalid_argument("softmax: axis must be 0 or 1");
    }
    const Index r = vector_input ? x.size() : x.rows();
    const Index c = vector_input ? 1 : x.cols();
    // Group layout: axis 0 normalizes down each column, axis 1 along each row.
    const Index groups = (axis == 0) ? c : r;
    const Index n = (axis == 0) ? r : c;
    const Index stride = (axis == 0) ? c : 1;

    Array out(x.size());
    for (Index gidx = 0; gidx < groups; ++gidx) {
        const Index base = (axis == 0) ? gidx : gidx * c;
        softmax_group(x.array().data() + base, out.data() + base, n, stride);
    }
    Array saved = out;
    return finish("softmax", x.shape(), std::move(out), {&x},
                  [pt = x.node(), saved = std::move(saved), groups, n, stride, axis,
                   c](const Array& g, GradSink& sink) {
                      if (pt < 0) return;
                      Array gx(saved.size());
                      for (Index gidx = 0; gidx < groups; ++gidx) {
                          const Index base = (axis == 0) ? gidx : gidx * c;
                          softmax_group_grad(saved.data() + base, g.data() + base,
                                             gx.data() + base, n, stride);
                      }
                      sink.add(pt, gx);
                  });
}

// -- Dropout --------------------------------------------------------------

Tensor dropout_mask(const Shape& shape, double keep, RngState& rng) {
    if (!(keep > 0.0 && keep <= 1.0)) {
        throw std::invalid_argument("dropout_mask: keep probability must be in (0, 1]");
    }
    Array m(shape_size(shape));
    for (Index i = 0; i < m.size(); ++i) m[i] = rng.uniform(0.0, 1.0) < keep ? 1.0 : 0.0;
    return Tensor(shape, std::move(m));
}

Tensor dropout(const Tensor& x, double keep, const Tensor& mask) {
    if (!(keep > 0.0 && keep <= 1.0)) {
        throw std::invalid_argument("dropout: keep probability must be in (0, 1]");
    }
    if (keep == 1.0) {
        Array out = x.array();
        return finish("dropout", x.shape(), std::move(out), {&x},
                      [pt = x.node()](const Array& g, GradSink& sink) { sink.add(pt, g); });
    }
    if (mask.taped()) throw std::invalid_argument("dropout: mask must be untaped");
    if (mask.shape() != x.shape()) shape_error("dropout", x.shape(), mask.shape());
    const double inv = 1.0 / keep;
    Array out = x.array() * mask.array() * inv;
    return finish("dropout", x.shape(), std::move(out), {&x},
                  [pt = x.node(), mask, inv](const Array& g, GradSink& sink) {
                      sink.add(pt, Array(g * mask.array() * inv));
                  });
}

Tensor sum_squares(const Tensor& x) {
    Array out = Array::Constant(1, x.array().square().sum());
    return finish("sum_squares", {1}, std::move(out), {&x},
                  [x](const Array& g, GradSink& sink) {
                      sink.add(x.node(), Array(2.0 * g[0] * x.array()));
                  });
}

Tensor affine(const Tensor& w, const Tensor& x, const Tensor& b) {
    return add(matmul(w, x), b);
}

// -- Gradient checking ---------------------------------------------------

double relative_error(double a, double b) {
    // The denominator floor keeps finite-difference rounding noise (~1e-11
    // at step 1e-5) from registering as error on zero-gradient coordinates.
    const double denom = std::max(std::abs(a) + std::abs(b), 1e-3);
    return std::abs(a - b) / denom;
}

std::string GradCheckReport::table() const {
    std::ostringstream out;
    out << std::setw(10) << "coord" << std::setw(18) << "analytic" << std::setw(18) << "numeric"
        << std::setw(14) << "rel-err" << '\n';
    for (const GradCheckRow& row : rows) {
        out << std::setw(10) << row.coordinate << std::setw(18) << std::setprecision(9)
            << row.analytic << std::setw(18) << row.numeric << std::setw(14)
            << std::setprecision(3) << row.rel_err << '\n';
    }
    out << "max rel-err " << std::setprecision(6) << max_rel_err << (passed ? "  PASS" : "  FAIL")
        << '\n';
    return out.str();
}

GradCheckReport grad_check(const std::function<Tensor(Tape&, const Tensor&)>& f,
                           const Tensor& point, double step, double tol) {
    if (!(step > 0.0)) throw std::invalid_argument("grad_check: step must be positive");

    Tape tape;
    const Tensor watched = tape.watch(point.detached());
    const Tensor loss = f(tape, watched);
    if (loss.size() != 1) {
        throw std::invalid_argument("grad_check: f must be scalar-valued, got shape " +
                                    shape_str(loss.shape()));
    }
    const Tensor analytic = tape.backward(loss).at(watched);

    auto eval = [&](const Array& values) {
        Tape t;
        const Tensor l = f(t, t.watch(Tensor(point.shape(), values)));
        return l.value();
    };

    GradCheckReport report;
    report.rows.reserve(static_cast<std::size_t>(point.size()));
    for (Index i = 0; i < point.size(); ++i) {
        Array plus = point.array();
        Array minus = point.array();
        plus[i] += step;
        minus[i] -= step;
        const double numeric = (eval(plus) - eval(minus)) / (2.0 * step);
        const double err = relative_error(analytic(i), numeric);
        report.rows.push_back({i, analytic(i), numeric, err});
        report.max_rel_err = std::max(report.max_rel_err, err);
    }
    report.passed = report.max_rel_err <= tol;
    return report;
}

}  // namespace its
