#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irrl/net/param_tree.hpp"
#include "irrl/vec2.hpp"

namespace irrl {

using NodeId = int;

/// Reverse-mode autodiff tape over vector-valued nodes. Values live in one
/// arena so repeated forward passes reuse capacity instead of reallocating.
/// Parameters stay inside their ParamTree; backward accumulates straight into
/// the tree's gradient slots. A tape can be replayed from scratch with clear()
/// but each recording supports exactly one backward pass.
class Tape {
public:
    enum class Op : std::uint8_t {
        Input,        // leaf (constant or differentiable)
        Linear,       // y = W x (+ b)
        Concat,       // y = [x_0 | x_1 | ...]
        Slice,        // y = x[off .. off+len)
        Relu,
        LeakyRelu,    // aux_d0 = slope
        Tanh,
        Exp,
        Log,
        Square,
        AffineConst,  // y = a x + b      (aux_d0 = a, aux_d1 = b)
        AddConstVec,  // y = x + c        (c in const arena)
        AxpyConst,    // y = x0 .* c + x1 (c in const arena)
        ScaleConst,   // y = a x
        Add,
        Sub,
        MulElem,
        SumReduce,    // scalar sum of components
        DotParam,     // scalar a_param . x
        Softmax,
        WeightedSum,  // y = sum_i w[i] v_i; in0 = weights, list = values
        L2Normalize,  // y = x / max(|x|, eps)
        ClipNorm,     // y = x scaled into the |.| <= cap ball
        ClampRange,   // y = clamp(x, lo, hi)
    };

    void clear() {
        nodes_.clear();
        val_.clear();
        ids_.clear();
        consts_.clear();
        trees_.clear();
        consumed_ = false;
    }

    /// Register a parameter tree; Linear/DotParam ops refer to it by slot.
    int attach(ParamTree& tree) {
        trees_.push_back(&tree);
        return static_cast<int>(trees_.size()) - 1;
    }

    NodeId input(std::span<const double> values, bool requires_grad = false) {
        const NodeId id = push(Op::Input, static_cast<int>(values.size()), -1, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = requires_grad ? 1 : 0;
        std::copy(values.begin(), values.end(), val_.begin() + n.off);
        return id;
    }

    NodeId input(const Vec2& v, bool requires_grad = false) {
        const double data[2] = {v.x, v.y};
        return input(std::span<const double>(data, 2), requires_grad);
    }

    NodeId linear(int tree_slot, int w_idx, int b_idx, NodeId x) {
        const Param& w = trees_[static_cast<std::size_t>(tree_slot)]->at(w_idx);
        check_size(x, w.cols);
        const NodeId id = push(Op::Linear, w.rows, x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = tree_slot;
        n.aux_i1 = w_idx;
        n.aux_i2 = b_idx;
        const double* xin = ptr(x);
        double* out = val_.data() + n.off;
        const double* wm = w.w.data();
        for (int r = 0; r < w.rows; ++r) {
            double acc = 0.0;
            const double* row = wm + static_cast<std::size_t>(r) * w.cols;
            for (int c = 0; c < w.cols; ++c) acc += row[c] * xin[c];
            out[r] = acc;
        }
        if (b_idx >= 0) {
            const Param& b = trees_[static_cast<std::size_t>(tree_slot)]->at(b_idx);
            for (int r = 0; r < w.rows; ++r) out[r] += b.w[static_cast<std::size_t>(r)];
        }
        return id;
    }

    NodeId concat(std::span<const NodeId> parts) {
        int total = 0;
        for (NodeId p : parts) total += size(p);
        const NodeId id = push(Op::Concat, total, -1, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = static_cast<int>(ids_.size());
        n.aux_i1 = static_cast<int>(parts.size());
        for (NodeId p : parts) ids_.push_back(p);
        double* out = val_.data() + n.off;
        for (NodeId p : parts) {
            const double* src = ptr(p);
            const int len = size(p);
            std::copy(src, src + len, out);
            out += len;
        }
        return id;
    }

    NodeId concat2(NodeId a, NodeId b) {
        const NodeId parts[2] = {a, b};
        return concat(std::span<const NodeId>(parts, 2));
    }

    NodeId slice(NodeId x, int offset, int len) {
        const NodeId id = push(Op::Slice, len, x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = offset;
        const double* xin = ptr(x);
        std::copy(xin + offset, xin + offset + len, val_.begin() + n.off);
        return id;
    }

    NodeId relu(NodeId x) {
        const NodeId id = push(Op::Relu, size(x), x, -1);
        unary(id, x, [](double v) { return v > 0.0 ? v : 0.0; });
        return id;
    }

    NodeId leaky_relu(NodeId x, double slope) {
        const NodeId id = push(Op::LeakyRelu, size(x), x, -1);
        nodes_[static_cast<std::size_t>(id)].aux_d0 = slope;
        unary(id, x, [slope](double v) { return v > 0.0 ? v : slope * v; });
        return id;
    }

    NodeId tanh(NodeId x) {
        const NodeId id = push(Op::Tanh, size(x), x, -1);
        unary(id, x, [](double v) { return std::tanh(v); });
        return id;
    }

    NodeId exp(NodeId x) {
        const NodeId id = push(Op::Exp, size(x), x, -1);
        unary(id, x, [](double v) { return std::exp(v); });
        return id;
    }

    NodeId log(NodeId x) {
        const NodeId id = push(Op::Log, size(x), x, -1);
        unary(id, x, [](double v) { return std::log(v); });
        return id;
    }

    NodeId square(NodeId x) {
        const NodeId id = push(Op::Square, size(x), x, -1);
        unary(id, x, [](double v) { return v * v; });
        return id;
    }

    NodeId affine_const(NodeId x, double a, double b) {
        const NodeId id = push(Op::AffineConst, size(x), x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_d0 = a;
        n.aux_d1 = b;
        unary(id, x, [a, b](double v) { return a * v + b; });
        return id;
    }

    NodeId add_const_vec(NodeId x, std::span<const double> c) {
        check_size(x, static_cast<int>(c.size()));
        const NodeId id = push(Op::AddConstVec, size(x), x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = store_consts(c);
        const double* xin = ptr(x);
        double* out = val_.data() + n.off;
        for (int i = 0; i < n.size; ++i) out[i] = xin[i] + c[static_cast<std::size_t>(i)];
        return id;
    }

    /// y = x0 .* c + x1 (reparameterized sampling: std .* noise + mean).
    NodeId axpy_const(NodeId x0, std::span<const double> c, NodeId x1) {
        check_size(x0, static_cast<int>(c.size()));
        check_size(x1, static_cast<int>(c.size()));
        const NodeId id = push(Op::AxpyConst, size(x0), x0, x1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = store_consts(c);
        const double* a = ptr(x0);
        const double* b = ptr(x1);
        double* out = val_.data() + n.off;
        for (int i = 0; i < n.size; ++i) out[i] = a[i] * c[static_cast<std::size_t>(i)] + b[i];
        return id;
    }

    NodeId scale_const(NodeId x, double a) {
        const NodeId id = push(Op::ScaleConst, size(x), x, -1);
        nodes_[static_cast<std::size_t>(id)].aux_d0 = a;
        unary(id, x, [a](double v) { return a * v; });
        return id;
    }

    NodeId add(NodeId a, NodeId b) { return binary(Op::Add, a, b); }
    NodeId sub(NodeId a, NodeId b) { return binary(Op::Sub, a, b); }
    NodeId mul_elem(NodeId a, NodeId b) { return binary(Op::MulElem, a, b); }

    NodeId sum_reduce(NodeId x) {
        const NodeId id = push(Op::SumReduce, 1, x, -1);
        const double* xin = ptr(x);
        double acc = 0.0;
        for (int i = 0; i < size(x); ++i) acc += xin[i];
        val_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(id)].off)] = acc;
        return id;
    }

    NodeId dot_param(int tree_slot, int a_idx, NodeId x) {
        const Param& a = trees_[static_cast<std::size_t>(tree_slot)]->at(a_idx);
        check_size(x, a.size());
        const NodeId id = push(Op::DotParam, 1, x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = tree_slot;
        n.aux_i1 = a_idx;
        const double* xin = ptr(x);
        double acc = 0.0;
        for (int i = 0; i < a.size(); ++i) acc += a.w[static_cast<std::size_t>(i)] * xin[i];
        val_[static_cast<std::size_t>(n.off)] = acc;
        return id;
    }

    NodeId softmax(NodeId x) {
        const NodeId id = push(Op::Softmax, size(x), x, -1);
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        const double* xin = ptr(x);
        double* out = val_.data() + n.off;
        double mx = xin[0];
        for (int i = 1; i < n.size; ++i) mx = std::max(mx, xin[i]);
        double denom = 0.0;
        for (int i = 0; i < n.size; ++i) {
            out[i] = std::exp(xin[i] - mx);
            denom += out[i];
        }
        for (int i = 0; i < n.size; ++i) out[i] /= denom;
        return id;
    }

    /// y = sum_i weights[i] * values_i. All value nodes share one length.
    NodeId weighted_sum(NodeId weights, std::span<const NodeId> values) {
        if (size(weights) != static_cast<int>(values.size())) {
            throw std::logic_error("weighted_sum: weight/value count mismatch");
        }
        const int dim = size(values[0]);
        const NodeId id = push(Op::WeightedSum, dim, weights, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_i0 = static_cast<int>(ids_.size());
        n.aux_i1 = static_cast<int>(values.size());
        for (NodeId v : values) ids_.push_back(v);
        const double* w = ptr(weights);
        double* out = val_.data() + n.off;
        for (int i = 0; i < dim; ++i) out[i] = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j) {
            const double* v = ptr(values[j]);
            for (int i = 0; i < dim; ++i) out[i] += w[j] * v[i];
        }
        return id;
    }

    static constexpr double kNormEps = 1e-8;

    NodeId l2_normalize(NodeId x) {
        const NodeId id = push(Op::L2Normalize, size(x), x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        const double* xin = ptr(x);
        double norm_sq = 0.0;
        for (int i = 0; i < n.size; ++i) norm_sq += xin[i] * xin[i];
        const double norm = std::sqrt(norm_sq);
        const double denom = norm < kNormEps ? kNormEps : norm;
        n.aux_d0 = denom;
        n.aux_d1 = norm < kNormEps ? 1.0 : 0.0;  // guard branch marker
        double* out = val_.data() + n.off;
        for (int i = 0; i < n.size; ++i) out[i] = xin[i] / denom;
        return id;
    }

    NodeId clip_norm(NodeId x, double cap) {
        const NodeId id = push(Op::ClipNorm, size(x), x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        const double* xin = ptr(x);
        double norm_sq = 0.0;
        for (int i = 0; i < n.size; ++i) norm_sq += xin[i] * xin[i];
        const double norm = std::sqrt(norm_sq);
        const double scale = (norm > cap && norm > 0.0) ? cap / norm : 1.0;
        n.aux_d0 = scale;
        double* out = val_.data() + n.off;
        for (int i = 0; i < n.size; ++i) out[i] = xin[i] * scale;
        return id;
    }

    NodeId clamp_range(NodeId x, double lo, double hi) {
        const NodeId id = push(Op::ClampRange, size(x), x, -1);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        n.aux_d0 = lo;
        n.aux_d1 = hi;
        unary(id, x, [lo, hi](double v) { return v < lo ? lo : (v > hi ? hi : v); });
        return id;
    }

    int size(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].size; }

    std::span<const double> value(NodeId id) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        return {val_.data() + n.off, static_cast<std::size_t>(n.size)};
    }

    double scalar(NodeId id) const { return value(id)[0]; }

    Vec2 vec2(NodeId id) const {
        const auto v = value(id);
        return {v[0], v[1]};
    }

    /// Gradient of the seeded scalars w.r.t. a differentiable input node.
    std::span<const double> input_grad(NodeId id) const {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        return {grad_.data() + n.off, static_cast<std::size_t>(n.size)};
    }

    /// Reverse pass. Seeds are (node, d loss / d node) pairs for scalar nodes.
    /// Parameter gradients accumulate into the attached trees. One shot per
    /// recording: a second call without clear() is a usage error.
    void backward(std::initializer_list<std::pair<NodeId, double>> seeds) {
        if (consumed_) throw std::logic_error("Tape::backward called on a consumed tape");
        consumed_ = true;
        grad_.assign(val_.size(), 0.0);
        for (const auto& [node, seed] : seeds) {
            if (size(node) != 1) throw std::logic_error("backward seeds must be scalar nodes");
            grad_[static_cast<std::size_t>(nodes_[static_cast<std::size_t>(node)].off)] += seed;
        }
        for (int i = static_cast<int>(nodes_.size()) - 1; i >= 0; --i) backprop_node(i);
    }

private:
    struct Node {
        Op op;
        int in0 = -1;
        int in1 = -1;
        int size = 0;
        int off = 0;
        int aux_i0 = 0;
        int aux_i1 = 0;
        int aux_i2 = 0;
        double aux_d0 = 0.0;
        double aux_d1 = 0.0;
    };

    NodeId push(Op op, int out_size, NodeId in0, NodeId in1) {
        if (consumed_) throw std::logic_error("Tape reused after backward without clear()");
        Node n;
        n.op = op;
        n.in0 = in0;
        n.in1 = in1;
        n.size = out_size;
        n.off = static_cast<int>(val_.size());
        val_.resize(val_.size() + static_cast<std::size_t>(out_size), 0.0);
        nodes_.push_back(n);
        return static_cast<NodeId>(nodes_.size()) - 1;
    }

    template <typename F>
    void unary(NodeId id, NodeId x, F&& f) {
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        const double* xin = ptr(x);
        double* out = val_.data() + n.off;
        for (int i = 0; i < n.size; ++i) out[i] = f(xin[i]);
    }

    NodeId binary(Op op, NodeId a, NodeId b) {
        check_size(b, size(a));
        const NodeId id = push(op, size(a), a, b);
        const Node& n = nodes_[static_cast<std::size_t>(id)];
        const double* pa = ptr(a);
        const double* pb = ptr(b);
        double* out = val_.data() + n.off;
        switch (op) {
            case Op::Add:
                for (int i = 0; i < n.size; ++i) out[i] = pa[i] + pb[i];
                break;
            case Op::Sub:
                for (int i = 0; i < n.size; ++i) out[i] = pa[i] - pb[i];
                break;
            default:
                for (int i = 0; i < n.size; ++i) out[i] = pa[i] * pb[i];
                break;
        }
        return id;
    }

    const double* ptr(NodeId id) const {
        return val_.data() + nodes_[static_cast<std::size_t>(id)].off;
    }

    double* gptr(NodeId id) { return grad_.data() + nodes_[static_cast<std::size_t>(id)].off; }

    int store_consts(std::span<const double> c) {
        const int off = static_cast<int>(consts_.size());
        consts_.insert(consts_.end(), c.begin(), c.end());
        return off;
    }

    void check_size(NodeId id, int expected) const {
        if (size(id) != expected) throw std::logic_error("tape node size mismatch");
    }

    void backprop_node(int i) {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        const double* gy = grad_.data() + n.off;
        bool any = false;
        for (int k = 0; k < n.size; ++k) {
            if (gy[k] != 0.0) {
                any = true;
                break;
            }
        }
        if (!any) return;

        switch (n.op) {
            case Op::Input:
                break;
            case Op::Linear: {
                ParamTree& tree = *trees_[static_cast<std::size_t>(n.aux_i0)];
                Param& w = tree.at(n.aux_i1);
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                for (int r = 0; r < w.rows; ++r) {
                    const double g = gy[r];
                    if (g == 0.0) continue;
                    const double* row = w.w.data() + static_cast<std::size_t>(r) * w.cols;
                    double* grow = w.g.data() + static_cast<std::size_t>(r) * w.cols;
                    for (int c = 0; c < w.cols; ++c) {
                        gx[c] += g * row[c];
                        grow[c] += g * x[c];
                    }
                }
                if (n.aux_i2 >= 0) {
                    Param& b = tree.at(n.aux_i2);
                    for (int r = 0; r < w.rows; ++r) b.g[static_cast<std::size_t>(r)] += gy[r];
                }
                break;
            }
            case Op::Concat: {
                double* out_base = grad_.data() + n.off;
                int cursor = 0;
                for (int k = 0; k < n.aux_i1; ++k) {
                    const NodeId part = ids_[static_cast<std::size_t>(n.aux_i0 + k)];
                    double* gx = gptr(part);
                    const int len = size(part);
                    for (int j = 0; j < len; ++j) gx[j] += out_base[cursor + j];
                    cursor += len;
                }
                break;
            }
            case Op::Slice: {
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[n.aux_i0 + j] += gy[j];
                break;
            }
            case Op::Relu: {
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) {
                    if (x[j] > 0.0) gx[j] += gy[j];
                }
                break;
            }
            case Op::LeakyRelu: {
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += x[j] > 0.0 ? gy[j] : n.aux_d0 * gy[j];
                break;
            }
            case Op::Tanh: {
                const double* y = ptr(i);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += gy[j] * (1.0 - y[j] * y[j]);
                break;
            }
            case Op::Exp: {
                const double* y = ptr(i);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += gy[j] * y[j];
                break;
            }
            case Op::Log: {
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += gy[j] / x[j];
                break;
            }
            case Op::Square: {
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += gy[j] * 2.0 * x[j];
                break;
            }
            case Op::AffineConst: {
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += n.aux_d0 * gy[j];
                break;
            }
            case Op::AddConstVec: {
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += gy[j];
                break;
            }
            case Op::AxpyConst: {
                const double* c = consts_.data() + n.aux_i0;
                double* gx0 = gptr(n.in0);
                double* gx1 = gptr(n.in1);
                for (int j = 0; j < n.size; ++j) {
                    gx0[j] += gy[j] * c[j];
                    gx1[j] += gy[j];
                }
                break;
            }
            case Op::ScaleConst: {
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) gx[j] += n.aux_d0 * gy[j];
                break;
            }
            case Op::Add: {
                double* ga = gptr(n.in0);
                double* gb = gptr(n.in1);
                for (int j = 0; j < n.size; ++j) {
                    ga[j] += gy[j];
                    gb[j] += gy[j];
                }
                break;
            }
            case Op::Sub: {
                double* ga = gptr(n.in0);
                double* gb = gptr(n.in1);
                for (int j = 0; j < n.size; ++j) {
                    ga[j] += gy[j];
                    gb[j] -= gy[j];
                }
                break;
            }
            case Op::MulElem: {
                const double* a = ptr(n.in0);
                const double* b = ptr(n.in1);
                double* ga = gptr(n.in0);
                double* gb = gptr(n.in1);
                for (int j = 0; j < n.size; ++j) {
                    ga[j] += gy[j] * b[j];
                    gb[j] += gy[j] * a[j];
                }
                break;
            }
            case Op::SumReduce: {
                double* gx = gptr(n.in0);
                const double g = gy[0];
                for (int j = 0; j < size(n.in0); ++j) gx[j] += g;
                break;
            }
            case Op::DotParam: {
                ParamTree& tree = *trees_[static_cast<std::size_t>(n.aux_i0)];
                Param& a = tree.at(n.aux_i1);
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                const double g = gy[0];
                for (int j = 0; j < a.size(); ++j) {
                    gx[j] += g * a.w[static_cast<std::size_t>(j)];
                    a.g[static_cast<std::size_t>(j)] += g * x[j];
                }
                break;
            }
            case Op::Softmax: {
                const double* y = ptr(i);
                double* gx = gptr(n.in0);
                double inner = 0.0;
                for (int j = 0; j < n.size; ++j) inner += gy[j] * y[j];
                for (int j = 0; j < n.size; ++j) gx[j] += y[j] * (gy[j] - inner);
                break;
            }
            case Op::WeightedSum: {
                const double* w = ptr(n.in0);
                double* gw = gptr(n.in0);
                for (int k = 0; k < n.aux_i1; ++k) {
                    const NodeId vid = ids_[static_cast<std::size_t>(n.aux_i0 + k)];
                    const double* v = ptr(vid);
                    double* gv = gptr(vid);
                    double acc = 0.0;
                    for (int j = 0; j < n.size; ++j) {
                        acc += v[j] * gy[j];
                        gv[j] += w[k] * gy[j];
                    }
                    gw[k] += acc;
                }
                break;
            }
            case Op::L2Normalize: {
                const double* y = ptr(i);
                double* gx = gptr(n.in0);
                const double denom = n.aux_d0;
                if (n.aux_d1 != 0.0) {
                    for (int j = 0; j < n.size; ++j) gx[j] += gy[j] / denom;
                } else {
                    double inner = 0.0;
                    for (int j = 0; j < n.size; ++j) inner += gy[j] * y[j];
                    for (int j = 0; j < n.size; ++j) gx[j] += (gy[j] - y[j] * inner) / denom;
                }
                break;
            }
            case Op::ClipNorm: {
                const double scale = n.aux_d0;
                double* gx = gptr(n.in0);
                if (scale == 1.0) {
                    for (int j = 0; j < n.size; ++j) gx[j] += gy[j];
                } else {
                    const double* x = ptr(n.in0);
                    double norm_sq = 0.0;
                    double inner = 0.0;
                    for (int j = 0; j < n.size; ++j) {
                        norm_sq += x[j] * x[j];
                        inner += x[j] * gy[j];
                    }
                    for (int j = 0; j < n.size; ++j) {
                        gx[j] += scale * (gy[j] - x[j] * inner / norm_sq);
                    }
                }
                break;
            }
            case Op::ClampRange: {
                const double* x = ptr(n.in0);
                double* gx = gptr(n.in0);
                for (int j = 0; j < n.size; ++j) {
                    if (x[j] >= n.aux_d0 && x[j] <= n.aux_d1) gx[j] += gy[j];
                }
                break;
            }
        }
    }

    std::vector<Node> nodes_;
    std::vector<double> val_;
    std::vector<double> grad_;
    std::vector<int> ids_;
    std::vector<double> consts_;
    std::vector<ParamTree*> trees_;
    bool consumed_ = false;
};

}  // namespace irrl
