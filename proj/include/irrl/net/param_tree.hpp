#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrl/rng.hpp"

namespace irrl {

/// One named parameter tensor (row-major matrix, or vector when cols == 1)
/// with a same-shape gradient slot.
struct Param {
    std::string name;
    int rows = 0;
    int cols = 1;
    std::vector<double> w;
    std::vector<double> g;

    int size() const { return rows * cols; }
};

/// A network's parameters: flat list of named tensors plus their gradients.
struct ParamTree {
    std::vector<Param> params;
    std::int64_t skipped_updates = 0;

    int add_zero(std::string name, int rows, int cols = 1) {
        Param p;
        p.name = std::move(name);
        p.rows = rows;
        p.cols = cols;
        p.w.assign(static_cast<std::size_t>(rows) * cols, 0.0);
        p.g.assign(p.w.size(), 0.0);
        params.push_back(std::move(p));
        return static_cast<int>(params.size()) - 1;
    }

    /// Uniform fan-in init: U(-1/sqrt(cols), 1/sqrt(cols)).
    int add_uniform(std::string name, int rows, int cols, RngStream& rng) {
        const int idx = add_zero(std::move(name), rows, cols);
        const double bound = 1.0 / std::sqrt(static_cast<double>(cols));
        for (double& v : params[idx].w) v = rng.uniform(-bound, bound);
        return idx;
    }

    /// Bias matching a fan-in layer: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    int add_uniform_bias(std::string name, int rows, int fan_in, RngStream& rng) {
        const int idx = add_zero(std::move(name), rows, 1);
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (double& v : params[idx].w) v = rng.uniform(-bound, bound);
        return idx;
    }

    int find(const std::string& name) const {
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (params[i].name == name) return static_cast<int>(i);
        }
        throw std::out_of_range("no parameter named " + name);
    }

    Param& at(int idx) { return params.at(static_cast<std::size_t>(idx)); }
    const Param& at(int idx) const { return params.at(static_cast<std::size_t>(idx)); }

    std::size_t scalar_count() const {
        std::size_t n = 0;
        for (const Param& p : params) n += p.w.size();
        return n;
    }

    void zero_grads() {
        for (Param& p : params) {
            for (double& g : p.g) g = 0.0;
        }
    }
};

/// Plain SGD: p -= lr * g for every entry, then gradients are cleared.
/// A non-finite gradient anywhere skips the whole update (gradients are still
/// cleared, parameters untouched) and bumps `skipped_updates`. Returns whether
/// the update was applied.
inline bool sgd_step(ParamTree& tree, double learning_rate) {
    bool finite = true;
    for (const Param& p : tree.params) {
        for (double g : p.g) {
            if (!std::isfinite(g)) {
                finite = false;
                break;
            }
        }
        if (!finite) break;
    }
    if (finite) {
        for (Param& p : tree.params) {
            for (std::size_t i = 0; i < p.w.size(); ++i) {
                p.w[i] -= learning_rate * p.g[i];
                p.g[i] = 0.0;
            }
        }
        return true;
    }
    tree.skipped_updates += 1;
    tree.zero_grads();
    return false;
}

}  // namespace irrl
