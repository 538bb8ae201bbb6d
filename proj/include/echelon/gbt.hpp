#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "echelon/errors.hpp"

namespace echelon::gbt {

// ===== Data =====

// Feature matrix with per-column presorted row indices; the sort is done
// once and shared by every tree fit on the same inputs.
struct Dataset {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<double> values;  // row-major
    std::vector<std::vector<std::uint32_t>> sorted;

    double at(std::size_t r, std::size_t c) const { return values[r * n_cols + c]; }

    static Dataset build(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw DomainError("empty feature matrix");
        Dataset d;
        d.n_rows = rows.size();
        d.n_cols = rows[0].size();
        if (d.n_cols == 0) throw DomainError("feature matrix has no columns");
        d.values.reserve(d.n_rows * d.n_cols);
        for (const auto& r : rows) {
            if (r.size() != d.n_cols) throw DomainError("ragged feature matrix");
            for (double v : r) {
                if (!std::isfinite(v)) throw DomainError("non-finite feature value");
                d.values.push_back(v);
            }
        }
        d.sorted.resize(d.n_cols);
        for (std::size_t c = 0; c < d.n_cols; ++c) {
            auto& idx = d.sorted[c];
            idx.resize(d.n_rows);
            std::iota(idx.begin(), idx.end(), 0u);
            std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
                const double va = d.at(a, c), vb = d.at(b, c);
                if (va != vb) return va < vb;
                return a < b;
            });
        }
        return d;
    }
};

// ===== Trees =====

// Arena-stored node; feature < 0 marks a leaf.
struct TreeNode {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double value = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(const double* x) const {
        std::int32_t i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const TreeNode& nd = nodes[static_cast<std::size_t>(i)];
            i = x[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }
};

namespace detail {

struct NodeRows {
    std::vector<std::uint32_t> original;               // ascending row index
    std::vector<std::vector<std::uint32_t>> by_feature;  // per feature, ascending value
};

// Leaf value: mean residual over members in ascending original row order,
// so an independent recomputation lands on the same double.
inline double leaf_mean(const std::vector<std::uint32_t>& rows, const std::vector<double>& residuals) {
    double s = 0.0;
    for (std::uint32_t r : rows) s += residuals[r];
    return s / static_cast<double>(rows.size());
}

struct Split {
    double gain = -std::numeric_limits<double>::infinity();
    std::size_t feature = 0;
    double threshold = 0.0;
};

inline std::int32_t grow(const Dataset& X, const std::vector<double>& residuals, NodeRows rows, std::size_t depth,
                         std::size_t max_depth, std::size_t min_leaf, std::vector<TreeNode>& arena) {
    const std::size_t n = rows.original.size();
    const auto make_leaf = [&]() {
        TreeNode leaf;
        leaf.value = leaf_mean(rows.original, residuals);
        arena.push_back(leaf);
        return static_cast<std::int32_t>(arena.size() - 1);
    };
    if (depth >= max_depth || n < 2 * min_leaf) return make_leaf();

    double total = 0.0, total_sq = 0.0;
    for (std::uint32_t r : rows.original) {
        total += residuals[r];
        total_sq += residuals[r] * residuals[r];
    }

    // SSE reduction via the sum identity: gain = sl^2/nl + sr^2/nr - s^2/n.
    // Candidates are midpoints between consecutive distinct sorted values;
    // first strict improvement wins, which yields the lowest-feature,
    // lowest-threshold tie-break since the scan runs in that order.
    Split best;
    const double parent_term = total * total / static_cast<double>(n);
    for (std::size_t f = 0; f < X.n_cols; ++f) {
        const auto& lst = rows.by_feature[f];
        double left_sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) {
                const double prev = X.at(lst[i - 1], f);
                const double cur = X.at(lst[i], f);
                if (cur != prev && i >= min_leaf && n - i >= min_leaf) {
                    const double right_sum = total - left_sum;
                    const double gain = left_sum * left_sum / static_cast<double>(i) +
                                        right_sum * right_sum / static_cast<double>(n - i) - parent_term;
                    if (gain > best.gain) {
                        best.gain = gain;
                        best.feature = f;
                        best.threshold = 0.5 * (prev + cur);
                    }
                }
            }
            left_sum += residuals[lst[i]];
        }
    }

    const double eps = 1e-12 * std::max(1.0, total_sq);
    if (best.gain <= eps) return make_leaf();

    NodeRows left, right;
    const auto goes_left = [&](std::uint32_t r) { return X.at(r, best.feature) <= best.threshold; };
    for (std::uint32_t r : rows.original) (goes_left(r) ? left.original : right.original).push_back(r);
    left.by_feature.resize(X.n_cols);
    right.by_feature.resize(X.n_cols);
    for (std::size_t f = 0; f < X.n_cols; ++f) {
        for (std::uint32_t r : rows.by_feature[f]) (goes_left(r) ? left.by_feature[f] : right.by_feature[f]).push_back(r);
    }
    rows = NodeRows{};  // children own the row lists now

    TreeNode internal;
    internal.feature = static_cast<std::int32_t>(best.feature);
    internal.threshold = best.threshold;
    arena.push_back(internal);
    const std::int32_t self = static_cast<std::int32_t>(arena.size() - 1);
    arena[static_cast<std::size_t>(self)].left = grow(X, residuals, std::move(left), depth + 1, max_depth, min_leaf, arena);
    arena[static_cast<std::size_t>(self)].right =
        grow(X, residuals, std::move(right), depth + 1, max_depth, min_leaf, arena);
    return self;
}

}  // namespace detail

// Greedy CART regression tree on the residuals.
inline Tree fit_tree(const Dataset& X, const std::vector<double>& residuals, std::size_t max_depth,
                     std::size_t min_leaf) {
    if (residuals.size() != X.n_rows) throw DomainError("residual count does not match rows");
    if (X.n_rows == 0) throw DomainError("cannot fit a tree on zero rows");
    if (min_leaf == 0) throw ConfigError("min_leaf must be at least 1");
    detail::NodeRows rows;
    rows.original.resize(X.n_rows);
    std::iota(rows.original.begin(), rows.original.end(), 0u);
    rows.by_feature = X.sorted;
    Tree t;
    detail::grow(X, residuals, std::move(rows), 0, max_depth, min_leaf, t.nodes);
    return t;
}

// ===== Boosting =====

struct GbtParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 3;
    double learning_rate = 0.1;
    std::size_t min_leaf = 2;

    void validate() const {
        if (n_trees == 0) throw ConfigError("n_trees must be positive");
        if (max_depth == 0) throw ConfigError("max_depth must be positive");
        if (learning_rate <= 0.0 || learning_rate > 1.0) throw ConfigError("learning_rate must be in (0,1]");
        if (min_leaf == 0) throw ConfigError("min_leaf must be positive");
    }
};

struct Ensemble {
    double base_prediction = 0.0;
    double learning_rate = 0.1;
    std::size_t n_features = 0;
    std::vector<Tree> trees;

    double predict(const std::vector<double>& x) const {
        if (x.size() != n_features) throw DomainError("prediction input dimension mismatch");
        double v = base_prediction;
        for (const Tree& t : trees) v += learning_rate * t.predict(x.data());
        return v;
    }
};

// First-order residual boosting: F_0 = mean(y), each tree fits y - F_{m-1}.
// No row or column subsampling, so the seed only exists for interface
// symmetry with the other models.
inline Ensemble fit(const Dataset& X, const std::vector<double>& y, const GbtParams& params,
                    [[maybe_unused]] std::uint64_t seed = 0) {
    params.validate();
    if (y.size() != X.n_rows) throw DomainError("target count does not match rows");
    for (double v : y) {
        if (!std::isfinite(v)) throw DomainError("non-finite target value");
    }

    Ensemble e;
    e.learning_rate = params.learning_rate;
    e.n_features = X.n_cols;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    e.base_prediction = mean;

    std::vector<double> current(y.size(), mean);
    std::vector<double> residuals(y.size());
    e.trees.reserve(params.n_trees);
    for (std::size_t m = 0; m < params.n_trees; ++m) {
        for (std::size_t i = 0; i < y.size(); ++i) residuals[i] = y[i] - current[i];
        Tree t = fit_tree(X, residuals, params.max_depth, params.min_leaf);
        for (std::size_t i = 0; i < y.size(); ++i) {
            current[i] += params.learning_rate * t.predict(&X.values[i * X.n_cols]);
        }
        e.trees.push_back(std::move(t));
    }
    return e;
}

}  // namespace echelon::gbt
