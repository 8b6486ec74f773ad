// tree.hpp — axis-aligned decision trees shared by the forest and boosting
// models, plus the training spec common to all classifier families.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

// Hyperparameters for every model family; each trainer reads what it needs.
struct TrainSpec {
    std::uint64_t seed = 0;
    // forest
    std::size_t n_trees = 100;
    // boosting
    std::size_t boosting_rounds = 1000;
    std::size_t early_stopping_patience = 10;
    double gbt_learning_rate = 0.1;
    std::size_t gbt_max_depth = 6;
    // gcn
    std::size_t batch_size = 5;
    std::size_t epochs = 20;
    double learning_rate = 0.01;
};

using FeatureRows = std::vector<std::vector<double>>;

// Shannon entropy in bits of a probability vector.
inline double shannon_entropy(std::span<const double> probs) {
    double h = 0.0;
    for (const double p : probs)
        if (p > 0.0) h -= p * std::log2(p);
    return h;
}

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::vector<double> value;  // class distribution, or {prediction} for regression
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    const std::vector<double>& predict(std::span<const double> x) const {
        std::int32_t at = 0;
        while (nodes[at].feature >= 0) {
            const TreeNode& nd = nodes[at];
            at = (x[static_cast<std::size_t>(nd.feature)] <= nd.threshold) ? nd.left : nd.right;
        }
        return nodes[at].value;
    }
};

namespace detail {

struct SplitChoice {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double score = 0.0;  // impurity decrease (classification) or SSE decrease
};

// Best entropy split over a random feature subset; samples are row indices
// into X (duplicates allowed, so bootstraps work unchanged).
inline SplitChoice best_entropy_split(const FeatureRows& x, const std::vector<int>& y,
                                      int n_classes, std::span<const std::size_t> samples,
                                      std::size_t max_features, Rng& rng) {
    const std::size_t d = x[0].size();
    std::vector<std::size_t> features(d);
    std::iota(features.begin(), features.end(), 0);
    for (std::size_t i = 0; i < std::min(max_features, d); ++i) {
        const std::size_t j = i + rng.index(d - i);
        std::swap(features[i], features[j]);
    }
    features.resize(std::min(max_features, d));
    std::sort(features.begin(), features.end());

    const double n = static_cast<double>(samples.size());
    std::vector<double> parent_counts(n_classes, 0.0);
    for (const std::size_t s : samples) parent_counts[y[s]] += 1.0;
    std::vector<double> parent_probs(n_classes);
    for (int k = 0; k < n_classes; ++k) parent_probs[k] = parent_counts[k] / n;
    const double parent_entropy = shannon_entropy(parent_probs);

    SplitChoice best;
    std::vector<std::pair<double, int>> column(samples.size());
    std::vector<double> left_counts(n_classes);
    std::vector<double> lp(n_classes), rp(n_classes);
    for (const std::size_t f : features) {
        for (std::size_t i = 0; i < samples.size(); ++i)
            column[i] = {x[samples[i]][f], y[samples[i]]};
        std::sort(column.begin(), column.end());
        std::fill(left_counts.begin(), left_counts.end(), 0.0);
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            left_counts[column[i].second] += 1.0;
            if (column[i].first == column[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = n - nl;
            for (int k = 0; k < n_classes; ++k) {
                lp[k] = left_counts[k] / nl;
                rp[k] = (parent_counts[k] - left_counts[k]) / nr;
            }
            const double gain = parent_entropy - (nl * shannon_entropy(lp) +
                                                  nr * shannon_entropy(rp)) /
                                                     n;
            if (gain > best.score) {
                best.score = gain;
                best.feature = static_cast<std::int32_t>(f);
                best.threshold = 0.5 * (column[i].first + column[i + 1].first);
            }
        }
    }
    return best;
}

// Best squared-error split over all features (boosting uses exact splits).
inline SplitChoice best_sse_split(const FeatureRows& x, const std::vector<double>& target,
                                  std::span<const std::size_t> samples) {
    const std::size_t d = x[0].size();
    const double n = static_cast<double>(samples.size());
    double total = 0.0;
    for (const std::size_t s : samples) total += target[s];

    SplitChoice best;
    std::vector<std::pair<double, double>> column(samples.size());
    for (std::size_t f = 0; f < d; ++f) {
        for (std::size_t i = 0; i < samples.size(); ++i)
            column[i] = {x[samples[i]][f], target[samples[i]]};
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < column.size(); ++i) {
            left_sum += column[i].second;
            if (column[i].first == column[i + 1].first) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = n - nl;
            // SSE decrease = nl*meanL^2 + nr*meanR^2 - n*mean^2 (constant dropped)
            const double score = left_sum * left_sum / nl +
                                 (total - left_sum) * (total - left_sum) / nr -
                                 total * total / n;
            if (score > best.score + 1e-12) {
                best.score = score;
                best.feature = static_cast<std::int32_t>(f);
                best.threshold = 0.5 * (column[i].first + column[i + 1].first);
            }
        }
    }
    return best;
}

}  // namespace detail

// Classification tree on a (possibly bootstrapped) sample set: information
// gain splits on a random ceil(sqrt(d)) feature subset, grown to pure leaves
// or below min_samples_split.
inline DecisionTree build_classification_tree(const FeatureRows& x, const std::vector<int>& y,
                                              int n_classes,
                                              std::vector<std::size_t> samples,
                                              std::size_t max_features,
                                              std::size_t min_samples_split, Rng& rng) {
    DecisionTree tree;
    struct Work {
        std::int32_t node;
        std::vector<std::size_t> samples;
    };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, std::move(samples)});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        std::vector<double> counts(n_classes, 0.0);
        for (const std::size_t s : w.samples) counts[y[s]] += 1.0;
        const double n = static_cast<double>(w.samples.size());
        bool pure = false;
        for (int k = 0; k < n_classes; ++k)
            if (counts[k] == n) pure = true;

        auto make_leaf = [&] {
            auto& value = tree.nodes[w.node].value;
            value.resize(n_classes);
            for (int k = 0; k < n_classes; ++k) value[k] = counts[k] / n;
        };

        if (pure || w.samples.size() < min_samples_split) {
            make_leaf();
            continue;
        }
        const auto split =
            detail::best_entropy_split(x, y, n_classes, w.samples, max_features, rng);
        if (split.feature < 0) {
            make_leaf();
            continue;
        }

        std::vector<std::size_t> left, right;
        for (const std::size_t s : w.samples) {
            if (x[s][split.feature] <= split.threshold)
                left.push_back(s);
            else
                right.push_back(s);
        }
        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& nd = tree.nodes[w.node];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = left_id;
        nd.right = left_id + 1;
        stack.push_back({left_id, std::move(left)});
        stack.push_back({left_id + 1, std::move(right)});
    }
    return tree;
}

// Depth-limited least-squares regression tree; leaves hold the mean target.
inline DecisionTree build_regression_tree(const FeatureRows& x,
                                          const std::vector<double>& target,
                                          std::vector<std::size_t> samples,
                                          std::size_t max_depth,
                                          std::size_t min_samples_split) {
    DecisionTree tree;
    struct Work {
        std::int32_t node;
        std::size_t depth;
        std::vector<std::size_t> samples;
    };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, std::move(samples)});

    while (!stack.empty()) {
        Work w = std::move(stack.back());
        stack.pop_back();

        double mean = 0.0;
        for (const std::size_t s : w.samples) mean += target[s];
        mean /= static_cast<double>(w.samples.size());

        auto make_leaf = [&] { tree.nodes[w.node].value = {mean}; };
        if (w.depth >= max_depth || w.samples.size() < min_samples_split) {
            make_leaf();
            continue;
        }
        const auto split = detail::best_sse_split(x, target, w.samples);
        if (split.feature < 0) {
            make_leaf();
            continue;
        }
        std::vector<std::size_t> left, right;
        for (const std::size_t s : w.samples) {
            if (x[s][split.feature] <= split.threshold)
                left.push_back(s);
            else
                right.push_back(s);
        }
        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        TreeNode& nd = tree.nodes[w.node];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = left_id;
        nd.right = left_id + 1;
        stack.push_back({left_id, w.depth + 1, std::move(left)});
        stack.push_back({left_id + 1, w.depth + 1, std::move(right)});
    }
    return tree;
}

}  // namespace cascadelab
