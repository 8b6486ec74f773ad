// random_forest.hpp — bootstrap-aggregated entropy trees with a sqrt(d)
// feature subset per split.
#pragma once

#include <cmath>
#include <span>
#include <thread>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/rng.hpp"
#include "cascadelab/tree.hpp"

namespace cascadelab {

struct ForestModel {
    int n_classes = 0;
    std::vector<DecisionTree> trees;
};

namespace detail {

inline void require_multiclass(const std::vector<int>& y, int n_classes) {
    if (y.empty()) throw InvalidInputError("empty training set");
    std::vector<std::size_t> counts(n_classes, 0);
    for (const int label : y) {
        if (label < 0 || label >= n_classes)
            throw InvalidInputError("label outside [0, n_classes)");
        ++counts[label];
    }
    std::size_t present = 0;
    for (const auto c : counts)
        if (c > 0) ++present;
    if (present < 2)
        throw DegenerateModelError("training set contains a single class");
}

}  // namespace detail

// Each tree sees a bootstrap of the full training size; per-tree RNG streams
// are derived from (seed, tree index) so optional tree-parallelism cannot
// change the result.
inline ForestModel train_random_forest(const FeatureRows& x, const std::vector<int>& y,
                                       int n_classes, const TrainSpec& spec,
                                       unsigned threads = 1) {
    detail::require_multiclass(y, n_classes);
    if (x.size() != y.size()) throw InvalidInputError("feature/label size mismatch");

    const std::size_t d = x[0].size();
    const auto max_features =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    ForestModel model;
    model.n_classes = n_classes;
    model.trees.resize(spec.n_trees);

    auto build_one = [&](std::size_t t) {
        Rng rng(derive_seed(spec.seed, "rf-tree", t));
        std::vector<std::size_t> bootstrap(x.size());
        for (auto& s : bootstrap) s = rng.index(x.size());
        model.trees[t] = build_classification_tree(x, y, n_classes, std::move(bootstrap),
                                                   max_features, 2, rng);
    };

    const unsigned workers = std::max(1u, threads);
    if (workers == 1) {
        for (std::size_t t = 0; t < spec.n_trees; ++t) build_one(t);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < spec.n_trees; t += workers) build_one(t);
            });
        for (auto& th : pool) th.join();
    }
    return model;
}

// Ensemble probability = mean of the leaf distributions across trees.
inline std::vector<double> predict_proba(const ForestModel& model,
                                         std::span<const double> x) {
    if (model.trees.empty()) throw InvalidInputError("forest model has no trees");
    std::vector<double> probs(model.n_classes, 0.0);
    for (const DecisionTree& tree : model.trees) {
        const auto& leaf = tree.predict(x);
        if (leaf.size() != probs.size())
            throw InvalidInputError("input dimension incompatible with model");
        for (std::size_t k = 0; k < probs.size(); ++k) probs[k] += leaf[k];
    }
    for (auto& p : probs) p /= static_cast<double>(model.trees.size());
    return probs;
}

inline int predict_class(const ForestModel& model, std::span<const double> x) {
    const auto probs = predict_proba(model, x);
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace cascadelab
