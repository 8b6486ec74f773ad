// gbt.hpp — multiclass gradient boosting: one least-squares tree per class
// per round fit to the softmax residual, with patience-based early stopping
// on validation loss.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/random_forest.hpp"
#include "cascadelab/tree.hpp"

namespace cascadelab {

class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    // Feed one validation loss; returns true once the loss has failed to
    // improve for `patience` consecutive observations.
    bool observe(double loss) {
        if (loss < best_) {
            best_ = loss;
            best_index_ = seen_;
            stale_ = 0;
        } else {
            ++stale_;
        }
        ++seen_;
        return stale_ >= patience_;
    }

    std::size_t best_index() const { return best_index_; }
    double best_loss() const { return best_; }

private:
    std::size_t patience_;
    std::size_t stale_ = 0;
    std::size_t seen_ = 0;
    std::size_t best_index_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

struct GbtModel {
    int n_classes = 0;
    double learning_rate = 0.1;
    std::size_t best_round = 0;                     // rounds used at prediction time
    std::vector<std::vector<DecisionTree>> rounds;  // rounds[r][class]
    std::vector<double> train_losses;               // per-round, after the update
    std::vector<double> val_losses;
};

namespace detail {

inline void softmax_rows(std::vector<std::vector<double>>& scores) {
    for (auto& row : scores) {
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (auto& v : row) {
            v = std::exp(v - mx);
            z += v;
        }
        for (auto& v : row) v /= z;
    }
}

inline double mean_cross_entropy(const std::vector<std::vector<double>>& scores,
                                 const std::vector<int>& y) {
    double loss = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const auto& row = scores[i];
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (const double v : row) z += std::exp(v - mx);
        loss += std::log(z) - (row[y[i]] - mx);
    }
    return loss / static_cast<double>(scores.size());
}

}  // namespace detail

inline GbtModel train_gbt(const FeatureRows& x_train, const std::vector<int>& y_train,
                          const FeatureRows& x_val, const std::vector<int>& y_val,
                          int n_classes, const TrainSpec& spec) {
    detail::require_multiclass(y_train, n_classes);
    if (x_val.empty()) throw InvalidInputError("validation set must be non-empty");
    for (const int label : y_val)
        if (label < 0 || label >= n_classes)
            throw InvalidInputError("validation label outside [0, n_classes)");

    const std::size_t n = x_train.size();
    GbtModel model;
    model.n_classes = n_classes;
    model.learning_rate = spec.gbt_learning_rate;

    std::vector<std::vector<double>> f_train(n, std::vector<double>(n_classes, 0.0));
    std::vector<std::vector<double>> f_val(x_val.size(), std::vector<double>(n_classes, 0.0));
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);

    EarlyStopping stopper(spec.early_stopping_patience);
    std::vector<double> residual(n);
    for (std::size_t round = 0; round < spec.boosting_rounds; ++round) {
        auto probs = f_train;
        detail::softmax_rows(probs);

        std::vector<DecisionTree> round_trees;
        round_trees.reserve(n_classes);
        for (int k = 0; k < n_classes; ++k) {
            for (std::size_t i = 0; i < n; ++i)
                residual[i] = (y_train[i] == k ? 1.0 : 0.0) - probs[i][k];
            round_trees.push_back(
                build_regression_tree(x_train, residual, all, spec.gbt_max_depth, 2));
        }
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < n_classes; ++k)
                f_train[i][k] += spec.gbt_learning_rate * round_trees[k].predict(x_train[i])[0];
        for (std::size_t i = 0; i < x_val.size(); ++i)
            for (int k = 0; k < n_classes; ++k)
                f_val[i][k] += spec.gbt_learning_rate * round_trees[k].predict(x_val[i])[0];
        model.rounds.push_back(std::move(round_trees));

        model.train_losses.push_back(detail::mean_cross_entropy(f_train, y_train));
        const double val_loss = detail::mean_cross_entropy(f_val, y_val);
        model.val_losses.push_back(val_loss);
        if (stopper.observe(val_loss)) break;
    }
    model.best_round = stopper.best_index() + 1;
    return model;
}

inline std::vector<double> predict_proba(const GbtModel& model, std::span<const double> x) {
    if (model.rounds.empty()) throw InvalidInputError("gbt model has no rounds");
    std::vector<double> scores(model.n_classes, 0.0);
    for (std::size_t r = 0; r < model.best_round && r < model.rounds.size(); ++r)
        for (int k = 0; k < model.n_classes; ++k)
            scores[k] += model.learning_rate * model.rounds[r][k].predict(x)[0];
    const double mx = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (auto& v : scores) {
        v = std::exp(v - mx);
        z += v;
    }
    for (auto& v : scores) v /= z;
    return scores;
}

inline int predict_class(const GbtModel& model, std::span<const double> x) {
    const auto probs = predict_proba(model, x);
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

}  // namespace cascadelab
