// gcn.hpp — three-layer graph convolutional classifier with mean-pool
// readout and a linear softmax head, trained with Adam on mini-batches.
#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/nn.hpp"
#include "cascadelab/tree.hpp"

namespace cascadelab {

struct GcnModel {
    GraphConvNet net;   // widths: features -> 18 -> 18 -> 18
    LinearLayer head;   // 18 -> K
    FeatureScaler scaler;
    std::vector<std::string> class_names;

    int n_classes() const { return static_cast<int>(head.w.cols()); }

    std::vector<Matrix*> params() {
        auto out = net.params();
        out.push_back(&head.w);
        out.push_back(&head.b);
        return out;
    }
};

inline constexpr Eigen::Index kGcnHiddenWidth = 18;

inline RowVector predict_logits(const GcnModel& model, const PreparedGraph& g) {
    if (g.features.cols() != model.net.weights.front().rows())
        throw InvalidInputError("node feature width incompatible with GCN input layer");
    return model.head.forward(model.net.forward(g));
}

inline std::vector<double> predict_proba(const GcnModel& model, const PreparedGraph& g) {
    const RowVector p = softmax(predict_logits(model, g));
    return {p.data(), p.data() + p.size()};
}

inline int predict_class(const GcnModel& model, const PreparedGraph& g) {
    Eigen::Index best = 0;
    predict_logits(model, g).maxCoeff(&best);
    return static_cast<int>(best);
}

namespace detail {

inline double gcn_batch_loss(GcnModel& model, const std::vector<const PreparedGraph*>& batch,
                             std::vector<Matrix>* grads_out) {
    return classifier_batch_loss(model.net, model.head, batch, grads_out);
}

inline double macro_f1_score(const std::vector<int>& preds, const std::vector<int>& truths,
                             int n_classes) {
    std::vector<double> tp(n_classes, 0.0), fp(n_classes, 0.0), fn(n_classes, 0.0);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] == truths[i])
            tp[preds[i]] += 1.0;
        else {
            fp[preds[i]] += 1.0;
            fn[truths[i]] += 1.0;
        }
    }
    double macro = 0.0;
    for (int k = 0; k < n_classes; ++k) {
        const double denom = 2.0 * tp[k] + fp[k] + fn[k];
        macro += denom > 0.0 ? 2.0 * tp[k] / denom : 0.0;
    }
    return macro / static_cast<double>(n_classes);
}

}  // namespace detail

// Trains for spec.epochs with mini-batches of spec.batch_size and returns the
// parameters of the epoch with the best validation macro-F1 (ties -> latest).
inline GcnModel train_gcn(const std::vector<PreparedGraph>& train,
                          const std::vector<PreparedGraph>& val, int n_classes,
                          const TrainSpec& spec, const FeatureScaler& scaler,
                          std::vector<std::string> class_names = {}) {
    if (train.empty()) throw InvalidInputError("empty GCN training set");

    Rng init_rng(derive_seed(spec.seed, "gcn-init"));
    GcnModel model;
    model.scaler = scaler;
    model.class_names = std::move(class_names);
    const Eigen::Index in_dim = train.front().features.cols();
    model.net = GraphConvNet::make({in_dim, kGcnHiddenWidth, kGcnHiddenWidth, kGcnHiddenWidth},
                                   init_rng);
    model.head = LinearLayer::make(kGcnHiddenWidth, n_classes, init_rng);

    Adam adam;
    adam.lr = spec.learning_rate;
    adam.init(model.params());

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    double best_f1 = -1.0;
    std::vector<Matrix> best_weights;
    Matrix best_head_w, best_head_b;
    auto snapshot = [&] {
        best_weights = model.net.weights;
        best_head_w = model.head.w;
        best_head_b = model.head.b;
    };

    Rng shuffle_rng(derive_seed(spec.seed, "gcn-shuffle"));
    for (std::size_t epoch = 0; epoch < spec.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            std::vector<const PreparedGraph*> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + spec.batch_size);
                 ++i)
                batch.push_back(&train[order[i]]);
            std::vector<Matrix> grads;
            detail::gcn_batch_loss(model, batch, &grads);
            adam.step(model.params(), grads);
        }
        std::vector<int> preds, truths;
        for (const PreparedGraph& g : val) {
            preds.push_back(predict_class(model, g));
            truths.push_back(g.label);
        }
        const double f1 =
            val.empty() ? 0.0 : detail::macro_f1_score(preds, truths, n_classes);
        if (f1 >= best_f1) {
            best_f1 = f1;
            snapshot();
        }
    }
    if (!best_weights.empty()) {
        model.net.weights = best_weights;
        model.head.w = best_head_w;
        model.head.b = best_head_b;
    }
    return model;
}

}  // namespace cascadelab
