// contrastive.hpp — contrastive cascade representation learning: structural
// augmentation of cascade graphs, NT-Xent pre-training of a two-layer graph
// encoder, supervised fine-tuning, and teacher-student distillation.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cascadelab/cascade.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/gcn.hpp"
#include "cascadelab/nn.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

struct AugmentConfig {
    double leaf_drop_rate = 0.1;
    double node_add_rate = 0.1;
    double time_jitter = 0.05;
    std::uint64_t seed = 0;
};

// All reconstructed internals are overridable from configuration.
struct ContrastiveSpec {
    double temperature = 0.5;
    std::size_t batch_size = 64;
    std::size_t pretrain_epochs = 30;
    std::size_t finetune_epochs = 20;
    std::size_t distill_epochs = 20;
    double distill_temperature = 2.0;
    double distill_alpha = 0.5;  // weight of the hard-label CE term
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    Eigen::Index encoder_width = 64;
    Eigen::Index projection_hidden = 64;
    Eigen::Index projection_dim = 32;
};

inline void validate_contrastive_spec(const ContrastiveSpec& spec) {
    if (spec.temperature <= 0.0) throw InvalidConfigError("temperature must be positive");
    if (spec.batch_size < 2) throw InvalidConfigError("batch_size must be at least 2");
    if (spec.distill_alpha < 0.0 || spec.distill_alpha > 1.0)
        throw InvalidConfigError("distill_alpha must lie in [0, 1]");
    if (spec.learning_rate <= 0.0) throw InvalidConfigError("learning_rate must be positive");
}

struct EncoderModel {
    GraphConvNet net;  // features -> width -> width
    Mlp2 projection;   // width -> hidden -> projection_dim
    FeatureScaler scaler;

    std::vector<Matrix*> params() {
        auto out = net.params();
        out.push_back(&projection.l1.w);
        out.push_back(&projection.l1.b);
        out.push_back(&projection.l2.w);
        out.push_back(&projection.l2.b);
        return out;
    }
};

struct ContrastiveClassifier {
    GraphConvNet net;
    LinearLayer head;
    FeatureScaler scaler;
    std::vector<std::string> class_names;
    std::string phase;  // pretrained | finetuned | distilled

    int n_classes() const { return static_cast<int>(head.w.cols()); }

    std::vector<Matrix*> params() {
        auto out = net.params();
        out.push_back(&head.w);
        out.push_back(&head.b);
        return out;
    }
};

inline RowVector predict_logits(const ContrastiveClassifier& model, const PreparedGraph& g) {
    if (g.features.cols() != model.net.weights.front().rows())
        throw InvalidInputError("node feature width incompatible with encoder input layer");
    return model.head.forward(model.net.forward(g));
}

inline std::vector<double> predict_proba(const ContrastiveClassifier& model,
                                         const PreparedGraph& g) {
    const RowVector p = softmax(predict_logits(model, g));
    return {p.data(), p.data() + p.size()};
}

inline int predict_class(const ContrastiveClassifier& model, const PreparedGraph& g) {
    Eigen::Index best = 0;
    predict_logits(model, g).maxCoeff(&best);
    return static_cast<int>(best);
}

// Structural augmentation: drop current leaves, grow new leaves with
// degree-proportional parents, jitter non-root times, then restore
// parent-before-child ordering. The origin is never removed.
inline CascadeGraph augment(const CascadeGraph& g, const AugmentConfig& cfg, Rng& rng) {
    if (g.nodes.empty()) throw InvalidInputError("augment on an empty graph");
    const NodeId root = g.root();

    std::unordered_map<NodeId, std::size_t> child_count;
    for (const auto& [p, c] : g.edges) ++child_count[p];

    std::unordered_set<NodeId> dropped;
    for (const NodeId n : g.nodes) {
        if (n == root || child_count.count(n)) continue;  // root or internal
        if (rng.bernoulli(cfg.leaf_drop_rate)) dropped.insert(n);
    }

    std::vector<NodeId> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::unordered_map<NodeId, double> times;
    for (const NodeId n : g.nodes) {
        if (dropped.count(n)) continue;
        nodes.push_back(n);
        times.emplace(n, g.node_times.at(n));
    }
    for (const auto& [p, c] : g.edges)
        if (!dropped.count(c)) edges.emplace_back(p, c);

    // median gap between consecutive surviving activation times
    std::vector<double> sorted_times;
    sorted_times.reserve(nodes.size());
    for (const NodeId n : nodes) sorted_times.push_back(times.at(n));
    std::sort(sorted_times.begin(), sorted_times.end());
    double gap = 1.0;
    if (sorted_times.size() >= 2) {
        std::vector<double> diffs;
        for (std::size_t i = 1; i < sorted_times.size(); ++i)
            diffs.push_back(sorted_times[i] - sorted_times[i - 1]);
        std::sort(diffs.begin(), diffs.end());
        const double median = diffs[diffs.size() / 2];
        if (median > 0.0) gap = median;
    }

    std::vector<NodeId> urn;  // one entry per edge endpoint
    for (const auto& [p, c] : edges) {
        urn.push_back(p);
        urn.push_back(c);
    }
    NodeId next_id = 0;
    for (const NodeId n : nodes) next_id = std::max(next_id, n);
    ++next_id;

    const std::size_t survivors = nodes.size();
    for (std::size_t i = 0; i < survivors; ++i) {
        if (!rng.bernoulli(cfg.node_add_rate)) continue;
        const NodeId parent = urn.empty() ? nodes[rng.index(survivors)]
                                          : urn[rng.index(urn.size())];
        const NodeId child = next_id++;
        const double t =
            times.at(parent) + gap * (1.0 + rng.uniform(-cfg.time_jitter, cfg.time_jitter));
        nodes.push_back(child);
        edges.emplace_back(parent, child);
        times.emplace(child, t);
        urn.push_back(parent);
        urn.push_back(child);
    }

    for (const NodeId n : nodes)
        if (n != root) times[n] *= 1.0 + rng.uniform(-cfg.time_jitter, cfg.time_jitter);

    // clamp children onto their parents in topological order
    std::unordered_map<NodeId, std::vector<NodeId>> children;
    for (const auto& [p, c] : edges) children[p].push_back(c);
    std::vector<NodeId> frontier{root};
    for (std::size_t i = 0; i < frontier.size(); ++i) {
        const NodeId u = frontier[i];
        const auto it = children.find(u);
        if (it == children.end()) continue;
        for (const NodeId c : it->second) {
            times[c] = std::max(times[c], times[u]);
            frontier.push_back(c);
        }
    }

    std::stable_sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
        if (a == root) return b != root;
        if (b == root) return false;
        return times.at(a) < times.at(b);
    });

    CascadeGraph out;
    out.nodes = std::move(nodes);
    out.edges = std::move(edges);
    out.node_times = std::move(times);
    out.label = g.label;
    out.unit = g.unit;
    return out;
}

inline CascadeGraph augment(const CascadeGraph& g, const AugmentConfig& cfg) {
    Rng rng(cfg.seed);
    return augment(g, cfg, rng);
}

// Cosine-similarity NT-Xent over 2N projected views, rows (2i, 2i+1) being
// the positive pairs. Returns the batch mean; fills dz when requested.
inline double nt_xent_loss(const Matrix& z, double temperature, Matrix* dz = nullptr) {
    const Eigen::Index rows = z.rows();
    if (rows < 4 || rows % 2 != 0)
        throw InvalidInputError("nt_xent_loss needs at least two pairs of views");
    if (temperature <= 0.0) throw InvalidInputError("temperature must be positive");

    Eigen::VectorXd norms(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        norms(i) = z.row(i).norm();
        if (norms(i) < 1e-12) throw InvalidInputError("zero-norm embedding in nt_xent_loss");
    }
    Matrix zhat = z.array().colwise() / norms.array();
    const Matrix sim = (zhat * zhat.transpose()) / temperature;

    double loss = 0.0;
    Matrix dsim;
    if (dz) dsim = Matrix::Zero(rows, rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Eigen::Index partner = i ^ 1;
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = 0; j < rows; ++j)
            if (j != i) mx = std::max(mx, sim(i, j));
        double denom = 0.0;
        for (Eigen::Index j = 0; j < rows; ++j)
            if (j != i) denom += std::exp(sim(i, j) - mx);
        const double lse = mx + std::log(denom);
        loss += lse - sim(i, partner);
        if (dz) {
            for (Eigen::Index j = 0; j < rows; ++j) {
                if (j == i) continue;
                const double sm = std::exp(sim(i, j) - lse);
                dsim(i, j) += (sm - (j == partner ? 1.0 : 0.0)) / static_cast<double>(rows);
            }
        }
    }
    loss /= static_cast<double>(rows);

    if (dz) {
        const Matrix dzhat = ((dsim + dsim.transpose()) * zhat) / temperature;
        dz->resize(rows, z.cols());
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double inner = dzhat.row(i).dot(zhat.row(i));
            dz->row(i) = (dzhat.row(i) - inner * zhat.row(i)) / norms(i);
        }
    }
    return loss;
}

struct PretrainResult {
    EncoderModel encoder;
    std::vector<double> epoch_losses;  // mean pre-step batch loss per epoch
    double initial_loss = 0.0;         // first batch, before any update
};

namespace detail {

struct ViewCache {
    PreparedGraph graph;
    GraphConvNet::Cache net_cache;
    Mlp2::Cache proj_cache;
    RowVector pooled;
};

}  // namespace detail

// SimCLR-style pre-training: per epoch, shuffle, form batches, embed two
// fresh augmented views of every graph, and minimize NT-Xent with Adam.
inline PretrainResult pretrain(const std::vector<CascadeGraph>& unlabeled,
                               const ContrastiveSpec& spec, const AugmentConfig& aug_cfg,
                               const ObservationWindow& window = {}) {
    validate_contrastive_spec(spec);
    if (unlabeled.size() < spec.batch_size)
        throw InvalidInputError("pretraining pool smaller than batch_size");

    PretrainResult result;
    std::vector<Matrix> raw;
    raw.reserve(unlabeled.size());
    for (const CascadeGraph& g : unlabeled) raw.push_back(raw_node_feature_matrix(g, window));
    result.encoder.scaler.fit(raw);

    Rng init_rng(derive_seed(spec.seed, "encoder-init"));
    result.encoder.net = GraphConvNet::make(
        {kNodeFeatureCount, spec.encoder_width, spec.encoder_width}, init_rng);
    result.encoder.projection = Mlp2::make(spec.encoder_width, spec.projection_hidden,
                                           spec.projection_dim, init_rng);

    EncoderModel& enc = result.encoder;
    const auto params = enc.params();
    Adam adam;
    adam.lr = spec.learning_rate;
    adam.init(params);

    const std::size_t conv_layers = enc.net.weights.size();
    std::vector<std::size_t> order(unlabeled.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(spec.seed, "pretrain-shuffle"));
    bool first_batch = true;

    for (std::size_t epoch = 0; epoch < spec.pretrain_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        Rng aug_rng(derive_seed(spec.seed, "pretrain-aug", epoch));
        double epoch_loss = 0.0;
        std::size_t batches = 0;

        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            const std::size_t end = std::min(order.size(), start + spec.batch_size);
            if (end - start < 2) continue;  // NT-Xent needs two pairs minimum

            std::vector<detail::ViewCache> views;
            views.reserve(2 * (end - start));
            for (std::size_t i = start; i < end; ++i) {
                for (int v = 0; v < 2; ++v) {
                    detail::ViewCache vc;
                    const CascadeGraph view = augment(unlabeled[order[i]], aug_cfg, aug_rng);
                    vc.graph = prepare_graph(view, window, &enc.scaler);
                    views.push_back(std::move(vc));
                }
            }
            Matrix z(static_cast<Eigen::Index>(views.size()), spec.projection_dim);
            for (std::size_t i = 0; i < views.size(); ++i) {
                views[i].pooled = enc.net.forward(views[i].graph, &views[i].net_cache);
                z.row(static_cast<Eigen::Index>(i)) =
                    enc.projection.forward(views[i].pooled, &views[i].proj_cache);
            }
            Matrix dz;
            const double loss = nt_xent_loss(z, spec.temperature, &dz);
            epoch_loss += loss;
            ++batches;
            if (first_batch) {
                result.initial_loss = loss;
                first_batch = false;
            }

            std::vector<Matrix> grads = zero_like(params);
            for (std::size_t i = 0; i < views.size(); ++i) {
                const RowVector dpooled = enc.projection.backward(
                    views[i].proj_cache, dz.row(static_cast<Eigen::Index>(i)),
                    grads[conv_layers], grads[conv_layers + 1], grads[conv_layers + 2],
                    grads[conv_layers + 3]);
                enc.net.backward(views[i].graph, views[i].net_cache, dpooled, grads);
            }
            adam.step(params, grads);
        }
        result.epoch_losses.push_back(batches > 0 ? epoch_loss / static_cast<double>(batches)
                                                  : 0.0);
    }
    return result;
}

struct FinetuneResult {
    ContrastiveClassifier model;
    std::vector<double> val_f1_history;
    std::size_t best_epoch = 0;
};

namespace detail {

inline void require_two_classes(const std::vector<int>& labels, int n_classes) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (const int y : labels) {
        if (y < 0 || y >= n_classes) throw InvalidInputError("label outside [0, n_classes)");
        ++counts[y];
    }
    std::size_t present = 0;
    for (const auto c : counts)
        if (c > 0) ++present;
    if (present < 2) throw DegenerateModelError("training set contains a single class");
}

inline std::vector<PreparedGraph> prepare_all(const std::vector<CascadeGraph>& graphs,
                                              const std::vector<int>* labels,
                                              const ObservationWindow& window,
                                              const FeatureScaler& scaler) {
    std::vector<PreparedGraph> out;
    out.reserve(graphs.size());
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        PreparedGraph pg = prepare_graph(graphs[i], window, &scaler);
        if (labels) pg.label = (*labels)[i];
        out.push_back(std::move(pg));
    }
    return out;
}

}  // namespace detail

// Joint training of a linear softmax head and the encoder body with
// cross-entropy; returns the epoch with the best validation macro-F1
// (ties resolved toward the latest epoch).
inline FinetuneResult finetune(const EncoderModel& encoder,
                               const std::vector<CascadeGraph>& train_graphs,
                               const std::vector<int>& train_labels,
                               const std::vector<CascadeGraph>& val_graphs,
                               const std::vector<int>& val_labels, int n_classes,
                               const ContrastiveSpec& spec,
                               const ObservationWindow& window = {},
                               std::vector<std::string> class_names = {}) {
    validate_contrastive_spec(spec);
    if (train_graphs.empty()) throw InvalidInputError("empty fine-tuning set");
    detail::require_two_classes(train_labels, n_classes);

    FinetuneResult result;
    ContrastiveClassifier& model = result.model;
    model.net = encoder.net;
    model.scaler = encoder.scaler;
    model.class_names = std::move(class_names);
    model.phase = "finetuned";
    Rng head_rng(derive_seed(spec.seed, "finetune-head"));
    model.head = LinearLayer::make(encoder.net.out_dim(), n_classes, head_rng);

    const auto train = detail::prepare_all(train_graphs, &train_labels, window, model.scaler);
    const auto val = detail::prepare_all(val_graphs, &val_labels, window, model.scaler);

    const auto params = model.params();
    Adam adam;
    adam.lr = spec.learning_rate;
    adam.init(params);

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(spec.seed, "finetune-shuffle"));

    double best_f1 = -1.0;
    std::vector<Matrix> best_weights;
    Matrix best_head_w, best_head_b;
    for (std::size_t epoch = 0; epoch < spec.finetune_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            std::vector<const PreparedGraph*> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + spec.batch_size);
                 ++i)
                batch.push_back(&train[order[i]]);
            std::vector<Matrix> grads;
            classifier_batch_loss(model.net, model.head, batch, &grads);
            adam.step(params, grads);
        }
        std::vector<int> preds, truths;
        for (const PreparedGraph& g : val) {
            preds.push_back(predict_class(model, g));
            truths.push_back(g.label);
        }
        const double f1 =
            val.empty() ? 0.0 : detail::macro_f1_score(preds, truths, n_classes);
        result.val_f1_history.push_back(f1);
        if (f1 >= best_f1) {
            best_f1 = f1;
            result.best_epoch = epoch;
            best_weights = model.net.weights;
            best_head_w = model.head.w;
            best_head_b = model.head.b;
        }
    }
    if (!best_weights.empty()) {
        model.net.weights = best_weights;
        model.head.w = best_head_w;
        model.head.b = best_head_b;
    }
    return result;
}

namespace detail {

struct DistillItem {
    const PreparedGraph* graph;
    bool labeled;
};

// Batch objective: alpha * mean CE over labeled items + (1-alpha) * T^2 *
// mean KL(teacher || student) over all items.
inline double distill_batch_loss(const ContrastiveClassifier& teacher,
                                 ContrastiveClassifier& student,
                                 const std::vector<DistillItem>& batch, double alpha,
                                 double temperature, std::vector<Matrix>* grads_out) {
    const std::size_t conv_layers = student.net.weights.size();
    std::vector<Matrix> grads;
    if (grads_out) grads = zero_like(student.params());

    std::size_t labeled_count = 0;
    for (const auto& item : batch)
        if (item.labeled) ++labeled_count;
    const double ce_scale = labeled_count > 0 ? 1.0 / static_cast<double>(labeled_count) : 0.0;
    const double kl_scale = 1.0 / static_cast<double>(batch.size());
    const double t2 = temperature * temperature;

    double ce_total = 0.0, kl_total = 0.0;
    for (const auto& item : batch) {
        GraphConvNet::Cache cache;
        const RowVector pooled = student.net.forward(*item.graph, grads_out ? &cache : nullptr);
        const RowVector logits = student.head.forward(pooled);
        const RowVector teacher_logits = predict_logits(teacher, *item.graph);

        RowVector dlogits = RowVector::Zero(logits.size());
        RowVector dkl;
        kl_total += kl_softened(teacher_logits, logits, temperature, dkl);
        dlogits += (1.0 - alpha) * t2 * kl_scale * dkl;
        if (item.labeled) {
            RowVector dce;
            ce_total += cross_entropy(logits, item.graph->label, dce);
            dlogits += alpha * ce_scale * dce;
        }
        if (grads_out) {
            const RowVector dpooled =
                student.head.backward(pooled, dlogits, grads[conv_layers],
                                      grads[conv_layers + 1]);
            student.net.backward(*item.graph, cache, dpooled, grads);
        }
    }
    if (grads_out) *grads_out = std::move(grads);
    return alpha * ce_scale * ce_total + (1.0 - alpha) * t2 * kl_scale * kl_total;
}

}  // namespace detail

struct DistillResult {
    ContrastiveClassifier model;
    std::vector<double> val_f1_history;
    std::size_t best_epoch = 0;
};

// Student (initialized from the teacher) trained on labeled + unlabeled
// graphs; the caller is responsible for passing an unlabeled pool disjoint
// from the labeled set.
inline DistillResult distill(const ContrastiveClassifier& teacher,
                             const std::vector<CascadeGraph>& train_graphs,
                             const std::vector<int>& train_labels,
                             const std::vector<CascadeGraph>& val_graphs,
                             const std::vector<int>& val_labels,
                             const std::vector<CascadeGraph>& unlabeled, int n_classes,
                             const ContrastiveSpec& spec,
                             const ObservationWindow& window = {}) {
    validate_contrastive_spec(spec);
    if (train_graphs.empty()) throw InvalidInputError("empty distillation labeled set");
    detail::require_two_classes(train_labels, n_classes);

    DistillResult result;
    ContrastiveClassifier& student = result.model;
    student = teacher;
    student.phase = "distilled";

    const auto train =
        detail::prepare_all(train_graphs, &train_labels, window, student.scaler);
    const auto val = detail::prepare_all(val_graphs, &val_labels, window, student.scaler);
    const auto pool = detail::prepare_all(unlabeled, nullptr, window, student.scaler);

    std::vector<detail::DistillItem> items;
    for (const PreparedGraph& g : train) items.push_back({&g, true});
    for (const PreparedGraph& g : pool) items.push_back({&g, false});

    const auto params = student.params();
    Adam adam;
    adam.lr = spec.learning_rate;
    adam.init(params);

    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed(spec.seed, "distill-shuffle"));

    double best_f1 = -1.0;
    std::vector<Matrix> best_weights;
    Matrix best_head_w, best_head_b;
    for (std::size_t epoch = 0; epoch < spec.distill_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += spec.batch_size) {
            std::vector<detail::DistillItem> batch;
            for (std::size_t i = start; i < std::min(order.size(), start + spec.batch_size);
                 ++i)
                batch.push_back(items[order[i]]);
            std::vector<Matrix> grads;
            detail::distill_batch_loss(teacher, student, batch, spec.distill_alpha,
                                       spec.distill_temperature, &grads);
            adam.step(params, grads);
        }
        std::vector<int> preds, truths;
        for (const PreparedGraph& g : val) {
            preds.push_back(predict_class(student, g));
            truths.push_back(g.label);
        }
        const double f1 =
            val.empty() ? 0.0 : detail::macro_f1_score(preds, truths, n_classes);
        result.val_f1_history.push_back(f1);
        if (f1 >= best_f1) {
            best_f1 = f1;
            result.best_epoch = epoch;
            best_weights = student.net.weights;
            best_head_w = student.head.w;
            best_head_b = student.head.b;
        }
    }
    if (!best_weights.empty()) {
        student.net.weights = best_weights;
        student.head.w = best_head_w;
        student.head.b = best_head_b;
    }
    return result;
}

}  // namespace cascadelab
