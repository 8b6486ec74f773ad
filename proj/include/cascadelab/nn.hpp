// nn.hpp — small neural-net primitives shared by the GCN classifier and the
// contrastive encoder: normalized-adjacency graph prep, graph convolution
// stacks with mean-pool readout, a linear head, a two-layer projection MLP,
// softmax/KL losses, and Adam.
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "cascadelab/cascade.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/features.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// Per-feature standardization fitted on training graphs and reused verbatim
// at prediction time (stored in the model container).
struct FeatureScaler {
    RowVector mean;
    RowVector stddev;

    bool fitted() const { return mean.size() > 0; }

    void fit(const std::vector<Matrix>& feature_matrices) {
        if (feature_matrices.empty()) throw InvalidInputError("scaler fit on no graphs");
        const auto cols = feature_matrices.front().cols();
        mean = RowVector::Zero(cols);
        double rows = 0.0;
        for (const Matrix& m : feature_matrices) {
            mean += m.colwise().sum();
            rows += static_cast<double>(m.rows());
        }
        mean /= rows;
        RowVector var = RowVector::Zero(cols);
        for (const Matrix& m : feature_matrices)
            var += (m.rowwise() - mean).array().square().colwise().sum().matrix();
        var /= rows;
        stddev = var.array().sqrt().matrix();
        for (Eigen::Index j = 0; j < stddev.size(); ++j)
            if (stddev(j) < 1e-12) stddev(j) = 1.0;
    }

    Matrix apply(const Matrix& m) const {
        if (!fitted()) return m;
        return (m.rowwise() - mean).array().rowwise() / stddev.array();
    }
};

// A cascade graph ready for the encoders: sym-normalized adjacency with self
// loops, D^-1/2 (A+I) D^-1/2, plus the (standardized) node feature matrix.
struct PreparedGraph {
    SparseMatrix a_hat;
    Matrix features;  // n x kNodeFeatureCount
    int label = -1;
    std::string cascade_id;
};

inline Matrix raw_node_feature_matrix(const CascadeGraph& g, const ObservationWindow& window) {
    const NodeFeatureMatrix nf = node_features(g, window);
    Matrix m(static_cast<Eigen::Index>(nf.rows.size()), kNodeFeatureCount);
    for (std::size_t i = 0; i < nf.rows.size(); ++i) {
        m(static_cast<Eigen::Index>(i), 0) = nf.rows[i].degree;
        m(static_cast<Eigen::Index>(i), 1) = nf.rows[i].avg_sp_length;
        m(static_cast<Eigen::Index>(i), 2) = nf.rows[i].timestamp;
    }
    return m;
}

inline PreparedGraph prepare_graph(const CascadeGraph& g, const ObservationWindow& window,
                                   const FeatureScaler* scaler = nullptr) {
    PreparedGraph pg;
    pg.cascade_id = "";
    const auto n = static_cast<Eigen::Index>(g.nodes.size());

    std::unordered_map<NodeId, Eigen::Index> index_of;
    index_of.reserve(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        index_of.emplace(g.nodes[i], static_cast<Eigen::Index>(i));

    Eigen::VectorXd deg = Eigen::VectorXd::Ones(n);  // self-loop included
    for (const auto& [p, c] : g.edges) {
        deg(index_of.at(p)) += 1.0;
        deg(index_of.at(c)) += 1.0;
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(g.edges.size() * 2 + g.nodes.size());
    for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0 / deg(i));
    for (const auto& [p, c] : g.edges) {
        const Eigen::Index a = index_of.at(p);
        const Eigen::Index b = index_of.at(c);
        const double w = 1.0 / std::sqrt(deg(a) * deg(b));
        triplets.emplace_back(a, b, w);
        triplets.emplace_back(b, a, w);
    }
    pg.a_hat.resize(n, n);
    pg.a_hat.setFromTriplets(triplets.begin(), triplets.end());

    const Matrix raw = raw_node_feature_matrix(g, window);
    pg.features = scaler ? scaler->apply(raw) : raw;
    return pg;
}

inline Matrix glorot_uniform(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(-limit, limit);
    return m;
}

// Stack of graph convolutions H' = ReLU(A_hat H W) with mean-pool readout.
struct GraphConvNet {
    std::vector<Matrix> weights;

    static GraphConvNet make(const std::vector<Eigen::Index>& widths, Rng& rng) {
        GraphConvNet net;
        for (std::size_t l = 0; l + 1 < widths.size(); ++l)
            net.weights.push_back(glorot_uniform(widths[l], widths[l + 1], rng));
        return net;
    }

    Eigen::Index out_dim() const { return weights.back().cols(); }

    struct Cache {
        std::vector<Matrix> h;  // h[0] = input features, h[l] = post-ReLU layer l
    };

    RowVector forward(const PreparedGraph& g, Cache* cache = nullptr) const {
        Matrix h = g.features;
        if (cache) {
            cache->h.clear();
            cache->h.push_back(h);
        }
        for (const Matrix& w : weights) {
            h = ((g.a_hat * h) * w).cwiseMax(0.0);
            if (cache) cache->h.push_back(h);
        }
        return h.colwise().mean();
    }

    // Backprop from the pooled embedding gradient; accumulates into wgrads
    // (same shapes as weights).
    void backward(const PreparedGraph& g, const Cache& cache, const RowVector& dpooled,
                  std::vector<Matrix>& wgrads) const {
        const double n = static_cast<double>(g.features.rows());
        Matrix dh = Matrix::Zero(g.features.rows(), dpooled.size());
        dh.rowwise() += dpooled / n;
        for (std::size_t l = weights.size(); l-- > 0;) {
            const Matrix& post = cache.h[l + 1];
            const Matrix dz = (post.array() > 0.0).cast<double>() * dh.array();
            const Matrix ah = g.a_hat * cache.h[l];
            wgrads[l] += ah.transpose() * dz;
            if (l > 0) dh = g.a_hat * (dz * weights[l].transpose());
        }
    }

    std::vector<Matrix*> params() {
        std::vector<Matrix*> out;
        for (Matrix& w : weights) out.push_back(&w);
        return out;
    }
};

struct LinearLayer {
    Matrix w;  // in x out
    Matrix b;  // 1 x out

    static LinearLayer make(Eigen::Index in, Eigen::Index out, Rng& rng) {
        return LinearLayer{glorot_uniform(in, out, rng), Matrix::Zero(1, out)};
    }

    RowVector forward(const RowVector& x) const { return x * w + b.row(0); }

    RowVector backward(const RowVector& x, const RowVector& dout, Matrix& wgrad,
                       Matrix& bgrad) const {
        wgrad += x.transpose() * dout;
        bgrad.row(0) += dout;
        return dout * w.transpose();
    }
};

// Two-layer perceptron with ReLU in between (the projection head).
struct Mlp2 {
    LinearLayer l1, l2;

    static Mlp2 make(Eigen::Index in, Eigen::Index hidden, Eigen::Index out, Rng& rng) {
        return Mlp2{LinearLayer::make(in, hidden, rng), LinearLayer::make(hidden, out, rng)};
    }

    struct Cache {
        RowVector x, h;  // input, post-ReLU hidden
    };

    RowVector forward(const RowVector& x, Cache* cache = nullptr) const {
        const RowVector h = l1.forward(x).cwiseMax(0.0);
        if (cache) {
            cache->x = x;
            cache->h = h;
        }
        return l2.forward(h);
    }

    RowVector backward(const Cache& cache, const RowVector& dout, Matrix& w1g, Matrix& b1g,
                       Matrix& w2g, Matrix& b2g) const {
        const RowVector dh = l2.backward(cache.h, dout, w2g, b2g);
        const RowVector dpre =
            (cache.h.array() > 0.0).cast<double>() * dh.array();
        return l1.backward(cache.x, dpre, w1g, b1g);
    }
};

inline RowVector softmax(const RowVector& logits) {
    const double mx = logits.maxCoeff();
    RowVector e = (logits.array() - mx).exp();
    return e / e.sum();
}

// Returns the loss; dlogits receives probs - onehot(label).
inline double cross_entropy(const RowVector& logits, int label, RowVector& dlogits) {
    const RowVector p = softmax(logits);
    dlogits = p;
    dlogits(label) -= 1.0;
    return -std::log(std::max(p(label), 1e-300));
}

// KL(teacher || student) at temperature T; dstudent_logits gets the gradient
// of the plain KL (no T^2 factor — callers scale).
inline double kl_softened(const RowVector& teacher_logits, const RowVector& student_logits,
                          double temperature, RowVector& dstudent_logits) {
    const RowVector pt = softmax(teacher_logits / temperature);
    const RowVector ps = softmax(student_logits / temperature);
    double kl = 0.0;
    for (Eigen::Index k = 0; k < pt.size(); ++k)
        if (pt(k) > 0.0) kl += pt(k) * (std::log(pt(k)) - std::log(std::max(ps(k), 1e-300)));
    dstudent_logits = (ps - pt) / temperature;
    return kl;
}

struct Adam {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0;
    std::vector<Matrix> m, v;

    void init(const std::vector<Matrix*>& params) {
        m.clear();
        v.clear();
        for (const Matrix* p : params) {
            m.push_back(Matrix::Zero(p->rows(), p->cols()));
            v.push_back(Matrix::Zero(p->rows(), p->cols()));
        }
        t = 0;
    }

    void step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads) {
        ++t;
        const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
            v[i] = beta2 * v[i].array().matrix() +
                   (1.0 - beta2) * grads[i].array().square().matrix();
            const auto mhat = m[i].array() / bc1;
            const auto vhat = v[i].array() / bc2;
            params[i]->array() -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
};

inline std::vector<Matrix> zero_like(const std::vector<Matrix*>& params) {
    std::vector<Matrix> out;
    out.reserve(params.size());
    for (const Matrix* p : params) out.push_back(Matrix::Zero(p->rows(), p->cols()));
    return out;
}

// Mean cross-entropy of a conv-net + linear-head classifier over a batch;
// gradient layout is [conv weights..., head.w, head.b].
inline double classifier_batch_loss(const GraphConvNet& net, const LinearLayer& head,
                                    const std::vector<const PreparedGraph*>& batch,
                                    std::vector<Matrix>* grads_out) {
    const std::size_t conv_layers = net.weights.size();
    std::vector<Matrix> grads;
    if (grads_out) {
        for (const Matrix& w : net.weights) grads.push_back(Matrix::Zero(w.rows(), w.cols()));
        grads.push_back(Matrix::Zero(head.w.rows(), head.w.cols()));
        grads.push_back(Matrix::Zero(head.b.rows(), head.b.cols()));
    }
    double loss = 0.0;
    for (const PreparedGraph* g : batch) {
        GraphConvNet::Cache cache;
        const RowVector pooled = net.forward(*g, grads_out ? &cache : nullptr);
        const RowVector logits = head.forward(pooled);
        RowVector dlogits;
        loss += cross_entropy(logits, g->label, dlogits);
        if (grads_out) {
            const RowVector dpooled =
                head.backward(pooled, dlogits, grads[conv_layers], grads[conv_layers + 1]);
            net.backward(*g, cache, dpooled, grads);
        }
    }
    const double scale = 1.0 / static_cast<double>(batch.size());
    loss *= scale;
    if (grads_out) {
        for (Matrix& g : grads) g *= scale;
        *grads_out = std::move(grads);
    }
    return loss;
}

}  // namespace cascadelab
