#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cascadelab/gcn.hpp"
#include "cascadelab/nn.hpp"
#include "cascadelab/rng.hpp"

using namespace cascadelab;

namespace {

CascadeGraph random_tree(std::size_t n, Rng& rng) {
    CascadeGraph g;
    g.nodes.push_back(0);
    g.node_times.emplace(0, 0.0);
    for (std::size_t v = 1; v < n; ++v) {
        const auto parent = static_cast<NodeId>(rng.index(v));
        const auto node = static_cast<NodeId>(v);
        g.nodes.push_back(node);
        g.edges.emplace_back(parent, node);
        g.node_times.emplace(node, g.node_times.at(parent) + 1.0 + rng.index(3));
    }
    return g;
}

CascadeGraph path_graph(std::size_t n) {
    CascadeGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes.push_back(static_cast<NodeId>(i));
        g.node_times.emplace(static_cast<NodeId>(i), static_cast<double>(i));
        if (i > 0) g.edges.emplace_back(static_cast<NodeId>(i - 1), static_cast<NodeId>(i));
    }
    return g;
}

CascadeGraph star_graph(std::size_t n) {
    CascadeGraph g;
    g.nodes.push_back(0);
    g.node_times.emplace(0, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        g.nodes.push_back(static_cast<NodeId>(i));
        g.node_times.emplace(static_cast<NodeId>(i), 1.0);
        g.edges.emplace_back(0, static_cast<NodeId>(i));
    }
    return g;
}

GcnModel random_model(Eigen::Index in_dim, int n_classes, std::uint64_t seed) {
    Rng rng(seed);
    GcnModel model;
    model.net = GraphConvNet::make({in_dim, kGcnHiddenWidth, kGcnHiddenWidth, kGcnHiddenWidth},
                                   rng);
    model.head = LinearLayer::make(kGcnHiddenWidth, n_classes, rng);
    return model;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

TEST(PrepareGraph, SingleNodeIsIdentity) {
    CascadeGraph g;
    g.nodes.push_back(7);
    g.node_times.emplace(7, 0.0);
    const PreparedGraph pg = prepare_graph(g, ObservationWindow{});
    ASSERT_EQ(pg.a_hat.rows(), 1);
    EXPECT_DOUBLE_EQ(pg.a_hat.coeff(0, 0), 1.0);

    // so the conv stack collapses to plain ReLU(x W) chains
    GcnModel model = random_model(kNodeFeatureCount, 2, 3);
    RowVector h = pg.features.row(0);
    for (const Matrix& w : model.net.weights) h = (h * w).cwiseMax(0.0);
    const RowVector pooled = model.net.forward(pg);
    EXPECT_LE((pooled - h).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PrepareGraph, SymmetricNormalization) {
    Rng rng(3);
    const CascadeGraph g = random_tree(12, rng);
    const PreparedGraph pg = prepare_graph(g, ObservationWindow{});
    const Matrix dense = Matrix(pg.a_hat);
    EXPECT_NEAR((dense - dense.transpose()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    // entries must equal 1/sqrt(d_i d_j) with self-loop degrees
    std::vector<double> deg(g.nodes.size(), 1.0);
    for (const auto& [p, c] : g.edges) {
        deg[p] += 1.0;
        deg[c] += 1.0;
    }
    for (const auto& [p, c] : g.edges)
        EXPECT_NEAR(dense(p, c), 1.0 / std::sqrt(deg[p] * deg[c]), 1e-15);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        EXPECT_NEAR(dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)),
                    1.0 / deg[i], 1e-15);
}

TEST(Softmax, RowsSumToOne) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        RowVector logits(4);
        for (Eigen::Index i = 0; i < 4; ++i) logits(i) = rng.uniform(-10.0, 10.0);
        const RowVector p = softmax(logits);
        EXPECT_NEAR(p.sum(), 1.0, 1e-6);
        for (Eigen::Index i = 0; i < 4; ++i) EXPECT_GE(p(i), 0.0);
    }
}

TEST(Gcn, GradientMatchesFiniteDifferences) {
    for (int draw = 0; draw < 10; ++draw) {
        Rng data_rng(500 + draw);
        GcnModel model = random_model(kNodeFeatureCount, 3, 100 + draw);
        std::vector<PreparedGraph> graphs;
        for (int i = 0; i < 3; ++i) {
            CascadeGraph g = random_tree(4 + data_rng.index(5), data_rng);
            PreparedGraph pg = prepare_graph(g, ObservationWindow{});
            pg.label = static_cast<int>(data_rng.index(3));
            graphs.push_back(std::move(pg));
        }
        std::vector<const PreparedGraph*> batch;
        for (const auto& g : graphs) batch.push_back(&g);

        std::vector<Matrix> grads;
        detail::gcn_batch_loss(model, batch, &grads);

        const double eps = 1e-4;
        double max_err = 0.0;
        const auto params = model.params();
        for (std::size_t p = 0; p < params.size(); ++p) {
            for (Eigen::Index i = 0; i < params[p]->rows(); ++i) {
                for (Eigen::Index j = 0; j < params[p]->cols(); ++j) {
                    const double orig = (*params[p])(i, j);
                    (*params[p])(i, j) = orig + eps;
                    const double up = detail::gcn_batch_loss(model, batch, nullptr);
                    (*params[p])(i, j) = orig - eps;
                    const double down = detail::gcn_batch_loss(model, batch, nullptr);
                    (*params[p])(i, j) = orig;
                    const double numeric = (up - down) / (2.0 * eps);
                    max_err = std::max(max_err, relative_error(grads[p](i, j), numeric));
                }
            }
        }
        EXPECT_LE(max_err, 1e-3) << "draw " << draw;
    }
}

TEST(Gcn, PooledEmbeddingIsPermutationInvariant) {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const CascadeGraph g = random_tree(10, rng);
        CascadeGraph shuffled = g;
        // permute everything except the root (nodes[0] stays the root)
        std::vector<NodeId> tail(shuffled.nodes.begin() + 1, shuffled.nodes.end());
        rng.shuffle(tail);
        for (std::size_t i = 0; i < tail.size(); ++i) shuffled.nodes[i + 1] = tail[i];

        GcnModel model = random_model(kNodeFeatureCount, 2, 55);
        const RowVector a = model.net.forward(prepare_graph(g, ObservationWindow{}));
        const RowVector b = model.net.forward(prepare_graph(shuffled, ObservationWindow{}));
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(Gcn, LearnsPathVersusStar) {
    Rng rng(23);
    std::vector<CascadeGraph> graphs;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        const std::size_t n = 8 + rng.index(10);
        graphs.push_back(i % 2 == 0 ? path_graph(n) : star_graph(n));
        labels.push_back(i % 2);
    }
    std::vector<Matrix> raws;
    for (const auto& g : graphs) raws.push_back(raw_node_feature_matrix(g, ObservationWindow{}));
    FeatureScaler scaler;
    scaler.fit(raws);

    std::vector<PreparedGraph> train, val;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        PreparedGraph pg = prepare_graph(graphs[i], ObservationWindow{}, &scaler);
        pg.label = labels[i];
        (i < 30 ? train : val).push_back(std::move(pg));
    }
    TrainSpec spec;
    spec.seed = 7;
    const GcnModel model = train_gcn(train, val, 2, spec, scaler);
    std::size_t correct = 0;
    for (const auto& g : val)
        if (predict_class(model, g) == g.label) ++correct;
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(val.size()), 0.9);
}

TEST(Gcn, DeterministicGivenSeed) {
    Rng rng(31);
    std::vector<PreparedGraph> train, val;
    for (int i = 0; i < 12; ++i) {
        PreparedGraph pg = prepare_graph(random_tree(6 + rng.index(4), rng),
                                         ObservationWindow{});
        pg.label = i % 2;
        (i < 8 ? train : val).push_back(std::move(pg));
    }
    TrainSpec spec;
    spec.seed = 77;
    spec.epochs = 4;
    FeatureScaler unfitted;
    const GcnModel a = train_gcn(train, val, 2, spec, unfitted);
    const GcnModel b = train_gcn(train, val, 2, spec, unfitted);
    for (std::size_t l = 0; l < a.net.weights.size(); ++l)
        EXPECT_EQ((a.net.weights[l] - b.net.weights[l]).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((a.head.w - b.head.w).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Gcn, DimensionMismatchRejected) {
    GcnModel model = random_model(kNodeFeatureCount, 2, 9);
    PreparedGraph pg;
    pg.a_hat.resize(2, 2);
    pg.a_hat.setIdentity();
    pg.features = Matrix::Zero(2, 5);  // wrong width
    EXPECT_THROW(predict_logits(model, pg), InvalidInputError);
}
