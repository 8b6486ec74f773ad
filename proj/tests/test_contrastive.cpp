#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cascadelab/contrastive.hpp"
#include "cascadelab/diffusion.hpp"
#include "cascadelab/netgen.hpp"
#include "cascadelab/nn.hpp"

using namespace cascadelab;

namespace {

CascadeGraph random_tree(std::size_t n, Rng& rng) {
    CascadeGraph g;
    g.nodes.push_back(0);
    g.node_times.emplace(0, 0.0);
    for (std::size_t v = 1; v < n; ++v) {
        const auto parent = static_cast<NodeId>(rng.index(v));
        g.nodes.push_back(static_cast<NodeId>(v));
        g.edges.emplace_back(parent, static_cast<NodeId>(v));
        g.node_times.emplace(static_cast<NodeId>(v),
                             g.node_times.at(parent) + 1.0 + rng.index(3));
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

CascadeGraph path_graph(std::size_t n) {
    CascadeGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes.push_back(static_cast<NodeId>(i));
        g.node_times.emplace(static_cast<NodeId>(i), static_cast<double>(i));
        if (i > 0) g.edges.emplace_back(static_cast<NodeId>(i - 1), static_cast<NodeId>(i));
    }
    return g;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

ContrastiveSpec small_spec(std::uint64_t seed) {
    ContrastiveSpec spec;
    spec.seed = seed;
    spec.batch_size = 8;
    spec.pretrain_epochs = 3;
    spec.finetune_epochs = 8;
    spec.distill_epochs = 5;
    spec.encoder_width = 16;
    spec.projection_hidden = 16;
    spec.projection_dim = 8;
    return spec;
}

}  // namespace

TEST(Augment, IdentityConfigIsStructurallyIdentity) {
    Rng rng(3);
    const CascadeGraph g = random_tree(15, rng);
    AugmentConfig cfg;
    cfg.leaf_drop_rate = 0.0;
    cfg.node_add_rate = 0.0;
    cfg.time_jitter = 0.0;
    const CascadeGraph out = augment(g, cfg);
    // same node set, edge set, and times; node order may be re-sorted by time
    auto sorted_nodes = [](const CascadeGraph& cg) {
        auto v = cg.nodes;
        std::sort(v.begin(), v.end());
        return v;
    };
    auto sorted_edges = [](const CascadeGraph& cg) {
        auto v = cg.edges;
        std::sort(v.begin(), v.end());
        return v;
    };
    EXPECT_EQ(sorted_nodes(out), sorted_nodes(g));
    EXPECT_EQ(sorted_edges(out), sorted_edges(g));
    EXPECT_EQ(out.root(), g.root());
    for (const NodeId n : g.nodes)
        EXPECT_DOUBLE_EQ(out.node_times.at(n), g.node_times.at(n));
}

TEST(Augment, DropAllLeavesOnStarLeavesRoot) {
    const CascadeGraph g = star_graph(5);
    AugmentConfig cfg;
    cfg.leaf_drop_rate = 1.0;
    cfg.node_add_rate = 0.0;
    cfg.time_jitter = 0.0;
    const CascadeGraph out = augment(g, cfg);
    ASSERT_EQ(out.node_count(), 1u);
    EXPECT_EQ(out.nodes[0], 0u);
    EXPECT_TRUE(out.edges.empty());
}

TEST(Augment, SingleNodeGraphMayGrow) {
    CascadeGraph g;
    g.nodes.push_back(0);
    g.node_times.emplace(0, 0.0);
    AugmentConfig cfg;
    cfg.node_add_rate = 1.0;
    const CascadeGraph out = augment(g, cfg);
    EXPECT_GE(out.node_count(), 1u);
    validate_cascade_graph(out);
}

TEST(Augment, PreservesInvariantsOnRandomCascades) {
    Rng rng(77);
    AugmentConfig cfg;
    cfg.seed = 5;
    Rng aug_rng(cfg.seed);
    for (int trial = 0; trial < 1000; ++trial) {
        const CascadeGraph g = random_tree(1 + rng.index(40), rng);
        const CascadeGraph out = augment(g, cfg, aug_rng);
        validate_cascade_graph(out);
        EXPECT_EQ(out.nodes[0], g.root());
    }
}

TEST(NtXent, OrthogonalPairsAnalyticValue) {
    Matrix z(4, 4);
    z.setZero();
    z(0, 0) = 1.0;
    z(1, 0) = 1.0;  // pair A on e1
    z(2, 1) = 1.0;
    z(3, 1) = 1.0;  // pair B on e2
    const double loss = nt_xent_loss(z, 0.5);
    const double expected = -std::log(std::exp(2.0) / (std::exp(2.0) + 2.0));
    EXPECT_NEAR(loss, expected, 1e-12);
    EXPECT_NEAR(loss, 0.2395, 1e-4);
}

TEST(NtXent, IdenticalEmbeddingsGiveLogTwoNMinusOne) {
    for (const int pairs : {2, 3, 8}) {
        Matrix z(2 * pairs, 5);
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            z.row(i) << 0.3, -1.2, 0.5, 2.0, 0.1;
        EXPECT_NEAR(nt_xent_loss(z, 0.5), std::log(2.0 * pairs - 1.0), 1e-12);
    }
}

TEST(NtXent, InvariantToPositiveRescaling) {
    Rng rng(9);
    Matrix z(6, 8);
    for (Eigen::Index i = 0; i < z.rows(); ++i)
        for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.uniform(-1.0, 1.0);
    const double base = nt_xent_loss(z, 0.5);
    Matrix scaled = z;
    scaled.row(0) *= 17.0;
    scaled.row(3) *= 0.021;
    EXPECT_NEAR(nt_xent_loss(scaled, 0.5), base, 1e-10);
}

TEST(NtXent, RejectsDegenerateInputs) {
    Matrix too_small(2, 4);
    too_small.setOnes();
    EXPECT_THROW(nt_xent_loss(too_small, 0.5), InvalidInputError);
    Matrix with_zero(4, 4);
    with_zero.setOnes();
    with_zero.row(2).setZero();
    EXPECT_THROW(nt_xent_loss(with_zero, 0.5), InvalidInputError);
}

TEST(NtXent, GradientMatchesFiniteDifferences) {
    for (int draw = 0; draw < 10; ++draw) {
        Rng rng(300 + draw);
        Matrix z(6, 5);
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.uniform(-2.0, 2.0);
        Matrix dz;
        nt_xent_loss(z, 0.5, &dz);
        const double eps = 1e-4;
        double max_err = 0.0;
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            for (Eigen::Index j = 0; j < z.cols(); ++j) {
                const double orig = z(i, j);
                z(i, j) = orig + eps;
                const double up = nt_xent_loss(z, 0.5);
                z(i, j) = orig - eps;
                const double down = nt_xent_loss(z, 0.5);
                z(i, j) = orig;
                max_err = std::max(max_err, relative_error(dz(i, j), (up - down) / (2 * eps)));
            }
        }
        EXPECT_LE(max_err, 1e-3) << "draw " << draw;
    }
}

// Finite-difference check through the whole encoder + projection pipeline.
TEST(NtXent, EncoderGradientMatchesFiniteDifferences) {
    Rng data_rng(41);
    for (int draw = 0; draw < 5; ++draw) {
        Rng init(700 + draw);
        EncoderModel enc;
        enc.net = GraphConvNet::make({kNodeFeatureCount, 8, 8}, init);
        enc.projection = Mlp2::make(8, 8, 6, init);

        std::vector<PreparedGraph> views;
        for (int i = 0; i < 4; ++i)
            views.push_back(
                prepare_graph(random_tree(3 + data_rng.index(4), data_rng), ObservationWindow{}));

        const auto params = enc.params();
        const std::size_t conv_layers = enc.net.weights.size();
        auto loss_of = [&]() {
            Matrix z(4, 6);
            for (int i = 0; i < 4; ++i)
                z.row(i) = enc.projection.forward(enc.net.forward(views[i]));
            return nt_xent_loss(z, 0.5);
        };
        // analytic
        std::vector<detail::ViewCache> caches(4);
        Matrix z(4, 6);
        for (int i = 0; i < 4; ++i) {
            caches[i].graph = views[i];
            caches[i].pooled = enc.net.forward(views[i], &caches[i].net_cache);
            z.row(i) = enc.projection.forward(caches[i].pooled, &caches[i].proj_cache);
        }
        Matrix dz;
        nt_xent_loss(z, 0.5, &dz);
        std::vector<Matrix> grads = zero_like(params);
        for (int i = 0; i < 4; ++i) {
            const RowVector dpooled = enc.projection.backward(
                caches[i].proj_cache, dz.row(i), grads[conv_layers], grads[conv_layers + 1],
                grads[conv_layers + 2], grads[conv_layers + 3]);
            enc.net.backward(views[i], caches[i].net_cache, dpooled, grads);
        }

        const double eps = 1e-4;
        double max_err = 0.0;
        for (std::size_t p = 0; p < params.size(); ++p) {
            for (Eigen::Index i = 0; i < params[p]->rows(); ++i) {
                for (Eigen::Index j = 0; j < params[p]->cols(); ++j) {
                    const double orig = (*params[p])(i, j);
                    (*params[p])(i, j) = orig + eps;
                    const double up = loss_of();
                    (*params[p])(i, j) = orig - eps;
                    const double down = loss_of();
                    (*params[p])(i, j) = orig;
                    max_err = std::max(
                        max_err, relative_error(grads[p](i, j), (up - down) / (2 * eps)));
                }
            }
        }
        EXPECT_LE(max_err, 1e-3) << "draw " << draw;
    }
}

TEST(Pretrain, LossDecreasesAcrossSeeds) {
    Rng rng(55);
    std::vector<CascadeGraph> pool;
    for (int i = 0; i < 24; ++i) pool.push_back(random_tree(5 + rng.index(15), rng));

    double initial_sum = 0.0, final_sum = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        ContrastiveSpec spec = small_spec(seed);
        AugmentConfig aug;
        aug.seed = seed;
        const PretrainResult r = pretrain(pool, spec, aug);
        initial_sum += r.initial_loss;
        final_sum += r.epoch_losses.back();
    }
    EXPECT_LT(final_sum / 5.0, initial_sum / 5.0);
}

TEST(Pretrain, IdenticalGraphsIdentityAugHitLowerBound) {
    std::vector<CascadeGraph> pool(8, star_graph(6));
    ContrastiveSpec spec = small_spec(3);
    spec.batch_size = 8;
    spec.pretrain_epochs = 2;
    AugmentConfig aug;
    aug.leaf_drop_rate = 0.0;
    aug.node_add_rate = 0.0;
    aug.time_jitter = 0.0;
    const PretrainResult r = pretrain(pool, spec, aug);
    const double bound = std::log(2.0 * 8.0 - 1.0);
    EXPECT_NEAR(r.initial_loss, bound, 1e-9);
    for (const double l : r.epoch_losses) EXPECT_NEAR(l, bound, 1e-9);
}

TEST(Pretrain, DeterministicGivenSeed) {
    Rng rng(66);
    std::vector<CascadeGraph> pool;
    for (int i = 0; i < 16; ++i) pool.push_back(random_tree(4 + rng.index(8), rng));
    ContrastiveSpec spec = small_spec(12);
    spec.pretrain_epochs = 2;
    AugmentConfig aug;
    const PretrainResult a = pretrain(pool, spec, aug);
    const PretrainResult b = pretrain(pool, spec, aug);
    for (std::size_t l = 0; l < a.encoder.net.weights.size(); ++l)
        EXPECT_EQ((a.encoder.net.weights[l] - b.encoder.net.weights[l]).cwiseAbs().maxCoeff(),
                  0.0);
    EXPECT_EQ(a.epoch_losses, b.epoch_losses);
}

TEST(Pretrain, PoolSmallerThanBatchRejected) {
    std::vector<CascadeGraph> pool(4, star_graph(4));
    ContrastiveSpec spec = small_spec(1);
    spec.batch_size = 64;
    EXPECT_THROW(pretrain(pool, spec, AugmentConfig{}), InvalidInputError);
}

TEST(Finetune, LearnsSeparableClassesAndSelectsBestEpoch) {
    Rng rng(88);
    std::vector<CascadeGraph> train_graphs, val_graphs;
    std::vector<int> train_labels, val_labels;
    for (int i = 0; i < 32; ++i) {
        const std::size_t n = 8 + rng.index(8);
        train_graphs.push_back(i % 2 == 0 ? path_graph(n) : star_graph(n));
        train_labels.push_back(i % 2);
    }
    for (int i = 0; i < 12; ++i) {
        const std::size_t n = 8 + rng.index(8);
        val_graphs.push_back(i % 2 == 0 ? path_graph(n) : star_graph(n));
        val_labels.push_back(i % 2);
    }
    std::vector<CascadeGraph> pool = train_graphs;
    ContrastiveSpec spec = small_spec(5);
    const PretrainResult pre = pretrain(pool, spec, AugmentConfig{});
    const FinetuneResult fin = finetune(pre.encoder, train_graphs, train_labels, val_graphs,
                                        val_labels, 2, spec);
    ASSERT_FALSE(fin.val_f1_history.empty());
    double best = -1.0;
    for (const double f : fin.val_f1_history) best = std::max(best, f);
    EXPECT_GE(best, fin.val_f1_history.front());
    EXPECT_GE(best, 0.9);

    const PreparedGraph probe =
        prepare_graph(star_graph(10), ObservationWindow{}, &fin.model.scaler);
    const auto probs = predict_proba(fin.model, probe);
    double sum = 0.0;
    for (const double p : probs) sum += p;
    EXPECT_NEAR(sum, 1.0, 1e-6);
}

// Perceptron oracle: returns training accuracy of a linear separator fit on
// (embedding, label) pairs.
namespace {
double perceptron_accuracy(const std::vector<RowVector>& embeddings,
                           const std::vector<int>& labels, int epochs) {
    RowVector w = RowVector::Zero(embeddings.front().size());
    double b = 0.0;
    for (int e = 0; e < epochs; ++e)
        for (std::size_t i = 0; i < embeddings.size(); ++i) {
            const double y = labels[i] == 1 ? 1.0 : -1.0;
            if (y * (embeddings[i].dot(w) + b) <= 0.0) {
                w += y * embeddings[i];
                b += y;
            }
        }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < embeddings.size(); ++i) {
        const int pred = (embeddings[i].dot(w) + b) > 0.0 ? 1 : 0;
        if (pred == labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(embeddings.size());
}
}  // namespace

TEST(Finetune, SeparableEmbeddingsReachHighTrainingAccuracy) {
    // random frozen encoder; oracle first confirms its embeddings of
    // path-vs-star graphs are linearly separable
    Rng rng(121);
    EncoderModel enc;
    enc.net = GraphConvNet::make({kNodeFeatureCount, 16, 16}, rng);
    enc.projection = Mlp2::make(16, 16, 8, rng);

    std::vector<CascadeGraph> graphs;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        const std::size_t n = 8 + rng.index(8);
        graphs.push_back(i % 2 == 0 ? path_graph(n) : star_graph(n));
        labels.push_back(i % 2);
    }
    std::vector<RowVector> embeddings;
    for (const auto& g : graphs)
        embeddings.push_back(enc.net.forward(prepare_graph(g, ObservationWindow{})));
    ASSERT_GE(perceptron_accuracy(embeddings, labels, 200), 0.99);

    ContrastiveSpec spec = small_spec(6);
    spec.finetune_epochs = 15;
    const FinetuneResult fin =
        finetune(enc, graphs, labels, graphs, labels, 2, spec);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const auto pg = prepare_graph(graphs[i], ObservationWindow{}, &fin.model.scaler);
        if (predict_class(fin.model, pg) == labels[i]) ++correct;
    }
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(graphs.size()), 0.99);
}

TEST(Finetune, SingleClassIsDegenerate) {
    std::vector<CascadeGraph> graphs(6, star_graph(5));
    std::vector<int> labels(6, 0);
    ContrastiveSpec spec = small_spec(2);
    EncoderModel enc;
    Rng rng(4);
    enc.net = GraphConvNet::make({kNodeFeatureCount, 16, 16}, rng);
    enc.projection = Mlp2::make(16, 16, 8, rng);
    EXPECT_THROW(finetune(enc, graphs, labels, graphs, labels, 2, spec),
                 DegenerateModelError);
}

TEST(Distill, StudentEqualToTeacherHasZeroInitialKl) {
    Rng rng(14);
    ContrastiveClassifier teacher;
    teacher.net = GraphConvNet::make({kNodeFeatureCount, 8, 8}, rng);
    teacher.head = LinearLayer::make(8, 3, rng);
    ContrastiveClassifier student = teacher;

    const PreparedGraph g = prepare_graph(star_graph(6), ObservationWindow{});
    const RowVector tl = predict_logits(teacher, g);
    const RowVector sl = predict_logits(student, g);
    RowVector dkl;
    EXPECT_NEAR(kl_softened(tl, sl, 2.0, dkl), 0.0, 1e-12);
    EXPECT_NEAR(dkl.cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Distill, AlphaOneNoUnlabeledReducesToPlainCrossEntropy) {
    Rng rng(15);
    ContrastiveClassifier teacher;
    teacher.net = GraphConvNet::make({kNodeFeatureCount, 8, 8}, rng);
    teacher.head = LinearLayer::make(8, 2, rng);
    ContrastiveClassifier student;
    student.net = GraphConvNet::make({kNodeFeatureCount, 8, 8}, rng);
    student.head = LinearLayer::make(8, 2, rng);

    std::vector<PreparedGraph> graphs;
    Rng data_rng(16);
    for (int i = 0; i < 4; ++i) {
        PreparedGraph pg = prepare_graph(random_tree(5, data_rng), ObservationWindow{});
        pg.label = i % 2;
        graphs.push_back(std::move(pg));
    }
    std::vector<detail::DistillItem> batch;
    std::vector<const PreparedGraph*> plain_batch;
    for (const auto& g : graphs) {
        batch.push_back({&g, true});
        plain_batch.push_back(&g);
    }
    const double distill_loss =
        detail::distill_batch_loss(teacher, student, batch, 1.0, 2.0, nullptr);
    const double ce_loss = classifier_batch_loss(student.net, student.head, plain_batch, nullptr);
    EXPECT_NEAR(distill_loss, ce_loss, 1e-12);
}

TEST(Distill, SoftenedProbabilitiesSumToOne) {
    Rng rng(17);
    RowVector logits(4);
    for (Eigen::Index i = 0; i < 4; ++i) logits(i) = rng.uniform(-3.0, 3.0);
    const RowVector soft = softmax(logits / 2.0);
    EXPECT_NEAR(soft.sum(), 1.0, 1e-6);
}

TEST(Distill, GradientMatchesFiniteDifferences) {
    for (int draw = 0; draw < 5; ++draw) {
        Rng data_rng(1300 + draw);
        Rng init(900 + draw);
        ContrastiveClassifier teacher;
        teacher.net = GraphConvNet::make({kNodeFeatureCount, 8, 8}, init);
        teacher.head = LinearLayer::make(8, 3, init);
        ContrastiveClassifier student;
        student.net = GraphConvNet::make({kNodeFeatureCount, 8, 8}, init);
        student.head = LinearLayer::make(8, 3, init);

        std::vector<PreparedGraph> graphs;
        for (int i = 0; i < 3; ++i) {
            PreparedGraph pg =
                prepare_graph(random_tree(4 + data_rng.index(3), data_rng), ObservationWindow{});
            pg.label = static_cast<int>(data_rng.index(3));
            graphs.push_back(std::move(pg));
        }
        std::vector<detail::DistillItem> batch{{&graphs[0], true},
                                               {&graphs[1], true},
                                               {&graphs[2], false}};
        std::vector<Matrix> grads;
        detail::distill_batch_loss(teacher, student, batch, 0.5, 2.0, &grads);

        const auto params = student.params();
        const double eps = 1e-4;
        double max_err = 0.0;
        for (std::size_t p = 0; p < params.size(); ++p) {
            for (Eigen::Index i = 0; i < params[p]->rows(); ++i) {
                for (Eigen::Index j = 0; j < params[p]->cols(); ++j) {
                    const double orig = (*params[p])(i, j);
                    (*params[p])(i, j) = orig + eps;
                    const double up =
                        detail::distill_batch_loss(teacher, student, batch, 0.5, 2.0, nullptr);
                    (*params[p])(i, j) = orig - eps;
                    const double down =
                        detail::distill_batch_loss(teacher, student, batch, 0.5, 2.0, nullptr);
                    (*params[p])(i, j) = orig;
                    max_err = std::max(
                        max_err, relative_error(grads[p](i, j), (up - down) / (2 * eps)));
                }
            }
        }
        EXPECT_LE(max_err, 1e-3) << "draw " << draw;
    }
}

TEST(Encoder, PooledEmbeddingPermutationInvariant) {
    Rng rng(25);
    EncoderModel enc;
    enc.net = GraphConvNet::make({kNodeFeatureCount, 64, 64}, rng);
    enc.projection = Mlp2::make(64, 64, 32, rng);
    for (int trial = 0; trial < 5; ++trial) {
        const CascadeGraph g = random_tree(12, rng);
        CascadeGraph shuffled = g;
        std::vector<NodeId> tail(shuffled.nodes.begin() + 1, shuffled.nodes.end());
        rng.shuffle(tail);
        for (std::size_t i = 0; i < tail.size(); ++i) shuffled.nodes[i + 1] = tail[i];
        const RowVector a = enc.net.forward(prepare_graph(g, ObservationWindow{}));
        const RowVector b = enc.net.forward(prepare_graph(shuffled, ObservationWindow{}));
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9);
    }
}
