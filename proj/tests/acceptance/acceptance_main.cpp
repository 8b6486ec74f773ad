// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Criteria 6, 7, and 9 drive the
// real CLI end to end on the desk-scale configuration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cascadelab/cascade_io.hpp"
#include "cascadelab/contrastive.hpp"
#include "cascadelab/diffusion.hpp"
#include "cascadelab/features.hpp"
#include "cascadelab/gcn.hpp"
#include "cascadelab/harness.hpp"
#include "cascadelab/netgen.hpp"

namespace fs = std::filesystem;
using namespace cascadelab;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << name;
    if (!detail.empty()) std::cout << " — " << detail;
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) { return format_double(std::round(v * 1e6) / 1e6); }

// ---- shared helpers ----

CascadeGraph graph_from_edges(std::size_t n,
                              const std::vector<std::pair<NodeId, NodeId>>& edges) {
    CascadeGraph g;
    for (std::size_t i = 0; i < n; ++i) {
        g.nodes.push_back(static_cast<NodeId>(i));
        g.node_times.emplace(static_cast<NodeId>(i), static_cast<double>(i));
    }
    g.edges = edges;
    return g;
}

CascadeGraph random_connected_graph(std::size_t n, Rng& rng) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (std::size_t v = 1; v < n; ++v)
        edges.emplace_back(static_cast<NodeId>(rng.index(v)), static_cast<NodeId>(v));
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v) {
            const bool present =
                std::find(edges.begin(), edges.end(),
                          std::make_pair(static_cast<NodeId>(u), static_cast<NodeId>(v))) !=
                edges.end();
            if (!present && rng.bernoulli(0.25))
                edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
        }
    return graph_from_edges(n, edges);
}

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

Network star(NodeId n) {
    Network net;
    net.node_count = n;
    for (NodeId v = 1; v < n; ++v) net.edges.emplace_back(0, v);
    return net;
}

double relative_error(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// ---- criterion 1: feature oracle ----

void criterion_1() {
    const auto start = Clock::now();
    Rng rng(2024);
    double max_dev = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng.index(8);
        const CascadeGraph g = random_connected_graph(n, rng);

        // brute force: Floyd-Warshall distances + direct triangle counting
        const int inf = 1 << 20;
        std::vector<std::vector<int>> dist(n, std::vector<int>(n, inf));
        std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i) dist[i][i] = 0;
        for (const auto& [u, v] : g.edges) {
            adj[u][v] = adj[v][u] = true;
            dist[u][v] = dist[v][u] = 1;
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    dist[i][j] = std::min(dist[i][j], dist[i][k] + dist[k][j]);

        double apl = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) apl += dist[i][j];
        if (n > 1) apl /= static_cast<double>(n) * (n - 1.0) / 2.0;
        double clustering = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::size_t> nbrs;
            for (std::size_t j = 0; j < n; ++j)
                if (adj[i][j]) nbrs.push_back(j);
            if (nbrs.size() < 2) continue;
            int links = 0;
            for (std::size_t a = 0; a < nbrs.size(); ++a)
                for (std::size_t b = a + 1; b < nbrs.size(); ++b)
                    if (adj[nbrs[a]][nbrs[b]]) ++links;
            clustering +=
                2.0 * links / (static_cast<double>(nbrs.size()) * (nbrs.size() - 1.0));
        }
        clustering /= static_cast<double>(n);

        const FeatureVector f = graph_features(g);
        max_dev = std::max(max_dev, std::abs(f.avg_path_length - apl));
        max_dev = std::max(max_dev, std::abs(f.clustering_coefficient - clustering));
        max_dev = std::max(
            max_dev, std::abs(f.avg_degree - 2.0 * static_cast<double>(g.edges.size()) /
                                                 static_cast<double>(n)));

        const NodeFeatureMatrix m = node_features(g, ObservationWindow{});
        for (std::size_t i = 0; i < n; ++i) {
            double node_sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) node_sum += dist[i][j];
            const double expected = n > 1 ? node_sum / (static_cast<double>(n) - 1.0) : 0.0;
            max_dev = std::max(max_dev, std::abs(m.rows[i].avg_sp_length - expected));
        }
    }
    const double elapsed = seconds_since(start);
    report(1, "feature oracle equivalence on 500 random graphs",
           max_dev <= 1e-12 && elapsed < 10.0,
           "max deviation " + fmt(max_dev) + ", " + fmt(elapsed) + " s");
}

// ---- criterion 2: simulation edge cases ----

void criterion_2() {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;

    NetGenConfig ncfg;
    ncfg.model = NetModel::WS;
    ncfg.node_count = 100;
    ncfg.ws_k = 6;
    ncfg.ws_beta = 0.1;
    ncfg.seed = 5;
    const Network ws = generate_ws(ncfg);
    const auto adj = build_adjacency(ws);

    DiffusionConfig base;
    base.min_size = 0;
    base.max_size = 1000;

    {  // p = 0 -> singleton
        DiffusionConfig cfg = base;
        cfg.model = DiffusionModel::IC;
        cfg.ic_p = 0.0;
        ok &= simulate_ic(ws, cfg, 3).events.size() == 1;
        cfg.model = DiffusionModel::Profile;
        cfg.profile_q = 0.0;
        ok &= simulate_profile(ws, cfg, 3).events.size() == 1;
        cfg.model = DiffusionModel::LT;
        cfg.lt_threshold = 1.5;
        ok &= simulate_lt(ws, cfg, 3).events.size() == 1;
    }
    {  // p = 1 -> BFS with times equal to depth
        std::vector<double> depth(ws.node_count, -1.0);
        std::vector<NodeId> queue{7};
        depth[7] = 0.0;
        for (std::size_t i = 0; i < queue.size(); ++i)
            for (const NodeId v : adj[queue[i]])
                if (depth[v] < 0.0) {
                    depth[v] = depth[queue[i]] + 1.0;
                    queue.push_back(v);
                }
        DiffusionConfig cfg = base;
        cfg.model = DiffusionModel::IC;
        cfg.ic_p = 1.0;
        const Cascade c = simulate_ic(ws, cfg, 7);
        ok &= c.events.size() == queue.size();
        for (const Event& e : c.events) ok &= e.time == depth[e.node];
        cfg.model = DiffusionModel::Profile;
        cfg.profile_q = 1.0;
        const Cascade p = simulate_profile(ws, cfg, 7);
        for (const Event& e : p.events) ok &= e.time == depth[e.node];
    }
    {  // star-graph Monte Carlo means
        const Network s6 = star(6);
        double ic_total = 0.0, profile_total = 0.0;
        for (int i = 0; i < 10000; ++i) {
            DiffusionConfig cfg = base;
            cfg.seed = static_cast<std::uint64_t>(i);
            cfg.model = DiffusionModel::IC;
            cfg.ic_p = 0.5;
            ic_total += static_cast<double>(simulate_ic(s6, cfg, 0).events.size());
            cfg.model = DiffusionModel::Profile;
            cfg.profile_q = 0.3;
            profile_total += static_cast<double>(simulate_profile(s6, cfg, 0).events.size());
        }
        const double ic_mean = ic_total / 10000.0;
        const double profile_mean = profile_total / 10000.0;
        ok &= std::abs(ic_mean - 3.5) <= 0.1;
        ok &= std::abs(profile_mean - 2.5) <= 0.1;
        detail = "IC star mean " + fmt(ic_mean) + " (target 3.5), Profile star mean " +
                 fmt(profile_mean) + " (target 2.5)";
    }
    const double elapsed = seconds_since(start);
    ok &= elapsed < 30.0;
    report(2, "simulation edge cases and star-graph closed forms", ok,
           detail + ", " + fmt(elapsed) + " s");
}

// ---- criterion 3: structural invariants at scale ----

void criterion_3() {
    const auto start = Clock::now();
    std::size_t checked = 0;
    bool ok = true;
    const ObservationWindow window;
    for (const auto net_model : {NetModel::BA, NetModel::WS, NetModel::LFR}) {
        NetGenConfig ncfg;
        ncfg.model = net_model;
        ncfg.node_count = 1000;
        ncfg.seed = derive_seed(17, "acc3-net", static_cast<std::uint64_t>(net_model));
        const Network net = generate(ncfg);
        for (const auto diff_model :
             {DiffusionModel::IC, DiffusionModel::LT, DiffusionModel::Profile}) {
            DiffusionConfig dcfg;
            dcfg.model = diff_model;
            dcfg.seed = derive_seed(17, "acc3-data",
                                    static_cast<std::uint64_t>(net_model) * 3 +
                                        static_cast<std::uint64_t>(diff_model));
            const auto cascades = generate_dataset(net, dcfg, 1112);
            for (const Cascade& c : cascades) {
                try {
                    validate_cascade(c);
                    if (c.events.size() < 50 || c.events.size() > 500) ok = false;
                    validate_cascade_graph(build_graph(c, window));
                } catch (const std::exception&) {
                    ok = false;
                }
                ++checked;
            }
        }
    }
    const double elapsed = seconds_since(start);
    ok &= checked >= 10000;
    ok &= elapsed < 120.0;
    report(3, "structural invariants on 10,000 cascades across all nine combinations", ok,
           std::to_string(checked) + " cascades, " + fmt(elapsed) + " s");
}

// ---- criterion 4: metric correctness ----

void criterion_4() {
    bool ok = true;
    Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        const int k = 2 + static_cast<int>(rng.index(4));
        const std::size_t n = 5 + rng.index(60);
        std::vector<int> preds(n), truths(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = static_cast<int>(rng.index(k));
            truths[i] = static_cast<int>(rng.index(k));
        }
        std::vector<std::string> names;
        for (int c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
        const EvalReport r = macro_f1(preds, truths, names);
        double macro = 0.0;
        for (int c = 0; c < k; ++c) {
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (preds[i] == c && truths[i] == c) ++tp;
                if (preds[i] == c && truths[i] != c) ++fp;
                if (preds[i] != c && truths[i] == c) ++fn;
            }
            const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
            const double rec = tp + fn > 0 ? tp / (tp + fn) : 0.0;
            macro += (p + rec > 0) ? 2 * p * rec / (p + rec) : 0.0;
        }
        macro /= k;
        if (r.macro_f1 != macro) ok = false;
    }
    const EvalReport hand = macro_f1({0, 0, 0, 1}, {0, 0, 1, 1}, {"a", "b"});
    ok &= std::abs(hand.macro_f1 - 11.0 / 15.0) < 1e-15;
    report(4, "macro-F1 matches independent recomputation exactly", ok,
           "hand-worked case macro_f1 = " + fmt(hand.macro_f1) + " (11/15)");
}

// ---- criterion 5: gradient checks ----

void criterion_5() {
    bool ok = true;
    std::string detail;
    double worst = 0.0;

    // GCN loss vs central differences
    for (int draw = 0; draw < 10; ++draw) {
        Rng data_rng(500 + draw);
        Rng init(100 + draw);
        GcnModel model;
        model.net = GraphConvNet::make({kNodeFeatureCount, 18, 18, 18}, init);
        model.head = LinearLayer::make(18, 3, init);
        std::vector<PreparedGraph> graphs;
        for (int i = 0; i < 3; ++i) {
            PreparedGraph pg =
                prepare_graph(random_tree(4 + data_rng.index(5), data_rng), ObservationWindow{});
            pg.label = static_cast<int>(data_rng.index(3));
            graphs.push_back(std::move(pg));
        }
        std::vector<const PreparedGraph*> batch;
        for (const auto& g : graphs) batch.push_back(&g);
        std::vector<Matrix> grads;
        detail::gcn_batch_loss(model, batch, &grads);
        const auto params = model.params();
        const double eps = 1e-4;
        for (std::size_t p = 0; p < params.size(); ++p)
            for (Eigen::Index i = 0; i < params[p]->rows(); ++i)
                for (Eigen::Index j = 0; j < params[p]->cols(); ++j) {
                    const double orig = (*params[p])(i, j);
                    (*params[p])(i, j) = orig + eps;
                    const double up = detail::gcn_batch_loss(model, batch, nullptr);
                    (*params[p])(i, j) = orig - eps;
                    const double down = detail::gcn_batch_loss(model, batch, nullptr);
                    (*params[p])(i, j) = orig;
                    worst = std::max(worst,
                                     relative_error(grads[p](i, j), (up - down) / (2 * eps)));
                }
    }
    ok &= worst <= 1e-3;
    detail = "GCN max rel err " + fmt(worst);

    // NT-Xent gradient vs central differences
    double nt_worst = 0.0;
    for (int draw = 0; draw < 10; ++draw) {
        Rng rng(300 + draw);
        Matrix z(6, 5);
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            for (Eigen::Index j = 0; j < z.cols(); ++j) z(i, j) = rng.uniform(-2.0, 2.0);
        Matrix dz;
        nt_xent_loss(z, 0.5, &dz);
        const double eps = 1e-4;
        for (Eigen::Index i = 0; i < z.rows(); ++i)
            for (Eigen::Index j = 0; j < z.cols(); ++j) {
                const double orig = z(i, j);
                z(i, j) = orig + eps;
                const double up = nt_xent_loss(z, 0.5);
                z(i, j) = orig - eps;
                const double down = nt_xent_loss(z, 0.5);
                z(i, j) = orig;
                nt_worst =
                    std::max(nt_worst, relative_error(dz(i, j), (up - down) / (2 * eps)));
            }
    }
    ok &= nt_worst <= 1e-3;
    detail += ", NT-Xent max rel err " + fmt(nt_worst);

    // analytic NT-Xent values
    {
        Matrix z(4, 4);
        z.setZero();
        z(0, 0) = z(1, 0) = 1.0;
        z(2, 1) = z(3, 1) = 1.0;
        const double orthogonal = nt_xent_loss(z, 0.5);
        const double expected = -std::log(std::exp(2.0) / (std::exp(2.0) + 2.0));
        ok &= std::abs(orthogonal - 0.2395) <= 1e-4;
        ok &= std::abs(orthogonal - expected) <= 1e-12;

        for (const int pairs : {2, 5}) {
            Matrix same(2 * pairs, 3);
            for (Eigen::Index i = 0; i < same.rows(); ++i) same.row(i) << 1.0, -0.5, 2.0;
            ok &= std::abs(nt_xent_loss(same, 0.5) - std::log(2.0 * pairs - 1.0)) <= 1e-12;
        }
        detail += ", orthogonal-pairs loss " + fmt(orthogonal);
    }
    report(5, "gradient checks and analytic contrastive losses", ok, detail);
}

// ---- criteria 6, 7, 9: desk-scale tables via the CLI ----

struct SummaryTable {
    std::map<std::string, double> f1;  // key "task/group/algo"
    std::string bytes;
};

std::optional<SummaryTable> read_summary(const fs::path& path) {
    if (!fs::exists(path)) return std::nullopt;
    SummaryTable table;
    table.bytes = read_file(path);
    std::size_t pos = table.bytes.find('\n');  // skip header
    while (pos != std::string::npos && pos + 1 < table.bytes.size()) {
        const std::size_t eol = table.bytes.find('\n', pos + 1);
        const std::string line =
            table.bytes.substr(pos + 1, (eol == std::string::npos ? table.bytes.size() : eol) -
                                            pos - 1);
        pos = eol;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t cpos = 0;
        while (cpos <= line.size()) {
            std::size_t comma = line.find(',', cpos);
            if (comma == std::string::npos) comma = line.size();
            cells.push_back(line.substr(cpos, comma - cpos));
            cpos = comma + 1;
        }
        if (cells.size() != 4) continue;
        double v = 0;
        parse_double(cells[3], v);
        table.f1[cells[0] + "/" + cells[1] + "/" + cells[2]] = v;
    }
    return table;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(CASCADELAB_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criteria_6_7_9(const fs::path& work) {
    const fs::path run1 = work / "tables_run1";
    const fs::path run2 = work / "tables_run2";

    const auto start1 = Clock::now();
    const int rc1 = run_cli("experiment tables --config " + std::string(CASCADELAB_DESK_CFG) +
                            " --out " + run1.string() + " --threads 1 2>> " +
                            (work / "cli.log").string());
    const double elapsed1 = seconds_since(start1);
    const auto summary1 = read_summary(run1 / "summary.csv");

    if (rc1 != 0 || !summary1) {
        report(6, "desk-scale diffusion-classification table", false,
               "tables run failed (exit " + std::to_string(rc1) + ")");
        report(7, "network-model task harder than diffusion-model task", false,
               "tables run failed");
        report(9, "byte-identical reproduction of summary.csv", false, "tables run failed");
        return;
    }

    {
        bool ok = true;
        std::string detail;
        const double ws_rf = summary1->f1.at("diffusion_model/ws/random_forest");
        const double ws_cc = summary1->f1.at("diffusion_model/ws/contrastive");
        ok &= ws_rf >= 0.80;
        ok &= ws_cc >= 0.80;
        detail = "WS group RF " + fmt(ws_rf) + " / contrastive " + fmt(ws_cc) +
                 " (thresholds 0.80)";
        double min_any = 1.0;
        for (const auto& group : {"ba", "ws", "lfr"})
            for (const auto& algo : {"random_forest", "gbt", "gcn", "contrastive"}) {
                const double v =
                    summary1->f1.at(std::string("diffusion_model/") + group + "/" + algo);
                min_any = std::min(min_any, v);
            }
        ok &= min_any >= 0.33 + 0.2;
        detail += ", min over groups/algos " + fmt(min_any) + " (threshold 0.53)";
        ok &= elapsed1 < 1800.0;
        detail += ", runtime " + fmt(elapsed1) + " s";
        report(6, "desk-scale diffusion-classification table", ok, detail);
    }
    {
        double diffusion_avg = 0.0, network_avg = 0.0;
        int n_diff = 0, n_net = 0;
        for (const auto& [key, v] : summary1->f1) {
            if (key.rfind("diffusion_model/", 0) == 0) {
                diffusion_avg += v;
                ++n_diff;
            } else if (key.rfind("network_model/", 0) == 0) {
                network_avg += v;
                ++n_net;
            }
        }
        diffusion_avg /= std::max(1, n_diff);
        network_avg /= std::max(1, n_net);
        const bool ok = n_diff == 12 && n_net == 12 && network_avg < diffusion_avg;
        report(7, "network-model task harder than diffusion-model task", ok,
               "diffusion avg " + fmt(diffusion_avg) + " vs network avg " + fmt(network_avg));
    }
    {
        const int rc2 = run_cli("experiment tables --config " +
                                std::string(CASCADELAB_DESK_CFG) + " --out " + run2.string() +
                                " --threads 1 2>> " + (work / "cli.log").string());
        const auto summary2 = read_summary(run2 / "summary.csv");
        const bool ok = rc2 == 0 && summary2 && summary2->bytes == summary1->bytes;
        report(9, "byte-identical reproduction of summary.csv", ok,
               ok ? "two runs, identical bytes" : "summaries differ");
    }
}

// ---- criterion 8: label-fraction behaviour ----

void criterion_8(const fs::path& work) {
    const fs::path out = work / "label_fraction";
    const int rc = run_cli("experiment label-fraction --config " +
                           std::string(CASCADELAB_DESK_CFG) + " --out " + out.string() +
                           " --threads 1 2>> " + (work / "cli.log").string());
    if (rc != 0 || !fs::exists(out / "label_fraction_rows.json")) {
        report(8, "label-fraction table and stability", false,
               "label-fraction run failed (exit " + std::to_string(rc) + ")");
        return;
    }
    const auto rows = nlohmann::json::parse(read_file(out / "label_fraction_rows.json"));
    std::map<double, std::vector<double>> by_fraction;  // self_only rows
    for (const auto& row : rows)
        if (row["pretrain_source"] == "self_only")
            by_fraction[row["fraction"].get<double>()].push_back(
                row["macro_f1"].get<double>());

    bool table_complete = true;
    for (const double f : {0.1, 0.2, 0.5, 1.0})
        if (by_fraction[f].size() != 3) table_complete = false;

    auto mean_of = [&](double f) {
        const auto& v = by_fraction[f];
        double total = 0.0;
        for (const double x : v) total += x;
        return v.empty() ? 0.0 : total / static_cast<double>(v.size());
    };
    const double f10 = mean_of(0.1), f20 = mean_of(0.2), f100 = mean_of(1.0);
    const bool stable_at_20 = f20 >= f100 - 0.10;
    const bool decline_at_10 = f10 < f20;

    const bool ok = table_complete && stable_at_20;
    std::string detail = "means over 3 seeds: 10% " + fmt(f10) + ", 20% " + fmt(f20) +
                         ", 100% " + fmt(f100);
    if (!decline_at_10)
        detail += " [flag: the 10% decline did not reproduce at desk scale]";
    report(8, "label-fraction table and stability", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    std::optional<int> only;
    if (argc > 1) only = std::atoi(argv[1]);

    const fs::path work = fs::current_path() / "acceptance_artifacts";
    fs::create_directories(work);

    auto wants = [&](int id) { return !only || *only == id; };
    auto guarded = [&](int id, const std::string& name, auto&& fn) {
        if (!wants(id)) return;
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, name, false, std::string("exception: ") + e.what());
        }
    };

    guarded(1, "feature oracle equivalence", [&] { criterion_1(); });
    guarded(2, "simulation edge cases", [&] { criterion_2(); });
    guarded(3, "structural invariants", [&] { criterion_3(); });
    guarded(4, "metric correctness", [&] { criterion_4(); });
    guarded(5, "gradient checks", [&] { criterion_5(); });
    if (wants(6) || wants(7) || wants(9)) {
        try {
            criteria_6_7_9(work);
        } catch (const std::exception& e) {
            report(6, "desk-scale tables", false, std::string("exception: ") + e.what());
            report(7, "task difficulty ordering", false, "see criterion 6");
            report(9, "reproducibility", false, "see criterion 6");
        }
    }
    guarded(8, "label-fraction behaviour", [&] { criterion_8(work); });

    std::cout << (g_failures == 0 ? "ACCEPTANCE: all criteria passed"
                                  : "ACCEPTANCE: " + std::to_string(g_failures) +
                                        " criterion(s) failed")
              << std::endl;
    return g_failures == 0 ? 0 : 1;
}
