// features.hpp — graph-level features for tree models and per-node features
// for the graph encoders, computed on the undirected view of a cascade graph.
#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cascadelab/cascade.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/io_util.hpp"

namespace cascadelab {

struct FeatureVector {
    double avg_degree = 0.0;
    double avg_path_length = 0.0;
    double link_density = 0.0;
    double clustering_coefficient = 0.0;

    std::vector<double> as_row() const {
        return {avg_degree, avg_path_length, link_density, clustering_coefficient};
    }
};

inline constexpr std::size_t kGraphFeatureCount = 4;

struct NodeFeatureRow {
    double degree = 0.0;
    double avg_sp_length = 0.0;
    double timestamp = 0.0;  // activation time / window bound, in [0, 1]
};

struct NodeFeatureMatrix {
    std::vector<NodeId> nodes;  // same order as CascadeGraph::nodes
    std::vector<NodeFeatureRow> rows;
};

inline constexpr std::size_t kNodeFeatureCount = 3;

namespace detail {

struct DenseGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::uint32_t>> adj;  // dense indices
    std::unordered_map<NodeId, std::uint32_t> index_of;
};

inline DenseGraph dense_undirected_view(const CascadeGraph& g) {
    DenseGraph d;
    d.n = g.nodes.size();
    d.adj.resize(d.n);
    d.index_of.reserve(d.n);
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        d.index_of.emplace(g.nodes[i], static_cast<std::uint32_t>(i));
    for (const auto& [p, c] : g.edges) {
        const auto pi = d.index_of.find(p);
        const auto ci = d.index_of.find(c);
        if (pi == d.index_of.end() || ci == d.index_of.end())
            throw InvalidInputError("cascade graph edge endpoint outside node set");
        d.adj[pi->second].push_back(ci->second);
        d.adj[ci->second].push_back(pi->second);
    }
    return d;
}

// Sum of shortest-path distances from every node, via one BFS per node.
inline std::vector<std::uint64_t> distance_sums_bfs(const DenseGraph& d) {
    std::vector<std::uint64_t> sums(d.n, 0);
    std::vector<std::int32_t> dist(d.n);
    std::vector<std::uint32_t> queue(d.n);
    for (std::uint32_t s = 0; s < d.n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::size_t head = 0, tail = 0;
        dist[s] = 0;
        queue[tail++] = s;
        std::size_t seen = 1;
        std::uint64_t sum = 0;
        while (head < tail) {
            const std::uint32_t u = queue[head++];
            for (const std::uint32_t v : d.adj[u]) {
                if (dist[v] >= 0) continue;
                dist[v] = dist[u] + 1;
                sum += static_cast<std::uint64_t>(dist[v]);
                queue[tail++] = v;
                ++seen;
            }
        }
        if (seen != d.n) throw InvalidInputError("cascade graph is not connected");
        sums[s] = sum;
    }
    return sums;
}

// Trees admit the classic two-pass re-rooting computation in O(n).
inline std::vector<std::uint64_t> distance_sums_tree(const DenseGraph& d) {
    const std::size_t n = d.n;
    std::vector<std::uint32_t> order;
    order.reserve(n);
    std::vector<std::int32_t> parent(n, -1);
    std::vector<char> visited(n, 0);
    order.push_back(0);
    visited[0] = 1;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::uint32_t u = order[i];
        for (const std::uint32_t v : d.adj[u]) {
            if (visited[v]) continue;
            visited[v] = 1;
            parent[v] = static_cast<std::int32_t>(u);
            order.push_back(v);
        }
    }
    if (order.size() != n) throw InvalidInputError("cascade graph is not connected");

    std::vector<std::uint64_t> subtree(n, 1);
    std::vector<std::uint64_t> down(n, 0);  // sum of distances into the subtree
    for (std::size_t i = n; i-- > 1;) {
        const std::uint32_t v = order[i];
        const auto p = static_cast<std::uint32_t>(parent[v]);
        subtree[p] += subtree[v];
        down[p] += down[v] + subtree[v];
    }
    std::vector<std::uint64_t> total(n, 0);
    total[0] = down[0];
    for (std::size_t i = 1; i < n; ++i) {
        const std::uint32_t v = order[i];
        const auto p = static_cast<std::uint32_t>(parent[v]);
        total[v] = total[p] + n - 2 * subtree[v];
    }
    return total;
}

inline std::vector<std::uint64_t> distance_sums(const DenseGraph& d) {
    std::size_t edge_count = 0;
    for (const auto& nbrs : d.adj) edge_count += nbrs.size();
    edge_count /= 2;
    if (edge_count + 1 == d.n) return distance_sums_tree(d);
    return distance_sums_bfs(d);
}

}  // namespace detail

// avg_degree = 2|E|/|V|; avg_path_length over unordered node pairs;
// link_density = 2|E|/(|V|(|V|-1)); clustering = mean local clustering with
// degree-<2 nodes contributing 0. Single-node graphs yield all zeros.
inline FeatureVector graph_features(const CascadeGraph& g) {
    if (g.nodes.empty()) throw InvalidInputError("graph_features on an empty graph");
    FeatureVector f;
    const double n = static_cast<double>(g.nodes.size());
    if (g.nodes.size() == 1) return f;

    const auto d = detail::dense_undirected_view(g);
    const double m = static_cast<double>(g.edges.size());
    f.avg_degree = 2.0 * m / n;
    f.link_density = 2.0 * m / (n * (n - 1.0));

    const auto sums = detail::distance_sums(d);
    std::uint64_t total = 0;
    for (const auto s : sums) total += s;
    f.avg_path_length = static_cast<double>(total) / (n * (n - 1.0));  // each pair twice

    double clustering = 0.0;
    for (std::size_t i = 0; i < d.n; ++i) {
        const auto& nbrs = d.adj[i];
        if (nbrs.size() < 2) continue;
        std::size_t links = 0;
        for (std::size_t a = 0; a < nbrs.size(); ++a)
            for (std::size_t b = a + 1; b < nbrs.size(); ++b) {
                const auto& na = d.adj[nbrs[a]];
                if (std::find(na.begin(), na.end(), nbrs[b]) != na.end()) ++links;
            }
        const double possible =
            static_cast<double>(nbrs.size()) * (static_cast<double>(nbrs.size()) - 1.0) / 2.0;
        clustering += static_cast<double>(links) / possible;
    }
    f.clustering_coefficient = clustering / n;
    return f;
}

// Per-node degree, mean shortest-path distance to all other nodes, and the
// activation time normalized by the window bound (clamped to [0, 1]).
inline NodeFeatureMatrix node_features(const CascadeGraph& g, const ObservationWindow& window) {
    if (g.nodes.empty()) throw InvalidInputError("node_features on an empty graph");
    NodeFeatureMatrix m;
    m.nodes = g.nodes;
    m.rows.resize(g.nodes.size());

    const auto d = detail::dense_undirected_view(g);
    const double n = static_cast<double>(g.nodes.size());
    const double bound = window.bound_for(g.unit);
    std::vector<std::uint64_t> sums;
    if (g.nodes.size() > 1) sums = detail::distance_sums(d);

    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        NodeFeatureRow& row = m.rows[i];
        row.degree = static_cast<double>(d.adj[i].size());
        row.avg_sp_length =
            (g.nodes.size() > 1) ? static_cast<double>(sums[i]) / (n - 1.0) : 0.0;
        const double t = g.node_times.at(g.nodes[i]);
        row.timestamp = std::clamp(t / bound, 0.0, 1.0);
    }
    return m;
}

// Feature CSV: one row per cascade, full round-trip decimal precision.
inline std::string feature_csv_header() {
    return "cascade_id,class_name,avg_degree,avg_path_length,link_density,clustering";
}

inline std::string feature_csv_row(const std::string& cascade_id, const std::string& class_name,
                                   const FeatureVector& f) {
    std::string row = cascade_id;
    row += ',';
    row += class_name;
    row += ',';
    row += format_double(f.avg_degree);
    row += ',';
    row += format_double(f.avg_path_length);
    row += ',';
    row += format_double(f.link_density);
    row += ',';
    row += format_double(f.clustering_coefficient);
    return row;
}

}  // namespace cascadelab
