// netgen.hpp — synthetic network generators: Barabasi-Albert preferential
// attachment, Watts-Strogatz rewired ring, and the LFR community benchmark.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/network.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

enum class NetModel { BA, WS, LFR };

inline const char* to_string(NetModel m) {
    switch (m) {
        case NetModel::BA: return "ba";
        case NetModel::WS: return "ws";
        case NetModel::LFR: return "lfr";
    }
    return "?";
}

inline std::optional<NetModel> net_model_from_string(std::string_view s) {
    if (s == "ba") return NetModel::BA;
    if (s == "ws") return NetModel::WS;
    if (s == "lfr") return NetModel::LFR;
    return std::nullopt;
}

struct NetGenConfig {
    NetModel model = NetModel::BA;
    NodeId node_count = 5000;
    // Barabasi-Albert
    std::uint32_t ba_m = 10;
    // Watts-Strogatz
    std::uint32_t ws_k = 10;
    double ws_beta = 0.1;
    // LFR benchmark
    double lfr_gamma = 2.5;          // degree exponent
    double lfr_beta_c = 1.5;         // community-size exponent
    double lfr_mu = 0.1;             // mixing parameter
    double lfr_avg_deg = 10.0;
    std::uint32_t lfr_max_deg = 100;
    std::uint32_t lfr_min_comm = 100;
    std::uint32_t lfr_max_comm = 600;
    std::uint32_t lfr_max_iters = 1000;
    std::uint64_t seed = 0;
};

inline void validate_netgen_config(const NetGenConfig& cfg) {
    if (cfg.node_count == 0) throw InvalidConfigError("node_count must be positive");
    switch (cfg.model) {
        case NetModel::BA:
            if (cfg.ba_m == 0 || cfg.ba_m >= cfg.node_count)
                throw InvalidConfigError("ba_m must satisfy 0 < ba_m < node_count");
            break;
        case NetModel::WS:
            if (cfg.ws_k == 0 || cfg.ws_k % 2 != 0 || cfg.ws_k >= cfg.node_count)
                throw InvalidConfigError("ws_k must be even, positive, and < node_count");
            if (cfg.ws_beta < 0.0 || cfg.ws_beta > 1.0)
                throw InvalidConfigError("ws_beta must be a probability");
            break;
        case NetModel::LFR:
            if (cfg.lfr_gamma <= 1.0) throw InvalidConfigError("lfr_gamma must be > 1");
            if (cfg.lfr_beta_c <= 1.0) throw InvalidConfigError("lfr_beta_c must be > 1");
            if (cfg.lfr_mu < 0.0 || cfg.lfr_mu > 1.0)
                throw InvalidConfigError("lfr_mu must be a probability");
            if (cfg.lfr_min_comm == 0 || cfg.lfr_min_comm > cfg.lfr_max_comm ||
                cfg.lfr_max_comm > cfg.node_count)
                throw InvalidConfigError(
                    "community bounds must satisfy 1 <= min_comm <= max_comm <= node_count");
            if (cfg.lfr_avg_deg <= 0.0 ||
                cfg.lfr_avg_deg > static_cast<double>(cfg.lfr_max_deg))
                throw InvalidConfigError("lfr_avg_deg must satisfy 0 < avg_deg <= max_deg");
            if (cfg.lfr_max_iters == 0)
                throw InvalidConfigError("lfr_max_iters must be positive");
            break;
    }
}

namespace detail {

inline std::uint64_t edge_key(NodeId u, NodeId v) {
    if (u > v) std::swap(u, v);
    return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Continuous power law on [xmin, xmax_excl) with density proportional to
// x^{-exponent}, sampled by inverse CDF.
inline double powerlaw_sample(double xmin, double xmax_excl, double exponent, Rng& rng) {
    const double a = 1.0 - exponent;
    const double lo = std::pow(xmin, a);
    const double hi = std::pow(xmax_excl, a);
    return std::pow(lo + rng.uniform01() * (hi - lo), 1.0 / a);
}

// E[floor(X)] for the sampler above with integer outputs clamped to kmax.
inline double powerlaw_floor_mean(double xmin, double exponent, std::uint32_t kmax) {
    const double a = 1.0 - exponent;
    const double lo = std::pow(xmin, a);
    const double z = std::pow(static_cast<double>(kmax) + 1.0, a) - lo;
    double mean = 0.0;
    for (std::uint32_t k = static_cast<std::uint32_t>(xmin); k <= kmax; ++k) {
        const double l = std::max(static_cast<double>(k), xmin);
        const double r = static_cast<double>(k) + 1.0;
        const double mass = (std::pow(r, a) - std::pow(l, a)) / z;
        mean += static_cast<double>(k) * mass;
    }
    return mean;
}

}  // namespace detail

// Preferential attachment with a repeated-endpoints urn for O(1) sampling.
// Seed graph: ba_m isolated nodes; the first added node attaches uniformly
// (all degrees are zero), which forces it to connect to every seed node.
inline Network generate_ba(const NetGenConfig& cfg) {
    if (cfg.model != NetModel::BA)
        throw InvalidConfigError("generate_ba called with non-BA config");
    validate_netgen_config(cfg);

    Rng rng(cfg.seed);
    const NodeId n = cfg.node_count;
    const std::uint32_t m = cfg.ba_m;

    Network net;
    net.node_count = n;
    net.edges.reserve(static_cast<std::size_t>(n - m) * m);

    std::vector<NodeId> urn;  // one entry per edge endpoint -> degree-proportional draws
    urn.reserve(2 * static_cast<std::size_t>(n - m) * m);
    std::vector<NodeId> picks;
    picks.reserve(m);

    for (NodeId v = m; v < n; ++v) {
        picks.clear();
        while (picks.size() < m) {
            const NodeId t = urn.empty() ? static_cast<NodeId>(rng.below(v))
                                         : urn[rng.index(urn.size())];
            if (std::find(picks.begin(), picks.end(), t) == picks.end()) picks.push_back(t);
        }
        for (const NodeId t : picks) {
            net.edges.emplace_back(std::min(v, t), std::max(v, t));
            urn.push_back(t);
            urn.push_back(v);
        }
    }
    canonicalize_edges(net.edges);
    return net;
}

// Ring lattice (ws_k/2 neighbors each side) with each lattice edge rewired
// with probability ws_beta to a uniform non-duplicate, non-self target.
inline Network generate_ws(const NetGenConfig& cfg) {
    if (cfg.model != NetModel::WS)
        throw InvalidConfigError("generate_ws called with non-WS config");
    validate_netgen_config(cfg);

    Rng rng(cfg.seed);
    const NodeId n = cfg.node_count;
    const std::uint32_t k = cfg.ws_k;

    std::vector<std::unordered_set<NodeId>> adj(n);
    std::vector<std::pair<NodeId, NodeId>> lattice;
    lattice.reserve(static_cast<std::size_t>(n) * (k / 2));
    for (NodeId u = 0; u < n; ++u) {
        for (std::uint32_t j = 1; j <= k / 2; ++j) {
            const NodeId v = static_cast<NodeId>((u + j) % n);
            lattice.emplace_back(u, v);
            adj[u].insert(v);
            adj[v].insert(u);
        }
    }

    for (const auto& [u, v] : lattice) {
        if (!rng.bernoulli(cfg.ws_beta)) continue;
        if (adj[u].size() >= n - 1) continue;  // u already adjacent to everyone
        NodeId w = u;
        bool found = false;
        for (int attempt = 0; attempt < 64; ++attempt) {
            w = static_cast<NodeId>(rng.below(n));
            if (w != u && !adj[u].count(w)) {
                found = true;
                break;
            }
        }
        if (!found) {
            // dense neighborhood: enumerate the valid targets instead
            std::vector<NodeId> candidates;
            for (NodeId c = 0; c < n; ++c)
                if (c != u && !adj[u].count(c)) candidates.push_back(c);
            w = candidates[rng.index(candidates.size())];
        }
        adj[u].erase(v);
        adj[v].erase(u);
        adj[u].insert(w);
        adj[w].insert(u);
    }

    Network net;
    net.node_count = n;
    net.edges.reserve(static_cast<std::size_t>(n) * (k / 2));
    for (NodeId u = 0; u < n; ++u)
        for (const NodeId v : adj[u])
            if (u < v) net.edges.emplace_back(u, v);
    canonicalize_edges(net.edges);
    return net;
}

struct LfrNetwork {
    Network network;
    std::vector<std::uint32_t> node_community;  // community index per node
    std::size_t iterations_used = 0;
};

namespace detail {

inline std::optional<std::vector<std::uint32_t>> lfr_community_sizes(const NetGenConfig& cfg,
                                                                     Rng& rng) {
    const std::uint64_t n = cfg.node_count;
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<std::uint32_t> sizes;
        std::uint64_t sum = 0;
        while (sum < n) {
            auto s = static_cast<std::uint32_t>(powerlaw_sample(
                cfg.lfr_min_comm, static_cast<double>(cfg.lfr_max_comm) + 1.0,
                cfg.lfr_beta_c, rng));
            s = std::min(s, cfg.lfr_max_comm);
            sizes.push_back(s);
            sum += s;
        }
        if (sum == n) return sizes;
        const std::uint64_t excess = sum - n;
        if (sizes.back() > excess && sizes.back() - excess >= cfg.lfr_min_comm) {
            sizes.back() -= static_cast<std::uint32_t>(excess);
            return sizes;
        }
    }
    return std::nullopt;
}

// Place each node into a community with room for it (internal degree needs
// size-1 potential neighbors), choosing among eligible communities with
// probability proportional to free slots.
inline std::optional<std::vector<std::uint32_t>> lfr_assign_communities(
    const std::vector<std::uint32_t>& internal_degree,
    const std::vector<std::uint32_t>& sizes, Rng& rng) {
    const std::size_t n = internal_degree.size();
    std::vector<std::uint64_t> free(sizes.begin(), sizes.end());
    std::vector<std::uint32_t> comm(n, 0);

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (internal_degree[a] != internal_degree[b])
            return internal_degree[a] > internal_degree[b];
        return a < b;
    });

    for (const std::uint32_t v : order) {
        std::uint64_t total = 0;
        for (std::size_t c = 0; c < sizes.size(); ++c)
            if (free[c] > 0 && sizes[c] >= internal_degree[v] + 1u) total += free[c];
        if (total == 0) return std::nullopt;
        std::uint64_t r = rng.below(total);
        for (std::size_t c = 0; c < sizes.size(); ++c) {
            if (!(free[c] > 0 && sizes[c] >= internal_degree[v] + 1u)) continue;
            if (r < free[c]) {
                comm[v] = static_cast<std::uint32_t>(c);
                --free[c];
                break;
            }
            r -= free[c];
        }
    }
    return comm;
}

// Configuration-model stub matching with rejection of self-loops and
// duplicates; stubborn leftovers are resolved by edge swaps.
inline bool lfr_pair_stubs(std::vector<NodeId> stubs, bool inter_mode,
                           const std::vector<std::uint32_t>& comm,
                           std::unordered_set<std::uint64_t>& edge_set,
                           std::vector<std::pair<NodeId, NodeId>>& edges, Rng& rng) {
    auto valid = [&](NodeId u, NodeId v) {
        if (u == v) return false;
        if (inter_mode ? (comm[u] == comm[v]) : (comm[u] != comm[v])) return false;
        return edge_set.find(edge_key(u, v)) == edge_set.end();
    };

    std::vector<NodeId> current = std::move(stubs);
    std::vector<NodeId> leftovers;
    const std::size_t first_new_edge = edges.size();
    for (int round = 0; round < 64 && !current.empty(); ++round) {
        rng.shuffle(current);
        leftovers.clear();
        for (std::size_t i = 0; i + 1 < current.size(); i += 2) {
            const NodeId u = current[i], v = current[i + 1];
            if (valid(u, v)) {
                edge_set.insert(edge_key(u, v));
                edges.emplace_back(u, v);
            } else {
                leftovers.push_back(u);
                leftovers.push_back(v);
            }
        }
        if (leftovers.size() == current.size()) break;  // no progress
        current = leftovers;
    }

    // Swap repair: for a stuck pair (u, v), split an existing edge (a, b)
    // into (u, a) and (v, b).
    while (!current.empty()) {
        const NodeId u = current[current.size() - 2];
        const NodeId v = current[current.size() - 1];
        bool repaired = false;
        const std::size_t pool = edges.size() - first_new_edge;
        for (int attempt = 0; attempt < 2000 && pool > 0; ++attempt) {
            const std::size_t e = first_new_edge + rng.index(pool);
            const auto [a, b] = edges[e];
            if (!valid(u, a) || !valid(v, b)) continue;
            if ((u == v && a == b) || edge_key(u, a) == edge_key(v, b)) continue;
            edge_set.erase(edge_key(a, b));
            edge_set.insert(edge_key(u, a));
            edge_set.insert(edge_key(v, b));
            edges[e] = {u, a};
            edges.emplace_back(v, b);
            repaired = true;
            break;
        }
        if (!repaired) return false;
        current.pop_back();
        current.pop_back();
    }
    return true;
}

inline std::optional<LfrNetwork> lfr_attempt(const NetGenConfig& cfg, double degree_xmin,
                                             Rng& rng) {
    const NodeId n = cfg.node_count;

    std::vector<std::uint32_t> degree(n);
    std::uint64_t total_degree = 0;
    for (NodeId v = 0; v < n; ++v) {
        auto d = static_cast<std::uint32_t>(powerlaw_sample(
            degree_xmin, static_cast<double>(cfg.lfr_max_deg) + 1.0, cfg.lfr_gamma, rng));
        d = std::min(std::max(d, 1u), cfg.lfr_max_deg);
        degree[v] = d;
        total_degree += d;
    }
    if (total_degree % 2 != 0) {
        const NodeId v = static_cast<NodeId>(rng.below(n));
        if (degree[v] < cfg.lfr_max_deg)
            ++degree[v];
        else
            --degree[v];
    }

    const auto sizes = lfr_community_sizes(cfg, rng);
    if (!sizes) return std::nullopt;

    std::vector<std::uint32_t> internal(n);
    std::uint64_t total_external = 0;
    for (NodeId v = 0; v < n; ++v) {
        auto di = static_cast<std::uint32_t>(
            std::llround((1.0 - cfg.lfr_mu) * static_cast<double>(degree[v])));
        internal[v] = std::min(di, degree[v]);
        total_external += degree[v] - internal[v];
    }
    if (sizes->size() == 1 && total_external > 0) return std::nullopt;

    auto comm = lfr_assign_communities(internal, *sizes, rng);
    if (!comm) return std::nullopt;

    // Per-community stub parity: move one internal stub to the external side.
    std::vector<std::vector<NodeId>> members(sizes->size());
    for (NodeId v = 0; v < n; ++v) members[(*comm)[v]].push_back(v);
    for (auto& group : members) {
        std::uint64_t stub_sum = 0;
        for (const NodeId v : group) stub_sum += internal[v];
        if (stub_sum % 2 == 0) continue;
        std::vector<NodeId> movable;
        for (const NodeId v : group)
            if (internal[v] > 0) movable.push_back(v);
        const NodeId v = movable[rng.index(movable.size())];
        --internal[v];
    }

    std::unordered_set<std::uint64_t> edge_set;
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(total_degree / 2);
    for (const auto& group : members) {
        std::vector<NodeId> stubs;
        for (const NodeId v : group)
            for (std::uint32_t s = 0; s < internal[v]; ++s) stubs.push_back(v);
        if (stubs.empty()) continue;
        if (!lfr_pair_stubs(std::move(stubs), false, *comm, edge_set, edges, rng))
            return std::nullopt;
    }

    std::vector<NodeId> ext_stubs;
    for (NodeId v = 0; v < n; ++v)
        for (std::uint32_t s = internal[v]; s < degree[v]; ++s) ext_stubs.push_back(v);
    if (!ext_stubs.empty()) {
        if (sizes->size() == 1) return std::nullopt;
        if (!lfr_pair_stubs(std::move(ext_stubs), true, *comm, edge_set, edges, rng))
            return std::nullopt;
    }

    LfrNetwork out;
    out.network.node_count = n;
    out.network.edges = std::move(edges);
    canonicalize_edges(out.network.edges);
    out.node_community = std::move(*comm);
    return out;
}

}  // namespace detail

// LFR benchmark: truncated power-law degrees (mean matched to lfr_avg_deg by
// bisection on the lower cutoff), power-law community sizes, stub matching
// within and between communities. Retries whole attempts up to lfr_max_iters.
inline LfrNetwork generate_lfr(const NetGenConfig& cfg) {
    if (cfg.model != NetModel::LFR)
        throw InvalidConfigError("generate_lfr called with non-LFR config");
    validate_netgen_config(cfg);

    double lo = 1.0, hi = static_cast<double>(cfg.lfr_max_deg);
    if (detail::powerlaw_floor_mean(lo, cfg.lfr_gamma, cfg.lfr_max_deg) > cfg.lfr_avg_deg)
        throw InvalidConfigError("lfr_avg_deg below the attainable minimum for this exponent");
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (detail::powerlaw_floor_mean(mid, cfg.lfr_gamma, cfg.lfr_max_deg) < cfg.lfr_avg_deg)
            lo = mid;
        else
            hi = mid;
    }
    const double degree_xmin = 0.5 * (lo + hi);

    for (std::size_t iter = 0; iter < cfg.lfr_max_iters; ++iter) {
        Rng rng(derive_seed(cfg.seed, "lfr-attempt", iter));
        auto result = detail::lfr_attempt(cfg, degree_xmin, rng);
        if (result) {
            result->iterations_used = iter + 1;
            validate_network(result->network);
            return std::move(*result);
        }
    }
    throw GenerationFailureError("LFR generation failed after " +
                                     std::to_string(cfg.lfr_max_iters) + " iterations",
                                 cfg.lfr_max_iters);
}

// Fraction of edge endpoints that cross communities.
inline double empirical_mixing(const LfrNetwork& lfr) {
    if (lfr.network.edges.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& [u, v] : lfr.network.edges)
        if (lfr.node_community[u] != lfr.node_community[v]) ++inter;
    return static_cast<double>(inter) / static_cast<double>(lfr.network.edges.size());
}

inline Network generate(const NetGenConfig& cfg) {
    switch (cfg.model) {
        case NetModel::BA: return generate_ba(cfg);
        case NetModel::WS: return generate_ws(cfg);
        case NetModel::LFR: return generate_lfr(cfg).network;
    }
    throw InvalidConfigError("unknown network model");
}

}  // namespace cascadelab
