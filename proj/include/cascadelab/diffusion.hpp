// diffusion.hpp — IC, LT, and Profile cascade simulators plus filtered
// dataset generation with per-cascade random streams.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cascadelab/cascade.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/network.hpp"
#include "cascadelab/rng.hpp"

namespace cascadelab {

enum class DiffusionModel { IC, LT, Profile };

inline const char* to_string(DiffusionModel m) {
    switch (m) {
        case DiffusionModel::IC: return "ic";
        case DiffusionModel::LT: return "lt";
        case DiffusionModel::Profile: return "profile";
    }
    return "?";
}

inline std::optional<DiffusionModel> diffusion_model_from_string(std::string_view s) {
    if (s == "ic") return DiffusionModel::IC;
    if (s == "lt") return DiffusionModel::LT;
    if (s == "profile") return DiffusionModel::Profile;
    return std::nullopt;
}

struct DiffusionConfig {
    DiffusionModel model = DiffusionModel::IC;
    double ic_p = 0.1;
    double lt_threshold = 0.09;
    double profile_q = 0.3;
    std::size_t min_size = 50;   // cascades smaller than this are discarded
    std::size_t max_size = 500;  // simulation stops once this many events exist
    std::uint64_t seed = 0;
    std::size_t max_consecutive_rejections = 1000000;
    std::string id_prefix;  // defaults to the model tag when empty
};

inline void validate_diffusion_config(const DiffusionConfig& cfg) {
    if (cfg.min_size > cfg.max_size)
        throw InvalidConfigError("min_size must be <= max_size");
    if (cfg.max_size == 0) throw InvalidConfigError("max_size must be positive");
    for (const double p : {cfg.ic_p, cfg.lt_threshold, cfg.profile_q})
        if (p < 0.0) throw InvalidConfigError("diffusion parameters must be non-negative");
}

using Adjacency = std::vector<std::vector<NodeId>>;

namespace detail {

// Shared round engine for IC and Profile: per round, every (newly active u,
// inactive neighbor v) pair yields one Bernoulli(prob) trial; a node hit by
// several same-round successes picks its parent uniformly among them.
inline Cascade bernoulli_spread(const Adjacency& adj, double prob, NodeId seed_node,
                                std::size_t max_size, Rng& rng) {
    Cascade c;
    c.origin_node = seed_node;
    c.unit = TimeUnit::steps;
    c.events.push_back(Event{seed_node, std::nullopt, 0.0});

    std::vector<char> active(adj.size(), 0);
    active[seed_node] = 1;
    std::vector<NodeId> frontier{seed_node};
    std::vector<std::pair<NodeId, NodeId>> hits;  // (target, influencer)

    double round = 0.0;
    while (!frontier.empty() && c.events.size() < max_size) {
        round += 1.0;
        hits.clear();
        for (const NodeId u : frontier) {
            for (const NodeId v : adj[u]) {
                if (active[v]) continue;
                if (rng.bernoulli(prob)) hits.emplace_back(v, u);
            }
        }
        std::stable_sort(hits.begin(), hits.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        frontier.clear();
        for (std::size_t i = 0; i < hits.size() && c.events.size() < max_size;) {
            const NodeId target = hits[i].first;
            std::size_t j = i;
            while (j < hits.size() && hits[j].first == target) ++j;
            const std::size_t k = j - i;
            const NodeId parent = (k == 1) ? hits[i].second : hits[i + rng.index(k)].second;
            c.events.push_back(Event{target, parent, round});
            active[target] = 1;
            frontier.push_back(target);
            i = j;
        }
    }
    return c;
}

// LT: node v activates once the active fraction of its neighbors reaches the
// threshold; parent is the earliest-activated contributing neighbor, ties
// broken by smallest id. Fully deterministic given (net, seed_node).
inline Cascade threshold_spread(const Adjacency& adj, double threshold, NodeId seed_node,
                                std::size_t max_size) {
    Cascade c;
    c.origin_node = seed_node;
    c.unit = TimeUnit::steps;
    c.events.push_back(Event{seed_node, std::nullopt, 0.0});

    const std::size_t n = adj.size();
    std::vector<char> active(n, 0);
    std::vector<double> activation_time(n, 0.0);
    std::vector<std::uint32_t> active_nbrs(n, 0);
    std::vector<std::uint32_t> touched_stamp(n, 0);
    std::uint32_t stamp = 0;
    active[seed_node] = 1;
    std::vector<NodeId> frontier{seed_node};
    std::vector<NodeId> touched;

    double round = 0.0;
    while (!frontier.empty() && c.events.size() < max_size) {
        round += 1.0;
        ++stamp;
        touched.clear();
        for (const NodeId u : frontier) {
            for (const NodeId v : adj[u]) {
                if (active[v]) continue;
                ++active_nbrs[v];
                if (touched_stamp[v] != stamp) {
                    touched_stamp[v] = stamp;
                    touched.push_back(v);
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        frontier.clear();
        for (const NodeId v : touched) {
            if (c.events.size() >= max_size) break;
            const double fraction =
                static_cast<double>(active_nbrs[v]) / static_cast<double>(adj[v].size());
            if (fraction < threshold) continue;
            NodeId parent = 0;
            double best_time = 0.0;
            bool have_parent = false;
            for (const NodeId u : adj[v]) {
                if (!active[u]) continue;
                if (!have_parent || activation_time[u] < best_time ||
                    (activation_time[u] == best_time && u < parent)) {
                    parent = u;
                    best_time = activation_time[u];
                    have_parent = true;
                }
            }
            c.events.push_back(Event{v, parent, round});
            frontier.push_back(v);
        }
        for (const NodeId v : frontier) {
            active[v] = 1;
            activation_time[v] = round;
        }
    }
    return c;
}

inline Cascade simulate_with(const Adjacency& adj, const DiffusionConfig& cfg,
                             NodeId seed_node, Rng& rng) {
    switch (cfg.model) {
        case DiffusionModel::IC:
            return bernoulli_spread(adj, cfg.ic_p, seed_node, cfg.max_size, rng);
        case DiffusionModel::LT:
            return threshold_spread(adj, cfg.lt_threshold, seed_node, cfg.max_size);
        case DiffusionModel::Profile:
            return bernoulli_spread(adj, cfg.profile_q, seed_node, cfg.max_size, rng);
    }
    throw InvalidConfigError("unknown diffusion model");
}

inline void check_seed_node(const Network& net, NodeId seed_node) {
    if (seed_node >= net.node_count)
        throw InvalidInputError("seed node " + std::to_string(seed_node) + " out of range");
}

}  // namespace detail

// Independent Cascade: each node activated at step s gets one Bernoulli(ic_p)
// attempt on each neighbor still inactive at step s+1.
inline Cascade simulate_ic(const Network& net, const DiffusionConfig& cfg, NodeId seed_node) {
    detail::check_seed_node(net, seed_node);
    Rng rng(cfg.seed);
    return detail::bernoulli_spread(build_adjacency(net), cfg.ic_p, seed_node, cfg.max_size,
                                    rng);
}

// Linear Threshold with uniform edge weights 1/deg(v).
inline Cascade simulate_lt(const Network& net, const DiffusionConfig& cfg, NodeId seed_node) {
    detail::check_seed_node(net, seed_node);
    return detail::threshold_spread(build_adjacency(net), cfg.lt_threshold, seed_node,
                                    cfg.max_size);
}

// Profile model: receiver-side probability — every newly active neighbor of
// an inactive node grants one Bernoulli(profile_q) adoption trial next round.
inline Cascade simulate_profile(const Network& net, const DiffusionConfig& cfg,
                                NodeId seed_node) {
    detail::check_seed_node(net, seed_node);
    Rng rng(cfg.seed);
    return detail::bernoulli_spread(build_adjacency(net), cfg.profile_q, seed_node,
                                    cfg.max_size, rng);
}

// Repeatedly draws a uniform seed node and simulates until exactly `count`
// cascades of at least min_size events are collected; oversized cascades keep
// their earliest max_size events. Attempt i uses its own stream derived from
// (seed, i), so results do not depend on the thread count.
inline std::vector<Cascade> generate_dataset(const Network& net, const DiffusionConfig& cfg,
                                             std::size_t count, unsigned threads = 1) {
    if (count == 0) throw InvalidConfigError("count must be positive");
    validate_diffusion_config(cfg);
    if (net.node_count == 0) throw InvalidInputError("network has no nodes");

    const Adjacency adj = build_adjacency(net);
    const std::string prefix =
        cfg.id_prefix.empty() ? std::string(to_string(cfg.model)) : cfg.id_prefix;

    auto run_attempt = [&](std::uint64_t attempt) {
        Rng rng(derive_seed(cfg.seed, "cascade", attempt));
        const NodeId seed_node = static_cast<NodeId>(rng.below(net.node_count));
        return detail::simulate_with(adj, cfg, seed_node, rng);
    };

    std::vector<Cascade> result;
    result.reserve(count);
    std::uint64_t attempt = 0;
    std::size_t consecutive_rejections = 0;

    const unsigned workers = std::max(1u, threads);
    std::vector<Cascade> chunk;
    while (result.size() < count) {
        const std::size_t chunk_size =
            (workers == 1) ? 1 : static_cast<std::size_t>(workers) * 8;
        chunk.assign(chunk_size, Cascade{});
        if (workers == 1) {
            chunk[0] = run_attempt(attempt);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back([&, w]() {
                    for (std::size_t i = w; i < chunk_size; i += workers)
                        chunk[i] = run_attempt(attempt + i);
                });
            }
            for (auto& t : pool) t.join();
        }
        for (std::size_t i = 0; i < chunk_size && result.size() < count; ++i) {
            Cascade& c = chunk[i];
            if (c.events.size() >= cfg.min_size) {
                c = truncate_cascade(c, cfg.max_size);
                c.cascade_id = prefix + "-" + std::to_string(result.size());
                result.push_back(std::move(c));
                consecutive_rejections = 0;
            } else if (++consecutive_rejections > cfg.max_consecutive_rejections) {
                throw ProgressFailureError(
                    "dataset generation rejected " + std::to_string(consecutive_rejections) +
                        " consecutive cascades below min_size",
                    consecutive_rejections);
            }
        }
        attempt += chunk_size;
    }
    return result;
}

}  // namespace cascadelab
