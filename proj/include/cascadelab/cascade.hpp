// cascade.hpp — diffusion events, the observation window, and the windowed
// cascade graph derived from an event sequence.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/network.hpp"

namespace cascadelab {

// Synthetic cascades carry step indices; real logs carry epoch seconds.
// `unknown` means the source file did not declare a unit.
enum class TimeUnit { steps, seconds, unknown };

struct Event {
    NodeId node = 0;
    std::optional<NodeId> parent;  // empty only for the origin
    double time = 0.0;
};

struct Cascade {
    std::string cascade_id;
    NodeId origin_node = 0;
    std::vector<Event> events;  // origin first, non-decreasing time
    TimeUnit unit = TimeUnit::steps;

    std::size_t size() const { return events.size(); }
};

struct Label {
    int class_index = -1;
    std::string class_name;
};

struct ObservationWindow {
    double max_steps = 100.0;
    double max_time = 31536000.0;  // one year in seconds

    // Cutoff in the cascade's own unit; with an unknown unit both cutoffs
    // apply, i.e. the tighter one wins.
    double bound_for(TimeUnit unit) const {
        switch (unit) {
            case TimeUnit::steps: return max_steps;
            case TimeUnit::seconds: return max_time;
            case TimeUnit::unknown: return std::min(max_steps, max_time);
        }
        return max_steps;
    }
};

// The windowed cascade graph: a directed tree of diffusion paths rooted at
// the origin. `nodes` keeps activation order with the origin first.
struct CascadeGraph {
    std::vector<NodeId> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;  // parent -> child
    std::unordered_map<NodeId, double> node_times;
    std::optional<Label> label;
    TimeUnit unit = TimeUnit::steps;

    NodeId root() const { return nodes.front(); }
    std::size_t node_count() const { return nodes.size(); }
};

inline void validate_cascade(const Cascade& c) {
    if (c.events.empty()) throw InvalidInputError("cascade has no events");
    const Event& origin = c.events.front();
    if (origin.parent.has_value())
        throw InvalidInputError("cascade origin must have no parent");
    if (origin.time != 0.0) throw InvalidInputError("cascade origin time must be 0");
    if (origin.node != c.origin_node)
        throw InvalidInputError("first event does not match origin_node");

    std::unordered_map<NodeId, std::size_t> position;
    position.emplace(origin.node, 0);
    for (std::size_t i = 1; i < c.events.size(); ++i) {
        const Event& e = c.events[i];
        if (!e.parent.has_value())
            throw InvalidInputError("non-origin event lacks a parent");
        if (*e.parent == e.node) throw InvalidInputError("event is its own parent");
        if (e.time < 0.0) throw InvalidInputError("negative event time");
        if (e.time < c.events[i - 1].time)
            throw InvalidInputError("event times must be non-decreasing");
        const auto it = position.find(*e.parent);
        if (it == position.end() || it->second >= i)
            throw InvalidInputError("parent must be activated before its child");
        if (!position.emplace(e.node, i).second)
            throw InvalidInputError("node activated twice");
    }
}

// Tree + temporal invariants of a cascade graph.
inline void validate_cascade_graph(const CascadeGraph& g) {
    if (g.nodes.empty()) throw InvalidInputError("cascade graph has no nodes");
    if (g.edges.size() + 1 != g.nodes.size())
        throw InvalidInputError("cascade graph is not a tree (edge count)");
    std::unordered_set<NodeId> node_set(g.nodes.begin(), g.nodes.end());
    if (node_set.size() != g.nodes.size())
        throw InvalidInputError("duplicate node in cascade graph");
    if (g.node_times.size() != g.nodes.size())
        throw InvalidInputError("node_times does not cover the node set");

    std::unordered_map<NodeId, NodeId> parent_of;
    for (const auto& [p, ch] : g.edges) {
        if (!node_set.count(p) || !node_set.count(ch))
            throw InvalidInputError("edge endpoint outside node set");
        if (!parent_of.emplace(ch, p).second)
            throw InvalidInputError("node has two in-edges");
        const double tp = g.node_times.at(p);
        const double tc = g.node_times.at(ch);
        if (tp > tc) throw InvalidInputError("parent activated after child");
    }
    if (parent_of.count(g.root()))
        throw InvalidInputError("root has an in-edge");
    // every non-root must reach the root through parents
    for (const NodeId n : g.nodes) {
        NodeId cur = n;
        std::size_t hops = 0;
        while (cur != g.root()) {
            const auto it = parent_of.find(cur);
            if (it == parent_of.end())
                throw InvalidInputError("node not connected to the root");
            cur = it->second;
            if (++hops > g.nodes.size())
                throw InvalidInputError("cycle in cascade graph");
        }
    }
}

// Keep the first max_size events (prefix by time, stable order).
inline Cascade truncate_cascade(const Cascade& c, std::size_t max_size) {
    Cascade out = c;
    if (out.events.size() > max_size) out.events.resize(max_size);
    return out;
}

// Apply the observation window: events at time <= cutoff survive, in the
// cascade's own time unit. Parents activate no later than children, so the
// kept prefix is still a tree.
inline CascadeGraph build_graph(const Cascade& c, const ObservationWindow& window) {
    if (c.events.empty()) throw InvalidInputError("cannot build a graph from an empty cascade");
    const double cutoff = window.bound_for(c.unit);
    CascadeGraph g;
    g.unit = c.unit;
    for (const Event& e : c.events) {
        if (e.time > cutoff && e.parent.has_value()) break;  // times non-decreasing
        g.nodes.push_back(e.node);
        g.node_times.emplace(e.node, e.time);
        if (e.parent.has_value()) g.edges.emplace_back(*e.parent, e.node);
    }
    return g;
}

}  // namespace cascadelab
