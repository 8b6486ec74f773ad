// network.hpp — undirected static network: type, invariants, edge-list file IO.
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cascadelab/errors.hpp"
#include "cascadelab/io_util.hpp"

namespace cascadelab {

using NodeId = std::uint32_t;

struct Network {
    NodeId node_count = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;  // canonical: u < v, sorted, unique

    std::size_t edge_count() const { return edges.size(); }
};

inline void canonicalize_edges(std::vector<std::pair<NodeId, NodeId>>& edges) {
    for (auto& [u, v] : edges) {
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
}

inline void validate_network(const Network& net) {
    for (std::size_t i = 0; i < net.edges.size(); ++i) {
        const auto [u, v] = net.edges[i];
        if (u == v)
            throw InvalidInputError("network has a self-loop at node " + std::to_string(u));
        if (u > v) throw InvalidInputError("network edge not in canonical u < v order");
        if (v >= net.node_count)
            throw InvalidInputError("edge endpoint " + std::to_string(v) + " out of range");
        if (i > 0 && !(net.edges[i - 1] < net.edges[i]))
            throw InvalidInputError("network edges not sorted / contain duplicates");
    }
}

inline std::vector<std::vector<NodeId>> build_adjacency(const Network& net) {
    std::vector<std::vector<NodeId>> adj(net.node_count);
    for (const auto& [u, v] : net.edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
}

inline std::vector<std::size_t> degree_sequence(const Network& net) {
    std::vector<std::size_t> deg(net.node_count, 0);
    for (const auto& [u, v] : net.edges) {
        ++deg[u];
        ++deg[v];
    }
    return deg;
}

// Format: `# nodes=<N>` then one `<u> <v>` line per edge, u < v.
inline void save_network(const Network& net, const std::filesystem::path& path) {
    std::string out = "# nodes=" + std::to_string(net.node_count) + "\n";
    for (const auto& [u, v] : net.edges) {
        out += std::to_string(u);
        out += ' ';
        out += std::to_string(v);
        out += '\n';
    }
    write_file_atomic(path, out);
}

inline Network load_network(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    Network net;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string::npos) eol = content.size();
        const std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (!have_header) {
            constexpr std::string_view prefix = "# nodes=";
            if (line.substr(0, prefix.size()) != prefix ||
                !parse_int(line.substr(prefix.size()), net.node_count))
                throw ParseError("expected '# nodes=<N>' header", line_no);
            have_header = true;
            continue;
        }
        const std::size_t sp = line.find(' ');
        NodeId u = 0, v = 0;
        if (sp == std::string_view::npos || !parse_int(line.substr(0, sp), u) ||
            !parse_int(line.substr(sp + 1), v))
            throw ParseError("expected '<u> <v>' edge line", line_no);
        if (u >= v) throw ParseError("edge must satisfy u < v", line_no);
        if (v >= net.node_count) throw ParseError("edge endpoint out of range", line_no);
        net.edges.emplace_back(u, v);
    }
    if (!have_header) throw ParseError("missing '# nodes=<N>' header", 1);
    validate_network(net);
    return net;
}

}  // namespace cascadelab
