#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "snr/geograph.hpp"
#include "snr/point_pattern.hpp"

namespace snr {

// Incident-edge class used to average edge intensities at a node. The core
// modes mirror the degree variants; in_out and und_out are the extra union
// modes (pa+child, nach+child).
enum class NodeMode { undirected, in, out, cg, in_out, und_out };

inline const char* node_mode_name(NodeMode m) {
    switch (m) {
        case NodeMode::undirected: return "undirected";
        case NodeMode::in: return "in";
        case NodeMode::out: return "out";
        case NodeMode::cg: return "cg";
        case NodeMode::in_out: return "in_out";
        case NodeMode::und_out: return "und_out";
    }
    return "";
}

constexpr std::array<NodeMode, 6> kAllNodeModes = {
    NodeMode::undirected, NodeMode::in,     NodeMode::out,
    NodeMode::cg,         NodeMode::in_out, NodeMode::und_out};

struct IntensityTable {
    struct EdgeRow {
        long count = 0;
        double length = 0.0;
        double intensity = 0.0;
    };
    std::vector<EdgeRow> edges; // per edge index
    // per node index, per mode; empty optional = undefined (no incident
    // edges in that class)
    std::vector<std::array<std::optional<double>, 6>> nodes;
};

namespace detail {

inline std::vector<int> mode_edges(const GeoGraph& g, int v, NodeMode mode) {
    std::vector<int> out;
    auto add = [&out](const std::vector<int>& src) {
        out.insert(out.end(), src.begin(), src.end());
    };
    switch (mode) {
        case NodeMode::undirected: add(g.nach(v)); break;
        case NodeMode::in: add(g.pa(v)); break;
        case NodeMode::out: add(g.child(v)); break;
        case NodeMode::cg:
            add(g.nach(v));
            add(g.pa(v));
            add(g.child(v));
            break;
        case NodeMode::in_out:
            add(g.pa(v));
            add(g.child(v));
            break;
        case NodeMode::und_out:
            add(g.nach(v));
            add(g.child(v));
            break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

inline double edge_intensity(const EdgeAssignment& assignment, const GeoGraph& graph,
                             const std::string& edge_id) {
    int e = graph.edge_index(edge_id);
    return static_cast<double>(assignment.edge_counts[e]) / graph.edges()[e].length;
}

// Mean of edge intensities over the node's incident-edge class; empty when
// the class has no edges.
inline std::optional<double> node_intensity(const EdgeAssignment& assignment,
                                            const GeoGraph& graph, const std::string& node_id,
                                            NodeMode mode) {
    int v = graph.node_index(node_id);
    std::vector<int> edges = detail::mode_edges(graph, v, mode);
    if (edges.empty()) return std::nullopt;
    double sum = 0.0;
    for (int e : edges)
        sum += static_cast<double>(assignment.edge_counts[e]) / graph.edges()[e].length;
    return sum / static_cast<double>(edges.size());
}

inline IntensityTable intensity_table(const EdgeAssignment& assignment, const GeoGraph& graph) {
    if (static_cast<int>(assignment.edge_counts.size()) != graph.edge_count())
        throw std::invalid_argument("assignment was built on a different graph");
    IntensityTable table;
    table.edges.resize(graph.edge_count());
    for (int e = 0; e < graph.edge_count(); ++e) {
        auto& row = table.edges[e];
        row.count = assignment.edge_counts[e];
        row.length = graph.edges()[e].length;
        row.intensity = static_cast<double>(row.count) / row.length;
    }
    table.nodes.resize(graph.node_count());
    for (int v = 0; v < graph.node_count(); ++v) {
        for (std::size_t m = 0; m < kAllNodeModes.size(); ++m) {
            std::vector<int> edges = detail::mode_edges(graph, v, kAllNodeModes[m]);
            if (edges.empty()) continue;
            double sum = 0.0;
            for (int e : edges) sum += table.edges[e].intensity;
            table.nodes[v][m] = sum / static_cast<double>(edges.size());
        }
    }
    return table;
}

inline std::optional<double> table_node_value(const IntensityTable& t, int node, NodeMode mode) {
    return t.nodes[node][static_cast<std::size_t>(mode)];
}

}  // namespace snr
