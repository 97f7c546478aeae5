#pragma once

// Seeded random inputs for property-style tests.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "snr/geograph.hpp"

namespace gen {

inline std::string node_name(int i) { return "n" + std::string(i < 10 ? "0" : "") + std::to_string(i); }
inline std::string edge_name(int i) { return "e" + std::string(i < 10 ? "0" : "") + std::to_string(i); }

struct GraphOptions {
    int max_nodes = 12;
    int min_nodes = 2;
    double edge_prob = 0.3;
    bool allow_directed = true;
    bool integer_coords = false;
};

// Random mixed graph on integer-ish coordinates. Node and edge ids are
// zero-padded so lexicographic order equals numeric order.
inline snr::GeoGraph random_graph(std::mt19937& rng, const GraphOptions& opt = {}) {
    std::uniform_int_distribution<int> n_nodes(opt.min_nodes, opt.max_nodes);
    const int n = n_nodes(rng);
    std::vector<snr::GeoNode> nodes;
    std::set<std::pair<int, int>> used_coords;
    std::uniform_int_distribution<int> coord(0, 40);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    for (int i = 0; i < n; ++i) {
        int cx, cy;
        do {
            cx = coord(rng);
            cy = coord(rng);
        } while (!used_coords.insert({cx, cy}).second);
        double x = cx, y = cy;
        if (!opt.integer_coords) {
            x += jitter(rng) * 0.25;
            y += jitter(rng) * 0.25;
        }
        nodes.push_back({node_name(i), x, y});
    }
    std::vector<snr::EdgeRecord> edges;
    std::bernoulli_distribution take(opt.edge_prob);
    std::bernoulli_distribution directed(opt.allow_directed ? 0.3 : 0.0);
    int eid = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!take(rng)) continue;
            bool dir = directed(rng);
            edges.push_back({edge_name(eid++), node_name(i), node_name(j),
                             dir ? snr::EdgeKind::directed : snr::EdgeKind::undirected});
        }
    }
    return snr::build_graph(nodes, edges);
}

// Two K4 cliques joined by a single bridge; the bridge carries the unique
// maximal edge betweenness.
inline snr::GeoGraph barbell_graph() {
    std::vector<snr::GeoNode> nodes;
    for (int i = 0; i < 4; ++i) nodes.push_back({node_name(i), static_cast<double>(i), 0.0});
    for (int i = 4; i < 8; ++i) nodes.push_back({node_name(i), static_cast<double>(i + 4), 0.0});
    std::vector<snr::EdgeRecord> edges;
    int eid = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            edges.push_back({edge_name(eid++), node_name(i), node_name(j), snr::EdgeKind::undirected});
    for (int i = 4; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            edges.push_back({edge_name(eid++), node_name(i), node_name(j), snr::EdgeKind::undirected});
    edges.push_back({edge_name(eid++), node_name(3), node_name(4), snr::EdgeKind::undirected});
    return snr::build_graph(nodes, edges);
}

// Rectangular grid of unit squares; ids are row-major.
inline snr::GeoGraph grid_graph(int rows, int cols, double spacing = 1.0) {
    std::vector<snr::GeoNode> nodes;
    auto name = [cols](int r, int c) { return "g" + std::to_string(r * cols + c + 1000); };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            nodes.push_back({name(r, c), c * spacing, r * spacing});
    std::vector<snr::EdgeRecord> edges;
    int eid = 0;
    auto ename = [&eid]() { return "e" + std::to_string(eid++ + 10000); };
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            if (c + 1 < cols)
                edges.push_back({ename(), name(r, c), name(r, c + 1), snr::EdgeKind::undirected});
            if (r + 1 < rows)
                edges.push_back({ename(), name(r, c), name(r + 1, c), snr::EdgeKind::undirected});
        }
    }
    return snr::build_graph(nodes, edges);
}

}  // namespace gen
