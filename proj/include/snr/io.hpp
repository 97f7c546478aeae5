#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "snr/csv.hpp"
#include "snr/geograph.hpp"
#include "snr/model.hpp"
#include "snr/point_pattern.hpp"
#include "snr/spline.hpp"

namespace snr {

// nodes CSV: id,x,y
inline std::vector<GeoNode> read_nodes_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int id = t.require_column("id"), x = t.require_column("x"), y = t.require_column("y");
    std::vector<GeoNode> nodes;
    nodes.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::string ctx = path + ":" + std::to_string(r + 2);
        nodes.push_back({t.rows[r][id], parse_double(t.rows[r][x], ctx),
                         parse_double(t.rows[r][y], ctx)});
    }
    return nodes;
}

// edges CSV: id,tail,head,directed with directed in {0,1}
inline std::vector<EdgeRecord> read_edges_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int id = t.require_column("id"), tail = t.require_column("tail"),
        head = t.require_column("head"), dir = t.require_column("directed");
    std::vector<EdgeRecord> edges;
    edges.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const std::string& d = t.rows[r][dir];
        if (d != "0" && d != "1")
            throw std::runtime_error(path + ":" + std::to_string(r + 2) +
                                     ": directed must be 0 or 1, got '" + d + "'");
        edges.push_back({t.rows[r][id], t.rows[r][tail], t.rows[r][head],
                         d == "1" ? EdgeKind::directed : EdgeKind::undirected});
    }
    return edges;
}

// events CSV: x,y[,mark]
inline PointPattern read_events_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int x = t.require_column("x"), y = t.require_column("y");
    int mark = t.column("mark");
    PointPattern p;
    p.events.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::string ctx = path + ":" + std::to_string(r + 2);
        Event ev;
        ev.x = parse_double(t.rows[r][x], ctx);
        ev.y = parse_double(t.rows[r][y], ctx);
        if (mark >= 0) ev.mark = t.rows[r][mark];
        p.events.push_back(std::move(ev));
    }
    return p;
}

inline void write_events_csv(const std::string& path, const PointPattern& pattern) {
    CsvWriter w(path);
    bool marks = false;
    for (const Event& e : pattern.events)
        if (!e.mark.empty()) marks = true;
    w.row(marks ? std::vector<std::string>{"x", "y", "mark"}
                : std::vector<std::string>{"x", "y"});
    for (const Event& e : pattern.events) {
        if (marks)
            w.row({format_double(e.x), format_double(e.y), e.mark});
        else
            w.row({format_double(e.x), format_double(e.y)});
    }
}

// covariates CSV: node_id,<name>,...
inline CovariateTable read_covariates_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int key = t.require_column("node_id");
    CovariateTable table;
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (static_cast<int>(c) != key) table.names.push_back(t.header[c]);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        std::vector<std::string> values;
        for (std::size_t c = 0; c < t.header.size(); ++c)
            if (static_cast<int>(c) != key) values.push_back(t.rows[r][c]);
        if (!table.by_node.emplace(t.rows[r][key], std::move(values)).second)
            throw std::runtime_error(path + ":" + std::to_string(r + 2) +
                                     ": duplicate node_id '" + t.rows[r][key] + "'");
    }
    return table;
}

// node-to-region map CSV: node_id,region_id
inline std::map<std::string, std::string> read_node_regions_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int node = t.require_column("node_id"), region = t.require_column("region_id");
    std::map<std::string, std::string> out;
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        if (!out.emplace(t.rows[r][node], t.rows[r][region]).second)
            throw std::runtime_error(path + ":" + std::to_string(r + 2) +
                                     ": duplicate node_id '" + t.rows[r][node] + "'");
    return out;
}

// lattice adjacency CSV: region_a,region_b
inline LatticeAdjacency read_lattice_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    int a = t.require_column("region_a"), b = t.require_column("region_b");
    LatticeAdjacency adj;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            adj.add_pair(t.rows[r][a], t.rows[r][b]);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(r + 2) + ": " + e.what());
        }
    }
    return adj;
}

}  // namespace snr
