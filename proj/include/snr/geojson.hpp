#pragma once

#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "snr/geograph.hpp"

namespace snr {

struct GeoJsonGraph {
    std::vector<GeoNode> nodes;
    std::vector<EdgeRecord> edges;
};

// Point features become nodes, LineString features become edges. Lines with
// interior vertices are split into chained edges with generated node ids;
// endpoints reuse an existing node when the coordinates match exactly.
inline GeoJsonGraph read_geojson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw std::runtime_error(path + ": expected a GeoJSON FeatureCollection");

    GeoJsonGraph g;
    std::map<std::pair<double, double>, std::string> by_coord;
    int anon_nodes = 0, anon_edges = 0;

    auto feature_id = [](const nlohmann::json& f, const std::string& fallback) {
        if (f.contains("properties") && f["properties"].contains("id")) {
            const auto& v = f["properties"]["id"];
            return v.is_string() ? v.get<std::string>() : v.dump();
        }
        if (f.contains("id"))
            return f["id"].is_string() ? f["id"].get<std::string>() : f["id"].dump();
        return fallback;
    };

    auto ensure_node = [&](double x, double y, const std::string& preferred) {
        auto it = by_coord.find({x, y});
        if (it != by_coord.end()) return it->second;
        std::string id = preferred.empty() ? "gj" + std::to_string(anon_nodes++) : preferred;
        g.nodes.push_back({id, x, y});
        by_coord[{x, y}] = id;
        return id;
    };

    // first pass: points, so line endpoints can attach to them
    for (const auto& f : doc["features"]) {
        if (!f.contains("geometry") || f["geometry"].is_null()) continue;
        if (f["geometry"].value("type", "") != "Point") continue;
        const auto& c = f["geometry"]["coordinates"];
        ensure_node(c.at(0).get<double>(), c.at(1).get<double>(),
                    feature_id(f, "gj" + std::to_string(anon_nodes++)));
    }

    for (const auto& f : doc["features"]) {
        if (!f.contains("geometry") || f["geometry"].is_null()) continue;
        if (f["geometry"].value("type", "") != "LineString") continue;
        const auto& coords = f["geometry"]["coordinates"];
        if (coords.size() < 2)
            throw std::runtime_error(path + ": LineString with fewer than two vertices");
        std::string base = feature_id(f, "l" + std::to_string(anon_edges++));
        EdgeKind kind = EdgeKind::undirected;
        if (f.contains("properties") && f["properties"].contains("directed")) {
            const auto& d = f["properties"]["directed"];
            bool flag = d.is_number() ? d.get<int>() != 0 : d.get<bool>();
            kind = flag ? EdgeKind::directed : EdgeKind::undirected;
        }
        std::string prev;
        for (std::size_t i = 0; i < coords.size(); ++i) {
            double x = coords[i].at(0).get<double>(), y = coords[i].at(1).get<double>();
            bool interior = i > 0 && i + 1 < coords.size();
            std::string id =
                ensure_node(x, y, interior ? base + ".v" + std::to_string(i) : "");
            if (i > 0) {
                std::string eid =
                    coords.size() == 2 ? base : base + ".s" + std::to_string(i);
                g.edges.push_back({eid, prev, id, kind});
            }
            prev = id;
        }
    }
    return g;
}

}  // namespace snr
