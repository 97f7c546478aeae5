#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "snr/geograph.hpp"

namespace snr {

struct Event {
    double x = 0.0;
    double y = 0.0;
    std::string mark; // optional categorical label, empty when absent
};

struct PointPattern {
    std::vector<Event> events;
};

enum class AssignMode { snap, paper_box };

// Result of mapping events onto edge intervals. In snap mode an event has at
// most one match; in paper_box mode it is counted on every edge whose closed
// bounding box contains it.
struct EdgeAssignment {
    struct Match {
        int edge = -1;
        double distance = 0.0; // perpendicular (or endpoint) distance
    };
    std::vector<std::vector<Match>> matches; // per event
    std::vector<long> edge_counts;           // per edge index
    long assigned = 0;
    long unassigned = 0;
    AssignMode mode = AssignMode::snap;
};

namespace detail {

inline double point_segment_distance(double px, double py, double ax, double ay,
                                     double bx, double by) {
    double dx = bx - ax, dy = by - ay;
    double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    double cx = ax + t * dx, cy = ay + t * dy;
    return std::hypot(px - cx, py - cy);
}

}  // namespace detail

// Default snapping tolerance: 1% of the bounding-box diagonal of the node
// coordinates.
inline double default_tolerance(const GeoGraph& g) {
    if (g.node_count() == 0) return 0.0;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const GeoNode& n : g.nodes()) {
        xmin = std::min(xmin, n.x);
        xmax = std::max(xmax, n.x);
        ymin = std::min(ymin, n.y);
        ymax = std::max(ymax, n.y);
    }
    return 0.01 * std::hypot(xmax - xmin, ymax - ymin);
}

inline EdgeAssignment assign_events(const GeoGraph& graph, const PointPattern& pattern,
                                    double tolerance, AssignMode mode = AssignMode::snap) {
    if (tolerance < 0.0) throw std::invalid_argument("tolerance must be >= 0");

    EdgeAssignment out;
    out.mode = mode;
    out.matches.resize(pattern.events.size());
    out.edge_counts.assign(graph.edge_count(), 0);

    struct Seg {
        double ax, ay, bx, by;
    };
    std::vector<Seg> segs(graph.edge_count());
    for (int e = 0; e < graph.edge_count(); ++e) {
        const GeoEdge& ge = graph.edges()[e];
        const GeoNode& t = graph.nodes()[graph.node_index(ge.tail)];
        const GeoNode& h = graph.nodes()[graph.node_index(ge.head)];
        segs[e] = {t.x, t.y, h.x, h.y};
    }

    for (std::size_t i = 0; i < pattern.events.size(); ++i) {
        const Event& ev = pattern.events[i];
        if (!std::isfinite(ev.x) || !std::isfinite(ev.y))
            throw std::invalid_argument("non-finite event coordinates");
        auto& ms = out.matches[i];
        if (mode == AssignMode::snap) {
            int best = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int e = 0; e < graph.edge_count(); ++e) {
                const Seg& s = segs[e];
                double d = detail::point_segment_distance(ev.x, ev.y, s.ax, s.ay, s.bx, s.by);
                if (d < best_d) { // strict: ties keep the lowest edge index
                    best_d = d;
                    best = e;
                }
            }
            if (best >= 0 && best_d <= tolerance) {
                ms.push_back({best, best_d});
                out.edge_counts[best] += 1;
            }
        } else {
            for (int e = 0; e < graph.edge_count(); ++e) {
                const Seg& s = segs[e];
                double xlo = std::min(s.ax, s.bx), xhi = std::max(s.ax, s.bx);
                double ylo = std::min(s.ay, s.by), yhi = std::max(s.ay, s.by);
                if (ev.x >= xlo && ev.x <= xhi && ev.y >= ylo && ev.y <= yhi) {
                    double d = detail::point_segment_distance(ev.x, ev.y, s.ax, s.ay, s.bx, s.by);
                    ms.push_back({e, d});
                    out.edge_counts[e] += 1;
                }
            }
        }
        if (ms.empty())
            out.unassigned += 1;
        else
            out.assigned += 1;
    }
    return out;
}

inline long count_measure(const EdgeAssignment& assignment, const GeoGraph& graph,
                          const std::string& edge_id) {
    int e = graph.edge_index(edge_id);
    return assignment.edge_counts[e];
}

}  // namespace snr
