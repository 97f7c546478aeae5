#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace snr {

struct GeoNode {
    std::string id;
    double x = 0.0;
    double y = 0.0;
};

enum class EdgeKind { undirected, directed };

struct GeoEdge {
    std::string id;
    std::string tail;
    std::string head;
    EdgeKind kind = EdgeKind::undirected;
    double length = 0.0;
};

// Raw edge record as read from input; the length is computed by build_graph.
struct EdgeRecord {
    std::string id;
    std::string tail;
    std::string head;
    EdgeKind kind = EdgeKind::undirected;
};

enum class LengthMode { euclidean, squared };

enum class DegreeMode { undirected, in, out, cg };

// Partition of the node set. Groups are listed by ascending lowest member
// index and each group is labelled by the id of its lowest member.
struct NodePartition {
    std::vector<int> group_of;            // node index -> group number
    std::vector<std::vector<int>> groups; // group number -> sorted node indices
};

// Immutable geo-referenced graph. Nodes and edges are kept sorted by id so
// every index-based tie-break ("lowest id wins") is deterministic. Undirected
// incidences feed nach(v); directed edges feed pa(head) and child(tail).
class GeoGraph {
public:
    GeoGraph() = default;

    const std::vector<GeoNode>& nodes() const { return nodes_; }
    const std::vector<GeoEdge>& edges() const { return edges_; }

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    int node_index(const std::string& id) const {
        auto it = node_index_.find(id);
        if (it == node_index_.end())
            throw std::invalid_argument("unknown node id: " + id);
        return it->second;
    }
    int edge_index(const std::string& id) const {
        auto it = edge_index_.find(id);
        if (it == edge_index_.end())
            throw std::invalid_argument("unknown edge id: " + id);
        return it->second;
    }
    bool has_node(const std::string& id) const { return node_index_.count(id) > 0; }

    const std::vector<int>& nach(int v) const { return nach_[v]; }
    const std::vector<int>& pa(int v) const { return pa_[v]; }
    const std::vector<int>& child(int v) const { return child_[v]; }

    // All incident edges regardless of kind or direction.
    std::vector<int> incident(int v) const {
        std::vector<int> out = nach_[v];
        out.insert(out.end(), pa_[v].begin(), pa_[v].end());
        out.insert(out.end(), child_[v].begin(), child_[v].end());
        std::sort(out.begin(), out.end());
        return out;
    }

    int other_endpoint(int edge, int v) const {
        const GeoEdge& e = edges_[edge];
        int t = node_index(e.tail), h = node_index(e.head);
        return t == v ? h : t;
    }

    LengthMode length_mode() const { return length_mode_; }

    friend GeoGraph build_graph(const std::vector<GeoNode>& nodes,
                                const std::vector<EdgeRecord>& records,
                                LengthMode mode);

private:
    std::vector<GeoNode> nodes_;
    std::vector<GeoEdge> edges_;
    std::unordered_map<std::string, int> node_index_;
    std::unordered_map<std::string, int> edge_index_;
    std::vector<std::vector<int>> nach_, pa_, child_;
    LengthMode length_mode_ = LengthMode::euclidean;
};

inline GeoGraph build_graph(const std::vector<GeoNode>& nodes,
                            const std::vector<EdgeRecord>& records,
                            LengthMode mode = LengthMode::euclidean) {
    GeoGraph g;
    g.length_mode_ = mode;
    g.nodes_ = nodes;
    std::sort(g.nodes_.begin(), g.nodes_.end(),
              [](const GeoNode& a, const GeoNode& b) { return a.id < b.id; });
    for (int i = 0; i < static_cast<int>(g.nodes_.size()); ++i) {
        const GeoNode& n = g.nodes_[i];
        if (!std::isfinite(n.x) || !std::isfinite(n.y))
            throw std::invalid_argument("non-finite coordinates for node " + n.id);
        if (!g.node_index_.emplace(n.id, i).second)
            throw std::invalid_argument("duplicate node id: " + n.id);
    }

    std::vector<EdgeRecord> recs = records;
    std::sort(recs.begin(), recs.end(),
              [](const EdgeRecord& a, const EdgeRecord& b) { return a.id < b.id; });
    g.edges_.reserve(recs.size());
    for (const EdgeRecord& r : recs) {
        if (r.tail == r.head)
            throw std::invalid_argument("self-loop on edge " + r.id);
        auto ti = g.node_index_.find(r.tail);
        auto hi = g.node_index_.find(r.head);
        if (ti == g.node_index_.end())
            throw std::invalid_argument("edge " + r.id + " references unknown node " + r.tail);
        if (hi == g.node_index_.end())
            throw std::invalid_argument("edge " + r.id + " references unknown node " + r.head);
        const GeoNode& t = g.nodes_[ti->second];
        const GeoNode& h = g.nodes_[hi->second];
        double dx = h.x - t.x, dy = h.y - t.y;
        double sq = dx * dx + dy * dy;
        if (sq == 0.0)
            throw std::invalid_argument("coincident endpoints (zero length) on edge " + r.id);
        GeoEdge e;
        e.id = r.id;
        e.tail = r.tail;
        e.head = r.head;
        e.kind = r.kind;
        e.length = mode == LengthMode::euclidean ? std::sqrt(sq) : sq;
        int idx = static_cast<int>(g.edges_.size());
        if (!g.edge_index_.emplace(e.id, idx).second)
            throw std::invalid_argument("duplicate edge id: " + e.id);
        g.edges_.push_back(std::move(e));
    }

    g.nach_.assign(g.nodes_.size(), {});
    g.pa_.assign(g.nodes_.size(), {});
    g.child_.assign(g.nodes_.size(), {});
    for (int ei = 0; ei < static_cast<int>(g.edges_.size()); ++ei) {
        const GeoEdge& e = g.edges_[ei];
        int t = g.node_index_.at(e.tail);
        int h = g.node_index_.at(e.head);
        if (e.kind == EdgeKind::undirected) {
            g.nach_[t].push_back(ei);
            g.nach_[h].push_back(ei);
        } else {
            g.child_[t].push_back(ei);
            g.pa_[h].push_back(ei);
        }
    }
    return g;
}

inline int degree(const GeoGraph& g, const std::string& v, DegreeMode mode) {
    int i = g.node_index(v);
    switch (mode) {
        case DegreeMode::undirected: return static_cast<int>(g.nach(i).size());
        case DegreeMode::in: return static_cast<int>(g.pa(i).size());
        case DegreeMode::out: return static_cast<int>(g.child(i).size());
        case DegreeMode::cg:
            return static_cast<int>(g.nach(i).size() + g.pa(i).size() + g.child(i).size());
    }
    return 0;
}

namespace detail {

// Undirected path skeleton: every edge is traversable both ways, each
// parallel edge counts as a distinct route. Used by all shortest-path ops.
inline std::vector<std::vector<std::pair<int, int>>> path_adjacency(const GeoGraph& g) {
    std::vector<std::vector<std::pair<int, int>>> adj(g.node_count());
    for (int ei = 0; ei < g.edge_count(); ++ei) {
        const GeoEdge& e = g.edges()[ei];
        int t = g.node_index(e.tail), h = g.node_index(e.head);
        adj[t].emplace_back(h, ei);
        adj[h].emplace_back(t, ei);
    }
    return adj;
}

inline int env_thread_cap() {
    if (const char* s = std::getenv("SNR_THREADS")) {
        int v = std::atoi(s);
        if (v >= 1) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

struct BrandesPass {
    std::vector<double> node_score;
    std::vector<double> edge_score;
};

// One Brandes source sweep on the hop-count skeleton: BFS with path
// counting, then dependency accumulation back down the BFS order.
inline void brandes_source(const std::vector<std::vector<std::pair<int, int>>>& adj,
                           int s, BrandesPass& acc) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> dist(n, -1);
    std::vector<double> sigma(n, 0.0);
    std::vector<std::vector<std::pair<int, int>>> pred(n); // (node, edge)
    std::vector<int> order;
    order.reserve(n);

    std::deque<int> queue;
    dist[s] = 0;
    sigma[s] = 1.0;
    queue.push_back(s);
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (auto [w, ei] : adj[v]) {
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if (dist[w] == dist[v] + 1) {
                sigma[w] += sigma[v];
                pred[w].emplace_back(v, ei);
            }
        }
    }

    std::vector<double> delta(n, 0.0);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int w = *it;
        for (auto [v, ei] : pred[w]) {
            double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
            delta[v] += c;
            acc.edge_score[ei] += c;
        }
        if (w != s) acc.node_score[w] += delta[w];
    }
}

// Shared worker for node and edge betweenness. Sources are processed in
// fixed-size blocks and block results combined in index order, so the result
// is identical for any thread count.
inline BrandesPass brandes_all(const GeoGraph& g) {
    const int n = g.node_count();
    const auto adj = path_adjacency(g);
    constexpr int kBlock = 64;
    const int n_blocks = (n + kBlock - 1) / kBlock;

    std::vector<BrandesPass> partial(n_blocks);
    auto run_block = [&](int b) {
        BrandesPass& acc = partial[b];
        acc.node_score.assign(n, 0.0);
        acc.edge_score.assign(g.edge_count(), 0.0);
        int lo = b * kBlock, hi = std::min(n, lo + kBlock);
        for (int s = lo; s < hi; ++s) brandes_source(adj, s, acc);
    };

    int threads = std::min(env_thread_cap(), n_blocks);
    if (threads <= 1) {
        for (int b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::vector<std::thread> pool;
        std::vector<int> next_block(threads);
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                for (int b = t; b < n_blocks; b += threads) run_block(b);
            });
        }
        for (auto& th : pool) th.join();
    }

    BrandesPass total;
    total.node_score.assign(n, 0.0);
    total.edge_score.assign(g.edge_count(), 0.0);
    for (int b = 0; b < n_blocks; ++b) {
        for (int v = 0; v < n; ++v) total.node_score[v] += partial[b].node_score[v];
        for (int e = 0; e < g.edge_count(); ++e)
            total.edge_score[e] += partial[b].edge_score[e];
    }
    // Each unordered pair was visited from both endpoints.
    for (double& v : total.node_score) v *= 0.5;
    for (double& v : total.edge_score) v *= 0.5;
    return total;
}

}  // namespace detail

inline NodePartition connected_components(const GeoGraph& g) {
    const int n = g.node_count();
    const auto adj = detail::path_adjacency(g);
    NodePartition part;
    part.group_of.assign(n, -1);
    for (int s = 0; s < n; ++s) {
        if (part.group_of[s] >= 0) continue;
        int group = static_cast<int>(part.groups.size());
        std::vector<int> members;
        std::deque<int> queue{s};
        part.group_of[s] = group;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            members.push_back(v);
            for (auto [w, ei] : adj[v]) {
                (void)ei;
                if (part.group_of[w] < 0) {
                    part.group_of[w] = group;
                    queue.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        part.groups.push_back(std::move(members));
    }
    return part;
}

// Hop-count node betweenness over unordered pairs; unreachable pairs
// contribute nothing.
inline std::map<std::string, double> betweenness(const GeoGraph& g) {
    auto pass = detail::brandes_all(g);
    std::map<std::string, double> out;
    for (int v = 0; v < g.node_count(); ++v) out[g.nodes()[v].id] = pass.node_score[v];
    return out;
}

inline std::map<std::string, double> edge_betweenness(const GeoGraph& g) {
    auto pass = detail::brandes_all(g);
    std::map<std::string, double> out;
    for (int e = 0; e < g.edge_count(); ++e) out[g.edges()[e].id] = pass.edge_score[e];
    return out;
}

inline int diameter(const GeoGraph& g) {
    const int n = g.node_count();
    const auto adj = detail::path_adjacency(g);
    int best = 0;
    std::vector<int> dist(n);
    for (int s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::deque<int> queue{s};
        dist[s] = 0;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            best = std::max(best, dist[v]);
            for (auto [w, ei] : adj[v]) {
                (void)ei;
                if (dist[w] < 0) {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    return best;
}

// Girvan-Newman: repeatedly recompute edge betweenness on the remaining
// graph and remove the single highest-scoring edge (ties: lowest edge id)
// until the component count reaches `target`. With no target the loop runs
// to full fragmentation, i.e. singleton groups.
inline NodePartition communities(const GeoGraph& g, std::optional<int> target = {}) {
    const int n = g.node_count();
    int goal = target.value_or(n);
    if (target) {
        if (*target > n) throw std::invalid_argument("community target exceeds node count");
        int current = static_cast<int>(connected_components(g).groups.size());
        if (*target < current)
            throw std::invalid_argument("community target below component count");
    }

    std::vector<GeoNode> nodes = g.nodes();
    std::vector<EdgeRecord> records;
    records.reserve(g.edges().size());
    for (const GeoEdge& e : g.edges())
        records.push_back({e.id, e.tail, e.head, e.kind});

    GeoGraph work = build_graph(nodes, records, g.length_mode());
    while (true) {
        NodePartition part = connected_components(work);
        if (static_cast<int>(part.groups.size()) >= goal || work.edge_count() == 0)
            return part;
        auto pass = detail::brandes_all(work);
        int best = 0;
        for (int e = 1; e < work.edge_count(); ++e)
            if (pass.edge_score[e] > pass.edge_score[best]) best = e;
        std::vector<EdgeRecord> kept;
        kept.reserve(work.edge_count() - 1);
        for (int e = 0; e < work.edge_count(); ++e) {
            if (e == best) continue;
            const GeoEdge& ge = work.edges()[e];
            kept.push_back({ge.id, ge.tail, ge.head, ge.kind});
        }
        work = build_graph(nodes, kept, g.length_mode());
    }
}

// Partition labels keyed by node id; each label is the lowest id in the group.
inline std::map<std::string, std::string> partition_labels(const GeoGraph& g,
                                                           const NodePartition& part) {
    std::map<std::string, std::string> out;
    for (int v = 0; v < g.node_count(); ++v) {
        const std::vector<int>& grp = part.groups[part.group_of[v]];
        out[g.nodes()[v].id] = g.nodes()[grp.front()].id;
    }
    return out;
}

}  // namespace snr
