#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "snr/geograph.hpp"
#include "snr/intensity.hpp"
#include "snr/point_pattern.hpp"

using namespace snr;

namespace {

// events placed exactly on an edge midpoint, n times
void add_events(PointPattern& p, double x, double y, int n) {
    for (int i = 0; i < n; ++i) p.events.push_back({x, y, ""});
}

}  // namespace

TEST_CASE("edge intensity is count over length") {
    auto g = build_graph({{"a", 0, 0}, {"b", 2, 0}}, {{"e1", "a", "b", EdgeKind::undirected}});
    PointPattern p;
    add_events(p, 1.0, 0.0, 5);
    auto a = assign_events(g, p, 0.1);
    CHECK(edge_intensity(a, g, "e1") == 2.5);

    auto none = assign_events(g, PointPattern{}, 0.1);
    CHECK(edge_intensity(none, g, "e1") == 0.0);
}

TEST_CASE("squared length mode divides by the squared distance") {
    auto g = build_graph({{"a", 0, 0}, {"b", 2, 0}}, {{"e1", "a", "b", EdgeKind::undirected}},
                         LengthMode::squared);
    PointPattern p;
    add_events(p, 1.0, 0.0, 5);
    auto a = assign_events(g, p, 0.1);
    CHECK(edge_intensity(a, g, "e1") == 1.25);
}

TEST_CASE("node intensity averages the incident class") {
    // b--a--c with 1 event on (a,b) of length 1 and 3 events on (a,c) of length 1
    auto g = build_graph({{"a", 0, 0}, {"b", -1, 0}, {"c", 1, 0}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "a", "c", EdgeKind::undirected}});
    PointPattern p;
    add_events(p, -0.5, 0.0, 1);
    add_events(p, 0.5, 0.0, 3);
    auto a = assign_events(g, p, 0.1);
    CHECK(node_intensity(a, g, "a", NodeMode::undirected).value() == 2.0);
    CHECK(node_intensity(a, g, "b", NodeMode::undirected).value() == 1.0);
    CHECK_THROWS(node_intensity(a, g, "zz", NodeMode::undirected));
}

TEST_CASE("directed and combined modes") {
    // one in-edge with intensity 4, no out-edges, one undirected with intensity 2
    auto g = build_graph({{"a", 0, 0}, {"b", -2, 0}, {"c", 1, 0}},
                         {{"e1", "b", "a", EdgeKind::directed},
                          {"e2", "a", "c", EdgeKind::undirected}});
    PointPattern p;
    add_events(p, -1.0, 0.0, 8); // edge e1 has length 2 -> intensity 4
    add_events(p, 0.5, 0.0, 2);  // edge e2 has length 1 -> intensity 2
    auto a = assign_events(g, p, 0.1);
    CHECK(node_intensity(a, g, "a", NodeMode::in).value() == 4.0);
    CHECK_FALSE(node_intensity(a, g, "a", NodeMode::out).has_value());
    CHECK(node_intensity(a, g, "a", NodeMode::cg).value() == 3.0);
    CHECK(node_intensity(a, g, "a", NodeMode::in_out).value() == 4.0);
    CHECK(node_intensity(a, g, "a", NodeMode::und_out).value() == 2.0);
}

TEST_CASE("intensity table covers all edges and nodes") {
    auto g = build_graph({{"a", 0, 0}, {"b", 4, 0}}, {{"e1", "a", "b", EdgeKind::undirected}});
    PointPattern p;
    add_events(p, 2.0, 0.0, 1);
    auto a = assign_events(g, p, 0.1);
    auto t = intensity_table(a, g);
    CHECK(t.edges[0].intensity == 0.25);
    CHECK(table_node_value(t, g.node_index("a"), NodeMode::undirected).value() == 0.25);
    CHECK(table_node_value(t, g.node_index("b"), NodeMode::undirected).value() == 0.25);
    CHECK_FALSE(table_node_value(t, g.node_index("a"), NodeMode::in).has_value());

    auto empty = assign_events(g, PointPattern{}, 0.1);
    auto t0 = intensity_table(empty, g);
    CHECK(t0.edges[0].intensity == 0.0);
    CHECK(table_node_value(t0, 0, NodeMode::undirected).value() == 0.0);
}

TEST_CASE("triangle with events on one edge") {
    auto g = build_graph({{"a", 0, 0}, {"b", 4, 0}, {"c", 0, 3}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "a", "c", EdgeKind::undirected},
                          {"e3", "b", "c", EdgeKind::undirected}});
    PointPattern p;
    add_events(p, 2.0, 0.0, 6); // only on e1 (length 4): intensity 1.5
    auto a = assign_events(g, p, 0.1);
    auto t = intensity_table(a, g);
    // node c touches e2 (len 3) and e3 (len 5), both empty
    CHECK(table_node_value(t, g.node_index("c"), NodeMode::undirected).value() == 0.0);
    // node a touches e1 (1.5) and e2 (0): mean 0.75
    CHECK(table_node_value(t, g.node_index("a"), NodeMode::undirected).value() == 0.75);
}

TEST_CASE("intensity scaling properties") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    auto make = [&](double scale) {
        return build_graph({{"a", 0, 0}, {"b", 4 * scale, 0}, {"c", 0, 3 * scale}},
                           {{"e1", "a", "b", EdgeKind::undirected},
                            {"e2", "a", "c", EdgeKind::undirected}});
    };
    auto g1 = make(1.0);
    auto g2 = make(2.0);
    for (int rep = 0; rep < 20; ++rep) {
        PointPattern p1, p2;
        for (int i = 0; i < 30; ++i) {
            double x = u(rng);
            bool on_e1 = x < 4.0;
            Event ev{on_e1 ? x : 0.0, on_e1 ? 0.0 : x - 4.0, ""};
            p1.events.push_back(ev);
            p2.events.push_back({ev.x * 2, ev.y * 2, ""});
        }
        auto t1 = intensity_table(assign_events(g1, p1, 1e-6), g1);
        auto t2 = intensity_table(assign_events(g2, p2, 1e-6), g2);
        for (int e = 0; e < 2; ++e) {
            REQUIRE(t1.edges[e].count == t2.edges[e].count);
            REQUIRE_THAT(t2.edges[e].intensity,
                         Catch::Matchers::WithinRel(t1.edges[e].intensity * 0.5, 1e-12));
        }

        // duplicating every event doubles every defined intensity
        PointPattern dup = p1;
        dup.events.insert(dup.events.end(), p1.events.begin(), p1.events.end());
        auto td = intensity_table(assign_events(g1, dup, 1e-6), g1);
        for (int v = 0; v < g1.node_count(); ++v) {
            auto base = table_node_value(t1, v, NodeMode::undirected);
            auto twice = table_node_value(td, v, NodeMode::undirected);
            REQUIRE(base.has_value() == twice.has_value());
            if (base) REQUIRE_THAT(*twice, Catch::Matchers::WithinAbs(2.0 * *base, 1e-12));
        }
    }
}

TEST_CASE("cg intensity lies between incident extremes") {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> count(0, 10);
    auto g = build_graph({{"a", 0, 0}, {"b", 2, 0}, {"c", 0, 5}, {"d", -3, 0}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "a", "c", EdgeKind::directed},
                          {"e3", "d", "a", EdgeKind::directed}});
    for (int rep = 0; rep < 25; ++rep) {
        PointPattern p;
        add_events(p, 1.0, 0.0, count(rng));
        add_events(p, 0.0, 2.5, count(rng));
        add_events(p, -1.5, 0.0, count(rng));
        auto a = assign_events(g, p, 0.1);
        auto t = intensity_table(a, g);
        double lo = 1e300, hi = -1e300;
        for (int e = 0; e < 3; ++e) {
            lo = std::min(lo, t.edges[e].intensity);
            hi = std::max(hi, t.edges[e].intensity);
        }
        double cg = table_node_value(t, g.node_index("a"), NodeMode::cg).value();
        REQUIRE(cg >= lo - 1e-12);
        REQUIRE(cg <= hi + 1e-12);

        // equal incident intensities collapse every defined mode to that value
        PointPattern eq;
        add_events(eq, 1.0, 0.0, 4);   // len 2 -> 2.0
        add_events(eq, 0.0, 2.5, 10);  // len 5 -> 2.0
        add_events(eq, -1.5, 0.0, 6);  // len 3 -> 2.0
        auto teq = intensity_table(assign_events(g, eq, 0.1), g);
        for (NodeMode m : kAllNodeModes) {
            auto v = table_node_value(teq, g.node_index("a"), m);
            if (v) REQUIRE_THAT(*v, Catch::Matchers::WithinAbs(2.0, 1e-12));
        }
    }
}
