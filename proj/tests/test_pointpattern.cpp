#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "snr/geograph.hpp"
#include "snr/point_pattern.hpp"

using namespace snr;

namespace {

GeoGraph horizontal_edge() {
    return build_graph({{"a", 0, 0}, {"b", 10, 0}}, {{"e1", "a", "b", EdgeKind::undirected}});
}

}  // namespace

TEST_CASE("snap assigns nearest edge within tolerance") {
    auto g = horizontal_edge();
    PointPattern p{{{5.0, 0.0, ""}}};
    auto a = assign_events(g, p, 1.0);
    REQUIRE(a.matches[0].size() == 1);
    CHECK(a.matches[0][0].edge == 0);
    CHECK(a.matches[0][0].distance == 0.0);
    CHECK(a.edge_counts[0] == 1);
    CHECK(a.assigned == 1);
}

TEST_CASE("snap leaves distant events unassigned") {
    auto g = horizontal_edge();
    PointPattern p{{{5.0, 5.0, ""}}};
    auto a = assign_events(g, p, 1.0);
    CHECK(a.matches[0].empty());
    CHECK(a.unassigned == 1);
    CHECK(a.edge_counts[0] == 0);
}

TEST_CASE("snap ties break to the lowest edge id") {
    // two parallel horizontal edges, event equidistant between them
    auto g = build_graph({{"a", 0, 0}, {"b", 10, 0}, {"c", 0, 2}, {"d", 10, 2}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "c", "d", EdgeKind::undirected}});
    double d1 = detail::point_segment_distance(5, 1, 0, 0, 10, 0);
    double d2 = detail::point_segment_distance(5, 1, 0, 2, 10, 2);
    REQUIRE(d1 == d2);
    PointPattern p{{{5.0, 1.0, ""}}};
    auto a = assign_events(g, p, 2.0);
    REQUIRE(a.matches[0].size() == 1);
    CHECK(a.matches[0][0].edge == g.edge_index("e1"));
}

TEST_CASE("negative tolerance is rejected") {
    auto g = horizontal_edge();
    CHECK_THROWS(assign_events(g, PointPattern{}, -1.0));
}

TEST_CASE("paper_box counts an event on every covering box") {
    // two slanted edges with overlapping bounding boxes
    auto g = build_graph({{"a", 0, 0}, {"b", 4, 4}, {"c", 0, 4}, {"d", 4, 0}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "c", "d", EdgeKind::undirected}});
    PointPattern p{{{2.0, 2.1, ""}}};
    auto a = assign_events(g, p, 0.0, AssignMode::paper_box);
    CHECK(a.matches[0].size() == 2);
    CHECK(a.edge_counts[0] == 1);
    CHECK(a.edge_counts[1] == 1);

    // an event outside both boxes stays unassigned
    PointPattern q{{{9.0, 9.0, ""}}};
    auto b = assign_events(g, q, 0.0, AssignMode::paper_box);
    CHECK(b.unassigned == 1);
}

TEST_CASE("count_measure") {
    auto g = build_graph({{"a", 0, 0}, {"b", 10, 0}, {"c", 10, 10}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "b", "c", EdgeKind::undirected}});
    PointPattern p;
    p.events = {{2, 0, ""}, {4, 0, ""}, {6, 0, ""}, {10, 5, ""}};
    auto a = assign_events(g, p, 0.5);
    CHECK(count_measure(a, g, "e1") == 3);
    CHECK(count_measure(a, g, "e2") == 1);
    CHECK_THROWS(count_measure(a, g, "nope"));

    auto empty = assign_events(g, PointPattern{}, 0.5);
    CHECK(count_measure(empty, g, "e1") == 0);
}

TEST_CASE("snap mode never double counts and tolerance is monotone") {
    std::mt19937 rng(303);
    std::uniform_real_distribution<double> coord(-2.0, 12.0);
    auto g = build_graph({{"a", 0, 0}, {"b", 10, 0}, {"c", 10, 6}, {"d", 0, 6}},
                         {{"e1", "a", "b", EdgeKind::undirected},
                          {"e2", "b", "c", EdgeKind::undirected},
                          {"e3", "c", "d", EdgeKind::undirected}});
    for (int rep = 0; rep < 25; ++rep) {
        PointPattern p;
        for (int i = 0; i < 50; ++i) p.events.push_back({coord(rng), coord(rng), ""});
        auto tight = assign_events(g, p, 0.5);
        long total = 0;
        for (long c : tight.edge_counts) total += c;
        REQUIRE(total == tight.assigned);

        auto loose = assign_events(g, p, 2.0);
        for (std::size_t i = 0; i < p.events.size(); ++i)
            if (!tight.matches[i].empty()) REQUIRE(!loose.matches[i].empty());

        // assignment depends only on geometry: reversing the event order
        // permutes the per-event matches but nothing else
        PointPattern rev = p;
        std::reverse(rev.events.begin(), rev.events.end());
        auto back = assign_events(g, rev, 0.5);
        REQUIRE(back.edge_counts == tight.edge_counts);
        for (std::size_t i = 0; i < p.events.size(); ++i) {
            auto& lhs = tight.matches[i];
            auto& rhs = back.matches[p.events.size() - 1 - i];
            REQUIRE(lhs.size() == rhs.size());
            for (std::size_t k = 0; k < lhs.size(); ++k)
                REQUIRE(lhs[k].edge == rhs[k].edge);
        }
    }
}

TEST_CASE("default tolerance scales with the graph bounding box") {
    auto g = horizontal_edge();
    CHECK_THAT(default_tolerance(g), Catch::Matchers::WithinRel(0.1, 1e-12));
}
