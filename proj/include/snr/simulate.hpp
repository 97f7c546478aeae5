#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "snr/geograph.hpp"
#include "snr/point_pattern.hpp"
#include "snr/rng.hpp"

namespace snr {

// Homogeneous-per-edge Poisson pattern generator. The true intensity is
// either one constant or exp of a linear predictor in node covariates, with
// node values averaged onto each edge.
struct SimSpec {
    std::uint64_t seed = 0;

    std::optional<double> constant_intensity;

    struct LogLinear {
        double intercept = 0.0;
        std::vector<std::pair<std::string, double>> terms; // covariate, coefficient
    };
    std::optional<LogLinear> log_linear;

    // covariate name -> node id -> value
    std::map<std::string, std::map<std::string, double>> node_covariates;
};

// Mean of the covariate over the edge's endpoints.
inline double edge_covariate(const GeoGraph& graph, const SimSpec& spec,
                             const std::string& name, int edge) {
    auto it = spec.node_covariates.find(name);
    if (it == spec.node_covariates.end())
        throw std::invalid_argument("unknown simulation covariate: " + name);
    const GeoEdge& e = graph.edges()[edge];
    auto tail = it->second.find(e.tail);
    auto head = it->second.find(e.head);
    if (tail == it->second.end() || head == it->second.end())
        throw std::invalid_argument("covariate " + name + " missing on an endpoint of " + e.id);
    return 0.5 * (tail->second + head->second);
}

inline std::vector<double> true_edge_intensities(const GeoGraph& graph, const SimSpec& spec) {
    if (spec.constant_intensity.has_value() == spec.log_linear.has_value())
        throw std::invalid_argument("specify exactly one of constant or log-linear intensity");
    std::vector<double> lambda(graph.edge_count());
    for (int e = 0; e < graph.edge_count(); ++e) {
        double v;
        if (spec.constant_intensity) {
            v = *spec.constant_intensity;
        } else {
            double eta = spec.log_linear->intercept;
            for (const auto& [name, coef] : spec.log_linear->terms)
                eta += coef * edge_covariate(graph, spec, name, e);
            v = std::exp(eta);
        }
        if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("edge intensity must be finite and >= 0");
        lambda[e] = v;
    }
    return lambda;
}

// Draw one replicate: per edge, count ~ Poisson(lambda_e * length_e) and
// uniform placement along the segment. Fully determined by
// (seed, replicate, edge id order).
inline PointPattern simulate(const GeoGraph& graph, const SimSpec& spec,
                             std::uint64_t replicate = 0) {
    const std::vector<double> lambda = true_edge_intensities(graph, spec);
    PointPattern pattern;
    for (int e = 0; e < graph.edge_count(); ++e) {
        const GeoEdge& ge = graph.edges()[e];
        const GeoNode& tail = graph.nodes()[graph.node_index(ge.tail)];
        const GeoNode& head = graph.nodes()[graph.node_index(ge.head)];
        CounterRng rng(spec.seed, replicate, static_cast<std::uint64_t>(e));
        long count = rng.next_poisson(lambda[e] * ge.length);
        for (long k = 0; k < count; ++k) {
            double t = rng.next_double();
            pattern.events.push_back(
                {tail.x + t * (head.x - tail.x), tail.y + t * (head.y - tail.y), ""});
        }
    }
    return pattern;
}

}  // namespace snr
