#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snr/family.hpp"
#include "snr/geograph.hpp"
#include "snr/intensity.hpp"
#include "snr/mixed_model.hpp"
#include "snr/spline.hpp"
#include "snr/stats_util.hpp"

namespace snr {

enum class ResponseType { node_counts_with_offset, node_mean_intensity };

struct FixedTermSpec {
    std::string name;
    bool categorical = false;
    std::string reference; // required when categorical
};

enum class DegreeTermKind { categorical, numeric };

struct SmoothTermSpec {
    std::string covariate;
    int degree = 3;
    int inner_knots = 20;
    int penalty_order = 2;
};

struct LatticeSpec {
    std::map<std::string, std::string> node_region;
    LatticeAdjacency adjacency;
};

struct SNRSpec {
    std::string name = "model";
    ResponseType response = ResponseType::node_counts_with_offset;
    NodeMode mode = NodeMode::undirected;
    Family family = Family::poisson();
    std::vector<FixedTermSpec> fixed;
    std::optional<DegreeTermKind> degree_term;
    bool betweenness_term = false;
    bool component_size_term = false;
    std::vector<SmoothTermSpec> smooths;
    std::optional<LatticeSpec> lattice;
    bool exclude_zero = true; // drop zero-intensity nodes from the rows

    void validate() const {
        std::set<std::string> fixed_names;
        for (const auto& f : fixed) fixed_names.insert(f.name);
        for (const auto& s : smooths)
            if (fixed_names.count(s.covariate))
                throw std::invalid_argument("covariate '" + s.covariate +
                                            "' appears in both fixed and smooth terms");
    }
};

// Per-node covariate table; values kept as text so categorical levels pass
// through unchanged.
struct CovariateTable {
    std::vector<std::string> names;
    std::map<std::string, std::vector<std::string>> by_node;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return static_cast<int>(i);
        return -1;
    }

    const std::string& value(const std::string& node, int col) const {
        auto it = by_node.find(node);
        if (it == by_node.end())
            throw std::invalid_argument("no covariate row for node " + node);
        return it->second[col];
    }
};

// New observations handed to predict(): named columns, one row per
// prediction point.
struct PredictionRows {
    std::map<std::string, std::vector<std::string>> columns;
    Eigen::VectorXd offset; // empty -> zeros

    int rows() const {
        return columns.empty() ? 0 : static_cast<int>(columns.begin()->second.size());
    }
    const std::vector<std::string>& column(const std::string& name) const {
        auto it = columns.find(name);
        if (it == columns.end())
            throw std::invalid_argument("prediction rows lack column '" + name + "'");
        return it->second;
    }
};

struct CategoricalEncoder {
    std::string column;
    std::vector<std::string> levels; // non-reference, sorted
    std::string reference;
};

struct SmoothEncoder {
    std::string covariate;
    SplineConfig config;      // domain resolved from the data
    CenteredTerm centering;
    int block_index = -1;
};

struct LatticeEncoder {
    std::vector<std::string> regions;
    std::map<std::string, std::string> node_region;
    CenteredTerm centering;
    int block_index = -1;
};

// A ModelDesign plus everything needed to rebuild rows for prediction.
struct SNRDesign {
    ModelDesign design;
    std::vector<std::string> row_nodes;
    std::vector<CategoricalEncoder> fixed_categorical; // aligned with Z layout
    std::vector<std::string> numeric_fixed;            // column names in order
    std::vector<std::string> w_columns;                // graph statistic names
    std::optional<CategoricalEncoder> degree_encoder;  // set for categorical degree
    std::vector<SmoothEncoder> smooths;
    std::optional<LatticeEncoder> lattice;
    SNRSpec spec;
};

namespace detail {

inline double parse_numeric_covariate(const std::string& raw, const std::string& name,
                                      const std::string& node) {
    try {
        std::size_t used = 0;
        double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument("trailing data");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse covariate '" + name + "' value '" + raw +
                                    "' for node " + node);
    }
}

inline void report_missing(const std::vector<std::string>& missing, const std::string& what) {
    if (missing.empty()) return;
    std::ostringstream os;
    os << "missing " << what << " for " << missing.size() << " node(s):";
    for (std::size_t i = 0; i < missing.size() && i < 8; ++i) os << " " << missing[i];
    if (missing.size() > 8) os << " ...";
    throw std::invalid_argument(os.str());
}

}  // namespace detail

inline SNRDesign build_design(const GeoGraph& graph, const IntensityTable& table,
                              const CovariateTable& covariates, const SNRSpec& spec) {
    spec.validate();
    SNRDesign out;
    out.spec = spec;

    // 1. Select rows: nodes whose mode class is non-empty, with zero
    //    intensity optionally excluded.
    std::vector<int> rows;
    for (int v = 0; v < graph.node_count(); ++v) {
        auto value = table_node_value(table, v, spec.mode);
        if (!value) continue;
        if (spec.exclude_zero && *value == 0.0) continue;
        rows.push_back(v);
    }
    if (rows.empty()) throw std::invalid_argument("empty design after exclusions");

    const int n = static_cast<int>(rows.size());
    for (int r : rows) out.row_nodes.push_back(graph.nodes()[r].id);

    // 2. Response and offset.
    Eigen::VectorXd y(n), offset(n);
    for (int i = 0; i < n; ++i) {
        int v = rows[i];
        std::vector<int> cls = detail::mode_edges(graph, v, spec.mode);
        if (spec.response == ResponseType::node_counts_with_offset) {
            long count = 0;
            double exposure = 0.0;
            for (int e : cls) {
                count += table.edges[e].count;
                exposure += table.edges[e].length;
            }
            y[i] = static_cast<double>(count);
            offset[i] = std::log(exposure);
        } else {
            y[i] = *table_node_value(table, v, spec.mode);
            offset[i] = 0.0;
        }
    }

    // 3. Fixed-effect block Z: intercept, numeric covariates, categorical
    //    expansions.
    std::vector<std::string> missing;
    std::vector<Eigen::VectorXd> z_cols;
    std::vector<std::string> z_names;
    z_cols.push_back(Eigen::VectorXd::Ones(n));
    z_names.push_back("(Intercept)");

    for (const FixedTermSpec& term : spec.fixed) {
        int col = covariates.column(term.name);
        if (col < 0) throw std::invalid_argument("unknown covariate '" + term.name + "'");
        missing.clear();
        std::vector<std::string> raw(n);
        for (int i = 0; i < n; ++i) {
            auto it = covariates.by_node.find(out.row_nodes[i]);
            if (it == covariates.by_node.end() || it->second[col].empty()) {
                missing.push_back(out.row_nodes[i]);
                continue;
            }
            raw[i] = it->second[col];
        }
        detail::report_missing(missing, "covariate '" + term.name + "'");

        if (!term.categorical) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i)
                x[i] = detail::parse_numeric_covariate(raw[i], term.name, out.row_nodes[i]);
            z_cols.push_back(x);
            z_names.push_back(term.name);
            out.numeric_fixed.push_back(term.name);
        } else {
            std::set<std::string> level_set(raw.begin(), raw.end());
            if (!level_set.count(term.reference))
                throw std::invalid_argument("reference level '" + term.reference +
                                            "' of '" + term.name + "' not present in the data");
            CategoricalEncoder enc;
            enc.column = term.name;
            enc.reference = term.reference;
            for (const std::string& lv : level_set)
                if (lv != term.reference) enc.levels.push_back(lv);
            for (const std::string& lv : enc.levels) {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                for (int i = 0; i < n; ++i)
                    if (raw[i] == lv) x[i] = 1.0;
                z_cols.push_back(x);
                z_names.push_back(term.name + "=" + lv);
            }
            out.fixed_categorical.push_back(std::move(enc));
        }
    }

    // 4. Graph-statistic block W.
    std::vector<Eigen::VectorXd> w_cols;
    std::vector<std::string> w_names;
    if (spec.degree_term) {
        std::vector<int> deg(n);
        for (int i = 0; i < n; ++i)
            deg[i] = static_cast<int>(detail::mode_edges(graph, rows[i], spec.mode).size());
        if (*spec.degree_term == DegreeTermKind::numeric) {
            Eigen::VectorXd x(n);
            for (int i = 0; i < n; ++i) x[i] = deg[i];
            w_cols.push_back(x);
            w_names.push_back("degree");
            out.w_columns.push_back("degree");
        } else {
            std::set<int> level_set(deg.begin(), deg.end());
            int reference = level_set.count(1) ? 1 : *level_set.begin();
            CategoricalEncoder enc;
            enc.column = "degree";
            enc.reference = std::to_string(reference);
            for (int lv : level_set)
                if (lv != reference) enc.levels.push_back(std::to_string(lv));
            for (const std::string& lv : enc.levels) {
                Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
                for (int i = 0; i < n; ++i)
                    if (std::to_string(deg[i]) == lv) x[i] = 1.0;
                w_cols.push_back(x);
                w_names.push_back("degree=" + lv);
            }
            out.degree_encoder = std::move(enc);
            out.w_columns.push_back("degree");
        }
    }
    if (spec.betweenness_term) {
        auto scores = betweenness(graph);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x[i] = scores.at(out.row_nodes[i]);
        w_cols.push_back(x);
        w_names.push_back("betweenness");
        out.w_columns.push_back("betweenness");
    }
    if (spec.component_size_term) {
        auto part = connected_components(graph);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) {
            int g = part.group_of[graph.node_index(out.row_nodes[i])];
            x[i] = static_cast<double>(part.groups[g].size());
        }
        w_cols.push_back(x);
        w_names.push_back("component_size");
        out.w_columns.push_back("component_size");
    }

    // 5. Penalized blocks: P-spline smooths, then the lattice effect.
    ModelDesign& design = out.design;
    for (const SmoothTermSpec& term : spec.smooths) {
        int col = covariates.column(term.covariate);
        if (col < 0)
            throw std::invalid_argument("unknown covariate '" + term.covariate + "'");
        missing.clear();
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) {
            auto it = covariates.by_node.find(out.row_nodes[i]);
            if (it == covariates.by_node.end() || it->second[col].empty()) {
                missing.push_back(out.row_nodes[i]);
                continue;
            }
            x[i] = detail::parse_numeric_covariate(it->second[col], term.covariate,
                                                   out.row_nodes[i]);
        }
        detail::report_missing(missing, "covariate '" + term.covariate + "'");

        SmoothEncoder enc;
        enc.covariate = term.covariate;
        enc.config = SplineConfig{term.degree, term.inner_knots, term.penalty_order,
                                  *std::min_element(x.begin(), x.end()),
                                  *std::max_element(x.begin(), x.end())};
        enc.config.validate();
        Eigen::MatrixXd basis = bspline_basis(x, enc.config);
        enc.centering = center_term(basis);
        PenaltyMatrix pen = difference_penalty(enc.config.basis_count(), term.penalty_order);
        PenaltyMatrix reduced;
        reduced.K = enc.centering.back.transpose() * pen.K * enc.centering.back;
        reduced.null_dim = std::max(pen.null_dim - 1, 0);
        enc.block_index = static_cast<int>(design.blocks.size());
        design.blocks.push_back({"s(" + term.covariate + ")", enc.centering.basis, reduced});
        out.smooths.push_back(std::move(enc));
    }

    if (spec.lattice) {
        LatticeAdjacency adj = spec.lattice->adjacency;
        missing.clear();
        for (int i = 0; i < n; ++i) {
            auto it = spec.lattice->node_region.find(out.row_nodes[i]);
            if (it == spec.lattice->node_region.end())
                missing.push_back(out.row_nodes[i]);
            else
                adj.add_region(it->second); // regions absent from the pair list stay isolated
        }
        detail::report_missing(missing, "lattice region");

        LatticeEncoder enc;
        enc.regions = adj.region_ids();
        enc.node_region = spec.lattice->node_region;
        std::map<std::string, int> region_index;
        for (std::size_t i = 0; i < enc.regions.size(); ++i)
            region_index[enc.regions[i]] = static_cast<int>(i);
        Eigen::MatrixXd incidence =
            Eigen::MatrixXd::Zero(n, static_cast<int>(enc.regions.size()));
        for (int i = 0; i < n; ++i)
            incidence(i, region_index.at(enc.node_region.at(out.row_nodes[i]))) = 1.0;
        PenaltyMatrix pen = mrf_penalty(adj);
        enc.centering = center_term(incidence);
        PenaltyMatrix reduced;
        reduced.K = enc.centering.back.transpose() * pen.K * enc.centering.back;
        reduced.null_dim = std::max(pen.null_dim - 1, 0);
        enc.block_index = static_cast<int>(design.blocks.size());
        design.blocks.push_back({"mrf(region)", enc.centering.basis, reduced});
        out.lattice = std::move(enc);
    }

    design.y = y;
    design.offset = offset;
    design.Z = Eigen::MatrixXd(n, static_cast<int>(z_cols.size()));
    for (std::size_t c = 0; c < z_cols.size(); ++c) design.Z.col(c) = z_cols[c];
    design.z_names = z_names;
    if (!w_cols.empty()) {
        design.W = Eigen::MatrixXd(n, static_cast<int>(w_cols.size()));
        for (std::size_t c = 0; c < w_cols.size(); ++c) design.W.col(c) = w_cols[c];
    }
    design.w_names = w_names;
    return out;
}

struct SNRFit {
    SNRDesign design;
    FitResult result;
    Eigen::VectorXd fitted_intensity; // per design row

    const std::string& name() const { return design.spec.name; }
};

inline SNRFit fit_snr(const SNRDesign& design, const FitControl& control = {}) {
    if (design.design.rows() == 0) throw std::invalid_argument("empty design");
    SNRFit out;
    out.design = design;
    out.result = fit(design.design, design.spec.family, control);
    const int n = design.design.rows();
    out.fitted_intensity.resize(n);
    for (int i = 0; i < n; ++i) {
        double eta_no_offset = out.result.eta[i] - out.result.offset[i];
        out.fitted_intensity[i] = design.spec.family.inverse_link(eta_no_offset);
    }
    return out;
}

// Linear predictor (without offset) for new rows, re-applying every encoder
// that build_design used.
inline Eigen::VectorXd linear_predictor(const SNRFit& fit, const PredictionRows& rows) {
    const SNRDesign& d = fit.design;
    const int n = rows.rows();
    if (n == 0) throw std::invalid_argument("no prediction rows");
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);

    int zi = 0;
    eta.array() += fit.result.coef[zi++]; // intercept

    std::size_t cat_i = 0;
    for (const FixedTermSpec& term : d.spec.fixed) {
        if (!term.categorical) {
            const auto& col = rows.column(term.name);
            for (int i = 0; i < n; ++i)
                eta[i] += fit.result.coef[zi] *
                          detail::parse_numeric_covariate(col[i], term.name, "row");
            ++zi;
        } else {
            const CategoricalEncoder& enc = d.fixed_categorical[cat_i++];
            const auto& col = rows.column(term.name);
            for (int i = 0; i < n; ++i) {
                const std::string& lv = col[i];
                if (lv == enc.reference) continue;
                auto it = std::find(enc.levels.begin(), enc.levels.end(), lv);
                if (it == enc.levels.end())
                    throw std::invalid_argument("unseen level '" + lv + "' of '" +
                                                term.name + "'");
                eta[i] += fit.result.coef[zi + (it - enc.levels.begin())];
            }
            zi += static_cast<int>(enc.levels.size());
        }
    }

    int wi = fit.result.z_cols;
    if (d.spec.degree_term) {
        if (*d.spec.degree_term == DegreeTermKind::numeric) {
            const auto& col = rows.column("degree");
            for (int i = 0; i < n; ++i)
                eta[i] += fit.result.coef[wi] *
                          detail::parse_numeric_covariate(col[i], "degree", "row");
            ++wi;
        } else {
            const CategoricalEncoder& enc = *d.degree_encoder;
            const auto& col = rows.column("degree");
            for (int i = 0; i < n; ++i) {
                const std::string& lv = col[i];
                if (lv == enc.reference) continue;
                auto it = std::find(enc.levels.begin(), enc.levels.end(), lv);
                if (it == enc.levels.end())
                    throw std::invalid_argument("unseen degree level '" + lv + "'");
                eta[i] += fit.result.coef[wi + (it - enc.levels.begin())];
            }
            wi += static_cast<int>(enc.levels.size());
        }
    }
    if (d.spec.betweenness_term) {
        const auto& col = rows.column("betweenness");
        for (int i = 0; i < n; ++i)
            eta[i] += fit.result.coef[wi] *
                      detail::parse_numeric_covariate(col[i], "betweenness", "row");
        ++wi;
    }
    if (d.spec.component_size_term) {
        const auto& col = rows.column("component_size");
        for (int i = 0; i < n; ++i)
            eta[i] += fit.result.coef[wi] *
                      detail::parse_numeric_covariate(col[i], "component_size", "row");
        ++wi;
    }

    for (const SmoothEncoder& enc : d.smooths) {
        const auto& col = rows.column(enc.covariate);
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i)
            x[i] = detail::parse_numeric_covariate(col[i], enc.covariate, "row");
        Eigen::MatrixXd basis = apply_centering(enc.centering, bspline_basis(x, enc.config));
        eta += basis * fit.result.block_coef(fit.result.blocks[enc.block_index]);
    }

    if (d.lattice) {
        const LatticeEncoder& enc = *d.lattice;
        const auto& col = rows.column("region");
        Eigen::MatrixXd incidence = Eigen::MatrixXd::Zero(n, enc.regions.size());
        for (int i = 0; i < n; ++i) {
            auto it = std::find(enc.regions.begin(), enc.regions.end(), col[i]);
            if (it == enc.regions.end())
                throw std::invalid_argument("unseen region '" + col[i] + "'");
            incidence(i, it - enc.regions.begin()) = 1.0;
        }
        Eigen::MatrixXd centered = apply_centering(enc.centering, incidence);
        eta += centered * fit.result.block_coef(fit.result.blocks[enc.block_index]);
    }
    return eta;
}

// Fitted intensities for new rows: h(offset + linear predictor).
inline Eigen::VectorXd predict(const SNRFit& fit, const PredictionRows& rows) {
    Eigen::VectorXd eta = linear_predictor(fit, rows);
    if (rows.offset.size()) {
        if (rows.offset.size() != eta.size())
            throw std::invalid_argument("offset length mismatch");
        eta += rows.offset;
    }
    Eigen::VectorXd out(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i)
        out[i] = fit.design.spec.family.inverse_link(eta[i]);
    return out;
}

struct SmoothCurvePoint {
    double x = 0.0;
    double fit = 0.0;
    std::vector<double> lower; // per requested level
    std::vector<double> upper;
};

// Smooth-term curve with pointwise Gaussian intervals from the coefficient
// covariance.
inline std::vector<SmoothCurvePoint> evaluate_smooth(const SNRFit& fit,
                                                     const std::string& term,
                                                     const std::vector<double>& grid,
                                                     const std::vector<double>& levels = {0.80,
                                                                                          0.95}) {
    const SmoothEncoder* enc = nullptr;
    for (const SmoothEncoder& e : fit.design.smooths)
        if (e.covariate == term) enc = &e;
    if (!enc) throw std::invalid_argument("'" + term + "' is not a smooth term of this fit");
    for (double x : grid)
        if (!(x >= enc->config.domain_min && x <= enc->config.domain_max))
            throw std::invalid_argument("grid point outside the knot domain");

    const auto& block = fit.result.blocks[enc->block_index];
    Eigen::VectorXd beta = fit.result.block_coef(block);
    Eigen::MatrixXd cov = fit.result.block_covariance(block);
    Eigen::MatrixXd basis = apply_centering(enc->centering, bspline_basis(grid, enc->config));

    std::vector<SmoothCurvePoint> out;
    out.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SmoothCurvePoint pt;
        pt.x = grid[i];
        Eigen::VectorXd row = basis.row(static_cast<Eigen::Index>(i)).transpose();
        pt.fit = row.dot(beta);
        double sd = std::sqrt(std::max(row.dot(cov * row), 0.0));
        for (double level : levels) {
            double z = normal_quantile(0.5 * (1.0 + level));
            pt.lower.push_back(pt.fit - z * sd);
            pt.upper.push_back(pt.fit + z * sd);
        }
        out.push_back(std::move(pt));
    }
    return out;
}

struct ModelComparisonRow {
    std::string model;
    Criteria criteria;
    bool best_aic = false;
    bool best_bic = false;
    bool best_gcv = false;
};

inline std::vector<ModelComparisonRow> compare_models(const std::vector<SNRFit>& fits) {
    if (fits.empty()) throw std::invalid_argument("nothing to compare");
    for (const SNRFit& f : fits) {
        bool same = f.design.design.y.size() == fits[0].design.design.y.size() &&
                    f.design.row_nodes == fits[0].design.row_nodes;
        if (same)
            same = (f.design.design.y.array() == fits[0].design.design.y.array()).all();
        if (!same) throw std::invalid_argument("mismatched response vectors across models");
    }
    std::vector<ModelComparisonRow> rows;
    for (const SNRFit& f : fits) {
        ModelComparisonRow r;
        r.model = f.name();
        r.criteria = criteria(f.result, f.design.design.rows());
        rows.push_back(std::move(r));
    }
    auto mark = [&rows](auto value, auto flag) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (value(rows[i]) < value(rows[best])) best = i;
        flag(rows[best]);
    };
    mark([](const ModelComparisonRow& r) { return r.criteria.aic; },
         [](ModelComparisonRow& r) { r.best_aic = true; });
    mark([](const ModelComparisonRow& r) { return r.criteria.bic; },
         [](ModelComparisonRow& r) { r.best_bic = true; });
    mark([](const ModelComparisonRow& r) { return r.criteria.gcv; },
         [](ModelComparisonRow& r) { r.best_gcv = true; });
    return rows;
}

}  // namespace snr
