// Command-line front end: graph statistics, intensity tables, covariate
// summaries, model fitting and comparison, and point-pattern simulation.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "snr/snr.hpp"

namespace fs = std::filesystem;
using namespace snr;

namespace {

struct GraphInputs {
    std::string nodes_csv;
    std::string edges_csv;
    std::string geojson;
    std::string length = "euclidean";

    void attach(CLI::App* cmd, bool required = true) {
        auto* n = cmd->add_option("--nodes", nodes_csv, "nodes CSV (id,x,y)");
        auto* e = cmd->add_option("--edges", edges_csv, "edges CSV (id,tail,head,directed)");
        auto* gj = cmd->add_option("--geojson", geojson,
                                   "GeoJSON FeatureCollection instead of --nodes/--edges");
        cmd->add_option("--length", length, "edge length mode")
            ->check(CLI::IsMember({"euclidean", "squared"}));
        e->needs(n);
        gj->excludes(n);
        if (required) {
            // one of the two input styles must be present; checked in load()
        }
    }

    GeoGraph load() const {
        LengthMode mode = length == "squared" ? LengthMode::squared : LengthMode::euclidean;
        if (!geojson.empty()) {
            auto g = read_geojson(geojson);
            return build_graph(g.nodes, g.edges, mode);
        }
        if (nodes_csv.empty() || edges_csv.empty())
            throw std::runtime_error("need --nodes and --edges (or --geojson)");
        return build_graph(read_nodes_csv(nodes_csv), read_edges_csv(edges_csv), mode);
    }
};

struct AssignInputs {
    std::string events_csv;
    double tolerance = -1.0; // negative: use the scale-free default
    std::string assign = "snap";

    void attach(CLI::App* cmd) {
        cmd->add_option("--events", events_csv, "events CSV (x,y[,mark])")->required();
        cmd->add_option("--tolerance", tolerance,
                        "snapping tolerance (default: 1% of the bounding-box diagonal)");
        cmd->add_option("--assign", assign, "event-to-edge assignment mode")
            ->check(CLI::IsMember({"snap", "paper-box"}));
    }

    EdgeAssignment load(const GeoGraph& graph) const {
        double tol = tolerance >= 0.0 ? tolerance : default_tolerance(graph);
        AssignMode mode = assign == "paper-box" ? AssignMode::paper_box : AssignMode::snap;
        return assign_events(graph, read_events_csv(events_csv), tol, mode);
    }
};

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
    fs::create_directories(dir);
    return dir;
}

std::string fmt(double v) { return format_double(v); }

int run_stats(const GraphInputs& gi, int communities_target, const std::string& out) {
    GeoGraph g = gi.load();
    fs::path dir = ensure_out_dir(out);
    std::ostringstream os;

    long undirected = 0, directed = 0;
    for (const auto& e : g.edges()) (e.kind == EdgeKind::undirected ? undirected : directed)++;
    os << "nodes " << g.node_count() << "\n";
    os << "edges " << g.edge_count() << " (undirected " << undirected << ", directed "
       << directed << ")\n";

    std::map<int, int> distribution;
    double degree_sum = 0.0;
    for (const auto& n : g.nodes()) {
        int d = degree(g, n.id, DegreeMode::cg);
        distribution[d] += 1;
        degree_sum += d;
    }
    os << "degree distribution";
    for (const auto& [d, count] : distribution) os << " " << d << ":" << count;
    os << "\n";
    os << "mean degree " << fmt(degree_sum / std::max(g.node_count(), 1)) << "\n";

    os << "components " << connected_components(g).groups.size() << "\n";
    os << "diameter " << diameter(g) << "\n";

    auto b = betweenness(g);
    double bmax = 0.0, bsum = 0.0;
    for (const auto& [id, v] : b) {
        bmax = std::max(bmax, v);
        bsum += v;
    }
    os << "betweenness mean " << fmt(g.node_count() ? bsum / g.node_count() : 0.0)
       << " max " << fmt(bmax) << "\n";

    if (communities_target > 0) {
        auto part = communities(g, communities_target);
        os << "communities " << part.groups.size() << "\n";
        auto labels = partition_labels(g, part);
        CsvWriter w((dir / "communities.csv").string());
        w.row({"node_id", "community"});
        for (const auto& [node, label] : labels) w.row({node, label});
    }

    std::cout << os.str();
    std::ofstream file(dir / "stats.txt");
    file << os.str();
    return 0;
}

int run_intensity(const GraphInputs& gi, const AssignInputs& ai, const std::string& out) {
    GeoGraph g = gi.load();
    auto assignment = ai.load(g);
    auto table = intensity_table(assignment, g);
    fs::path dir = ensure_out_dir(out);

    {
        CsvWriter w((dir / "edge_intensity.csv").string());
        w.row({"edge_id", "count", "length", "intensity"});
        for (int e = 0; e < g.edge_count(); ++e)
            w.row({g.edges()[e].id, std::to_string(table.edges[e].count),
                   fmt(table.edges[e].length), fmt(table.edges[e].intensity)});
    }
    {
        CsvWriter w((dir / "node_intensity.csv").string());
        w.row({"node_id", "mode", "intensity", "defined"});
        for (int v = 0; v < g.node_count(); ++v) {
            for (NodeMode m : kAllNodeModes) {
                auto value = table_node_value(table, v, m);
                w.row({g.nodes()[v].id, node_mode_name(m), value ? fmt(*value) : "",
                       value ? "1" : "0"});
            }
        }
    }
    if (assignment.unassigned > 0)
        std::cerr << "note: " << assignment.unassigned
                  << " event(s) fell outside the snapping tolerance\n";
    std::cout << "wrote " << (dir / "edge_intensity.csv").string() << " and "
              << (dir / "node_intensity.csv").string() << "\n";
    return 0;
}

int run_summarize(const std::string& covariates_csv, const std::string& out) {
    CovariateTable table = read_covariates_csv(covariates_csv);
    fs::path dir = ensure_out_dir(out);
    CsvWriter w((dir / "covariate_summary.csv").string());
    w.row({"covariate", "Min", "1st Q", "Median", "Mean", "3rd Q", "Max"});
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        std::vector<double> values;
        bool numeric = true;
        for (const auto& [node, row] : table.by_node) {
            if (row[c].empty()) continue;
            try {
                values.push_back(parse_double(row[c], table.names[c]));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric || values.empty()) continue;
        auto s = summarize_values(values);
        w.row({table.names[c], fmt(s.min), fmt(s.q1), fmt(s.median), fmt(s.mean), fmt(s.q3),
               fmt(s.max)});
    }
    std::cout << "wrote " << (dir / "covariate_summary.csv").string() << "\n";
    return 0;
}

SNRFit fit_one_model(const GeoGraph& g, const IntensityTable& table,
                     const CovariateTable& covariates, const std::string& model_path,
                     const std::string& lattice_csv, bool log_iterations) {
    SNRSpec spec = read_model_config(model_path);
    if (spec.lattice) {
        if (lattice_csv.empty())
            throw std::runtime_error(model_path + ": model has an mrf term; pass --lattice");
        spec.lattice->node_region = read_node_regions_csv(lattice_csv);
    }
    auto design = build_design(g, table, covariates, spec);
    auto fit = fit_snr(design);
    if (log_iterations)
        for (const auto& rec : fit.result.trace) std::cout << convergence_line(rec) << "\n";
    if (!fit.result.converged)
        std::cerr << "warning: " << spec.name << " did not converge after "
                  << fit.result.iterations << " iterations\n";
    return fit;
}

void write_criteria_csv(const std::string& path, const std::vector<SNRFit>& fits) {
    CsvWriter w(path);
    w.row({"model", "aic", "bic", "gcv", "edf", "loglik"});
    for (const auto& f : fits) {
        auto c = criteria(f.result, f.design.design.rows());
        w.row({f.name(), fmt(c.aic), fmt(c.bic), fmt(c.gcv), fmt(c.edf), fmt(c.loglik)});
    }
}

int run_fit(const GraphInputs& gi, const AssignInputs& ai, const std::string& covariates_csv,
            const std::string& model_path, const std::string& lattice_csv,
            const std::string& out) {
    GeoGraph g = gi.load();
    auto table = intensity_table(ai.load(g), g);
    CovariateTable covariates =
        covariates_csv.empty() ? CovariateTable{} : read_covariates_csv(covariates_csv);
    SNRFit fit = fit_one_model(g, table, covariates, model_path, lattice_csv, true);
    fs::path dir = ensure_out_dir(out);

    {
        CsvWriter w((dir / "coefficients.csv").string());
        w.row({"name", "Estimate", "Std. Error", "t value", "Pr(>|t|)"});
        for (const auto& row : coefficient_table(fit.result))
            w.row({row.name, fmt(row.estimate), fmt(row.std_error), fmt(row.t_value),
                   fmt(row.p_value)});
    }
    write_criteria_csv((dir / "criteria.csv").string(), {fit});
    {
        CsvWriter w((dir / "fitted.csv").string());
        w.row({"node_id", "response", "offset", "fitted_intensity"});
        for (int i = 0; i < fit.design.design.rows(); ++i)
            w.row({fit.design.row_nodes[i], fmt(fit.design.design.y[i]),
                   fmt(fit.design.design.offset[i]), fmt(fit.fitted_intensity[i])});
    }
    for (const auto& enc : fit.design.smooths) {
        std::vector<double> grid;
        const int points = 100;
        for (int i = 0; i <= points; ++i)
            grid.push_back(enc.config.domain_min +
                           (enc.config.domain_max - enc.config.domain_min) * i / points);
        auto curve = evaluate_smooth(fit, enc.covariate, grid);
        CsvWriter w((dir / ("smooth_" + enc.covariate + ".csv")).string());
        w.row({"x", "fit", "lower80", "upper80", "lower95", "upper95"});
        for (const auto& pt : curve)
            w.row({fmt(pt.x), fmt(pt.fit), fmt(pt.lower[0]), fmt(pt.upper[0]),
                   fmt(pt.lower[1]), fmt(pt.upper[1])});
    }
    std::cout << "wrote fit outputs to " << dir.string() << "\n";
    return 0;
}

int run_compare(const GraphInputs& gi, const AssignInputs& ai,
                const std::string& covariates_csv, const std::vector<std::string>& models,
                const std::string& lattice_csv, const std::string& out) {
    GeoGraph g = gi.load();
    auto table = intensity_table(ai.load(g), g);
    CovariateTable covariates =
        covariates_csv.empty() ? CovariateTable{} : read_covariates_csv(covariates_csv);
    std::vector<SNRFit> fits;
    for (const std::string& path : models)
        fits.push_back(fit_one_model(g, table, covariates, path, lattice_csv, false));
    auto rows = compare_models(fits);
    fs::path dir = ensure_out_dir(out);
    CsvWriter w((dir / "comparison.csv").string());
    w.row({"model", "aic", "bic", "gcv", "edf", "loglik", "best"});
    for (const auto& r : rows) {
        std::string best;
        if (r.best_aic) best += "aic";
        if (r.best_bic) best += best.empty() ? "bic" : ";bic";
        if (r.best_gcv) best += best.empty() ? "gcv" : ";gcv";
        w.row({r.model, fmt(r.criteria.aic), fmt(r.criteria.bic), fmt(r.criteria.gcv),
               fmt(r.criteria.edf), fmt(r.criteria.loglik), best});
    }
    std::cout << "wrote " << (dir / "comparison.csv").string() << "\n";
    return 0;
}

// --intensity accepts either a plain number or exp(b0 + b1*cov + ...).
void parse_intensity_expression(const std::string& text, SimSpec& spec) {
    try {
        std::size_t used = 0;
        double value = std::stod(text, &used);
        if (used == text.size()) {
            spec.constant_intensity = value;
            return;
        }
    } catch (const std::exception&) {
    }
    std::string inner = text;
    if (inner.rfind("exp(", 0) != 0 || inner.back() != ')')
        throw std::runtime_error("--intensity must be a number or exp(b0 + b1*name + ...)");
    inner = inner.substr(4, inner.size() - 5);

    SimSpec::LogLinear ll;
    std::string term;
    auto flush = [&](std::string t) {
        // strip spaces
        std::string s;
        for (char ch : t)
            if (!isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
        if (s.empty()) return;
        auto star = s.find('*');
        if (star == std::string::npos) {
            try {
                std::size_t used = 0;
                double v = std::stod(s, &used);
                if (used != s.size()) throw std::runtime_error("trailing");
                ll.intercept += v;
                return;
            } catch (const std::exception&) {
            }
            double sign = 1.0;
            if (!s.empty() && s[0] == '-') {
                sign = -1.0;
                s = s.substr(1);
            }
            ll.terms.emplace_back(s, sign);
        } else {
            std::size_t used = 0;
            double coef = std::stod(s.substr(0, star), &used);
            if (used != star)
                throw std::runtime_error("bad coefficient in intensity term '" + s + "'");
            ll.terms.emplace_back(s.substr(star + 1), coef);
        }
    };
    std::string current;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        char ch = inner[i];
        if (ch == '+' || (ch == '-' && i > 0 && inner[i - 1] != '*')) {
            flush(current);
            current = ch == '-' ? "-" : "";
        } else {
            current.push_back(ch);
        }
    }
    flush(current);
    spec.log_linear = std::move(ll);
}

int run_simulate(const std::vector<std::string>& graph_files, const std::string& intensity,
                 const std::string& covariates_csv, std::uint64_t seed,
                 const std::string& length, const std::string& out_file) {
    LengthMode mode = length == "squared" ? LengthMode::squared : LengthMode::euclidean;
    GeoGraph g = build_graph(read_nodes_csv(graph_files[0]), read_edges_csv(graph_files[1]),
                             mode);
    SimSpec spec;
    spec.seed = seed;
    parse_intensity_expression(intensity, spec);
    if (spec.log_linear) {
        if (covariates_csv.empty())
            throw std::runtime_error("a log-linear intensity needs --covariates");
        CovariateTable table = read_covariates_csv(covariates_csv);
        for (const auto& [name, coef] : spec.log_linear->terms) {
            int col = table.column(name);
            if (col < 0) throw std::runtime_error("unknown covariate '" + name + "'");
            for (const auto& [node, row] : table.by_node)
                spec.node_covariates[name][node] = parse_double(row[col], name);
        }
    }
    PointPattern pattern = simulate(g, spec);
    write_events_csv(out_file, pattern);
    std::cout << "wrote " << pattern.events.size() << " events to " << out_file << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"network intensity functions and structured network regression"};
    app.require_subcommand(1);

    GraphInputs stats_gi, int_gi, fit_gi, cmp_gi;
    AssignInputs int_ai, fit_ai, cmp_ai;
    std::string out_dir;
    int communities_target = 0;

    auto* stats = app.add_subcommand("stats", "graph summary statistics");
    stats_gi.attach(stats);
    stats->add_option("--communities", communities_target,
                      "also report Girvan-Newman communities for this target count");
    stats->add_option("--out", out_dir, "output directory");

    auto* intensity = app.add_subcommand("intensity", "edge and node intensity tables");
    int_gi.attach(intensity);
    int_ai.attach(intensity);
    intensity->add_option("--out", out_dir, "output directory");

    std::string covariates_csv;
    auto* summarize = app.add_subcommand("summarize", "per-covariate summary statistics");
    summarize->add_option("--covariates", covariates_csv, "covariates CSV (node_id,...)")
        ->required();
    summarize->add_option("--out", out_dir, "output directory");

    std::string fit_covariates, fit_model, fit_lattice;
    auto* fit = app.add_subcommand("fit", "fit one structured network regression model");
    fit_gi.attach(fit);
    fit_ai.attach(fit);
    fit->add_option("--covariates", fit_covariates, "covariates CSV (node_id,...)");
    fit->add_option("--model", fit_model, "model config file")->required();
    fit->add_option("--lattice", fit_lattice, "node-to-region CSV (node_id,region_id)");
    fit->add_option("--out", out_dir, "output directory");

    std::string cmp_covariates, cmp_lattice;
    std::vector<std::string> cmp_models;
    auto* compare = app.add_subcommand("compare", "fit and compare several models");
    cmp_gi.attach(compare);
    cmp_ai.attach(compare);
    compare->add_option("--covariates", cmp_covariates, "covariates CSV (node_id,...)");
    compare->add_option("--model", cmp_models, "model config file (repeatable)")
        ->required()
        ->take_all();
    compare->add_option("--lattice", cmp_lattice, "node-to-region CSV (node_id,region_id)");
    compare->add_option("--out", out_dir, "output directory");

    std::vector<std::string> sim_graph;
    std::string sim_intensity, sim_covariates, sim_length = "euclidean";
    std::string sim_out = "events.csv";
    std::uint64_t sim_seed = 0;
    auto* simulate = app.add_subcommand("simulate", "draw a Poisson pattern on a network");
    simulate->add_option("--graph", sim_graph, "nodes CSV and edges CSV")
        ->expected(2)
        ->required();
    simulate
        ->add_option("--intensity", sim_intensity,
                     "constant, or exp(b0 + b1*cov + ...) over node covariates")
        ->required();
    simulate->add_option("--covariates", sim_covariates, "covariates CSV (node_id,...)");
    simulate->add_option("--seed", sim_seed, "RNG seed");
    simulate->add_option("--length", sim_length, "edge length mode")
        ->check(CLI::IsMember({"euclidean", "squared"}));
    simulate->add_option("--out", sim_out, "output events CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (stats->parsed()) return run_stats(stats_gi, communities_target, out_dir);
        if (intensity->parsed()) return run_intensity(int_gi, int_ai, out_dir);
        if (summarize->parsed()) return run_summarize(covariates_csv, out_dir);
        if (fit->parsed())
            return run_fit(fit_gi, fit_ai, fit_covariates, fit_model, fit_lattice, out_dir);
        if (compare->parsed())
            return run_compare(cmp_gi, cmp_ai, cmp_covariates, cmp_models, cmp_lattice,
                               out_dir);
        if (simulate->parsed())
            return run_simulate(sim_graph, sim_intensity, sim_covariates, sim_seed,
                                sim_length, sim_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
