#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snr/io.hpp"
#include "snr/model.hpp"

namespace snr {

// Line-oriented model configuration:
//
//   response counts|intensity
//   mode undirected|in|out|cg
//   family poisson|gaussian|gamma
//   fixed <name> [categorical ref=<level>]
//   graphstat degree categorical|numeric
//   graphstat betweenness
//   graphstat component_size
//   smooth <name> [degree=<l>] [knots=<k>] [order=<d>]
//   mrf <adjacency-file>
//   exclude-undefined true|false
//
// '#' starts a comment. Relative file references resolve against the config
// file's directory. The node-to-region map is supplied separately (--lattice).
inline SNRSpec read_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    SNRSpec spec;
    spec.name = std::filesystem::path(path).stem().string();
    std::string line;
    int line_no = 0;
    std::string mrf_file;

    auto fail = [&](const std::string& msg) {
        std::ostringstream os;
        os << path << ":" << line_no << ": " << msg << " (line: '" << line << "')";
        throw std::runtime_error(os.str());
    };

    while (std::getline(in, line)) {
        ++line_no;
        std::string text = line.substr(0, line.find('#'));
        std::istringstream is(text);
        std::string keyword;
        if (!(is >> keyword)) continue;

        if (keyword == "response") {
            std::string v;
            if (!(is >> v)) fail("response needs a value");
            if (v == "counts")
                spec.response = ResponseType::node_counts_with_offset;
            else if (v == "intensity")
                spec.response = ResponseType::node_mean_intensity;
            else
                fail("unknown response '" + v + "'");
        } else if (keyword == "mode") {
            std::string v;
            if (!(is >> v)) fail("mode needs a value");
            if (v == "undirected") spec.mode = NodeMode::undirected;
            else if (v == "in") spec.mode = NodeMode::in;
            else if (v == "out") spec.mode = NodeMode::out;
            else if (v == "cg") spec.mode = NodeMode::cg;
            else fail("unknown mode '" + v + "'");
        } else if (keyword == "family") {
            std::string v;
            if (!(is >> v)) fail("family needs a value");
            try {
                spec.family = Family::parse(v);
            } catch (const std::exception& e) {
                fail(e.what());
            }
        } else if (keyword == "fixed") {
            FixedTermSpec term;
            if (!(is >> term.name)) fail("fixed needs a covariate name");
            std::string opt;
            while (is >> opt) {
                if (opt == "categorical")
                    term.categorical = true;
                else if (opt.rfind("ref=", 0) == 0)
                    term.reference = opt.substr(4);
                else
                    fail("unknown fixed option '" + opt + "'");
            }
            if (term.categorical && term.reference.empty())
                fail("categorical fixed term needs ref=<level>");
            spec.fixed.push_back(std::move(term));
        } else if (keyword == "graphstat") {
            std::string stat;
            if (!(is >> stat)) fail("graphstat needs a statistic");
            if (stat == "degree") {
                std::string kind;
                if (!(is >> kind)) fail("graphstat degree needs categorical|numeric");
                if (kind == "categorical") spec.degree_term = DegreeTermKind::categorical;
                else if (kind == "numeric") spec.degree_term = DegreeTermKind::numeric;
                else fail("unknown degree kind '" + kind + "'");
            } else if (stat == "betweenness") {
                spec.betweenness_term = true;
            } else if (stat == "component_size") {
                spec.component_size_term = true;
            } else {
                fail("unknown graph statistic '" + stat + "'");
            }
        } else if (keyword == "smooth") {
            SmoothTermSpec term;
            if (!(is >> term.covariate)) fail("smooth needs a covariate name");
            std::string opt;
            while (is >> opt) {
                auto eq = opt.find('=');
                if (eq == std::string::npos) fail("smooth options look like key=value");
                std::string key = opt.substr(0, eq);
                int value = 0;
                try {
                    value = std::stoi(opt.substr(eq + 1));
                } catch (const std::exception&) {
                    fail("bad smooth option value in '" + opt + "'");
                }
                if (key == "degree") term.degree = value;
                else if (key == "knots") term.inner_knots = value;
                else if (key == "order") term.penalty_order = value;
                else fail("unknown smooth option '" + key + "'");
            }
            spec.smooths.push_back(std::move(term));
        } else if (keyword == "mrf") {
            if (!(is >> mrf_file)) fail("mrf needs an adjacency file");
        } else if (keyword == "exclude-undefined") {
            std::string v;
            if (!(is >> v)) fail("exclude-undefined needs true|false");
            if (v == "true") spec.exclude_zero = true;
            else if (v == "false") spec.exclude_zero = false;
            else fail("exclude-undefined needs true|false");
        } else {
            fail("unknown keyword '" + keyword + "'");
        }
    }

    if (!mrf_file.empty()) {
        std::filesystem::path p(mrf_file);
        if (p.is_relative()) p = base / p;
        LatticeSpec lattice;
        lattice.adjacency = read_lattice_csv(p.string());
        spec.lattice = std::move(lattice); // node_region filled by the caller
    }
    return spec;
}

}  // namespace snr
