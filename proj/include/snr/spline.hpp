#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace snr {

// Equally spaced knot grid over [domain_min, domain_max] with
// inner_knots interior knots; the basis has degree + inner_knots + 1
// functions.
struct SplineConfig {
    int degree = 3;
    int inner_knots = 20;
    int penalty_order = 2;
    double domain_min = 0.0;
    double domain_max = 1.0;

    int basis_count() const { return degree + inner_knots + 1; }

    void validate() const {
        if (degree < 0) throw std::invalid_argument("spline degree must be >= 0");
        if (inner_knots < 1) throw std::invalid_argument("need at least one inner knot");
        if (penalty_order < 1 || penalty_order > 3)
            throw std::invalid_argument("penalty order must be 1, 2 or 3");
        if (!(domain_min < domain_max))
            throw std::invalid_argument("degenerate spline domain");
        if (basis_count() <= penalty_order)
            throw std::invalid_argument("basis too small for penalty order");
    }
};

struct PenaltyMatrix {
    Eigen::MatrixXd K;
    int null_dim = 0;
};

// Symmetric, irreflexive neighbour relation between lattice regions.
class LatticeAdjacency {
public:
    void add_pair(const std::string& a, const std::string& b) {
        if (a == b) throw std::invalid_argument("region cannot neighbour itself: " + a);
        regions_.insert(a);
        regions_.insert(b);
        pairs_.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    }

    void add_region(const std::string& a) { regions_.insert(a); }

    // Region ids in sorted order; this fixes the penalty's column order.
    std::vector<std::string> region_ids() const {
        return {regions_.begin(), regions_.end()};
    }

    const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }

    static LatticeAdjacency from_matrix(const std::vector<std::string>& ids,
                                        const std::vector<std::vector<bool>>& m) {
        LatticeAdjacency adj;
        std::size_t n = ids.size();
        if (m.size() != n) throw std::invalid_argument("adjacency matrix size mismatch");
        for (std::size_t i = 0; i < n; ++i) {
            if (m[i].size() != n) throw std::invalid_argument("adjacency matrix size mismatch");
            if (m[i][i]) throw std::invalid_argument("adjacency must be irreflexive");
            adj.add_region(ids[i]);
            for (std::size_t j = 0; j < n; ++j) {
                if (m[i][j] != m[j][i])
                    throw std::invalid_argument("asymmetric adjacency input");
                if (j > i && m[i][j]) adj.add_pair(ids[i], ids[j]);
            }
        }
        return adj;
    }

private:
    std::set<std::string> regions_;
    std::set<std::pair<std::string, std::string>> pairs_;
};

namespace detail {

// Clamped knot vector: boundary knots repeated degree+1 times.
inline std::vector<double> clamped_knots(const SplineConfig& cfg) {
    int segments = cfg.inner_knots + 1;
    std::vector<double> knots;
    knots.reserve(cfg.basis_count() + cfg.degree + 1);
    for (int i = 0; i < cfg.degree; ++i) knots.push_back(cfg.domain_min);
    for (int i = 0; i <= segments; ++i) {
        double t = static_cast<double>(i) / segments;
        knots.push_back(cfg.domain_min + t * (cfg.domain_max - cfg.domain_min));
    }
    for (int i = 0; i < cfg.degree; ++i) knots.push_back(cfg.domain_max);
    return knots;
}

// Cox-de Boor triangle over the whole basis at one point. The last basis
// function owns the right domain endpoint.
inline void basis_row(const std::vector<double>& knots, int degree, int m, double x,
                      double* row) {
    std::vector<double> b(knots.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        bool last_span = knots[i] < knots[i + 1] && x == knots.back();
        if ((x >= knots[i] && x < knots[i + 1]) ||
            (last_span && knots[i + 1] == knots.back()))
            b[i] = 1.0;
    }
    for (int k = 1; k <= degree; ++k) {
        for (std::size_t i = 0; i + k + 1 < knots.size(); ++i) {
            double left = 0.0, right = 0.0;
            double dl = knots[i + k] - knots[i];
            double dr = knots[i + k + 1] - knots[i + 1];
            if (dl > 0.0) left = (x - knots[i]) / dl * b[i];
            if (dr > 0.0) right = (knots[i + k + 1] - x) / dr * b[i + 1];
            b[i] = left + right;
        }
    }
    for (int i = 0; i < m; ++i) row[i] = b[i];
}

}  // namespace detail

// Cox-de Boor evaluation of all basis functions at the given points.
// Rows form a partition of unity on [domain_min, domain_max].
inline Eigen::MatrixXd bspline_basis(const std::vector<double>& x, const SplineConfig& cfg) {
    cfg.validate();
    const int m = cfg.basis_count();
    const std::vector<double> knots = detail::clamped_knots(cfg);
    Eigen::MatrixXd basis(static_cast<Eigen::Index>(x.size()), m);
    std::vector<double> row(m);
    for (std::size_t r = 0; r < x.size(); ++r) {
        if (!(x[r] >= cfg.domain_min && x[r] <= cfg.domain_max))
            throw std::invalid_argument("spline evaluation point outside domain");
        detail::basis_row(knots, cfg.degree, m, x[r], row.data());
        for (int c = 0; c < m; ++c) basis(static_cast<Eigen::Index>(r), c) = row[c];
    }
    return basis;
}

// K = D'D for the order-d difference operator on coefficient vectors.
inline PenaltyMatrix difference_penalty(int m, int order) {
    if (order < 1) throw std::invalid_argument("difference order must be >= 1");
    if (m <= order) throw std::invalid_argument("need more coefficients than the difference order");
    Eigen::MatrixXd d = Eigen::MatrixXd::Identity(m, m);
    for (int k = 0; k < order; ++k) {
        int rows = m - k - 1;
        Eigen::MatrixXd step = Eigen::MatrixXd::Zero(rows, rows + 1);
        for (int i = 0; i < rows; ++i) {
            step(i, i) = -1.0;
            step(i, i + 1) = 1.0;
        }
        d = (step * d).eval();
    }
    PenaltyMatrix p;
    p.K = d.transpose() * d;
    p.null_dim = order;
    return p;
}

// Graph Laplacian of the lattice: beta'K beta = sum over neighbour pairs of
// (beta_r - beta_s)^2. One null dimension per connected lattice component.
inline PenaltyMatrix mrf_penalty(const LatticeAdjacency& adjacency) {
    std::vector<std::string> ids = adjacency.region_ids();
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = static_cast<int>(i);
    const int n = static_cast<int>(ids.size());
    PenaltyMatrix p;
    p.K = Eigen::MatrixXd::Zero(n, n);
    std::vector<int> comp(n);
    for (int i = 0; i < n; ++i) comp[i] = i;
    std::function<int(int)> find = [&](int i) {
        while (comp[i] != i) i = comp[i] = comp[comp[i]];
        return i;
    };
    for (const auto& [a, b] : adjacency.pairs()) {
        int i = index[a], j = index[b];
        p.K(i, i) += 1.0;
        p.K(j, j) += 1.0;
        p.K(i, j) -= 1.0;
        p.K(j, i) -= 1.0;
        comp[find(i)] = find(j);
    }
    std::set<int> roots;
    for (int i = 0; i < n; ++i) roots.insert(find(i));
    p.null_dim = static_cast<int>(roots.size());
    return p;
}

// Zero-mean identifiability transform: reduced = basis * Q where Q spans the
// orthogonal complement of the basis column means. Fitted values from the
// reduced basis have zero mean over the observed points; Q maps reduced
// coefficients back to full length.
struct CenteredTerm {
    Eigen::MatrixXd basis;   // n x (m-1)
    Eigen::MatrixXd back;    // m x (m-1), full_coef = back * reduced_coef
    Eigen::VectorXd col_means;
};

inline CenteredTerm center_term(const Eigen::MatrixXd& basis) {
    if (basis.cols() < 2) throw std::invalid_argument("centering needs at least two columns");
    Eigen::VectorXd c = basis.colwise().mean();
    if (c.norm() == 0.0) throw std::invalid_argument("rank-deficient centering constraint");
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(c);
    Eigen::MatrixXd q = qr.householderQ();
    CenteredTerm out;
    out.back = q.rightCols(basis.cols() - 1);
    out.basis = basis * out.back;
    out.col_means = c;
    return out;
}

// Re-apply an existing centering transform to a basis evaluated at new points.
inline Eigen::MatrixXd apply_centering(const CenteredTerm& term, const Eigen::MatrixXd& basis) {
    if (basis.cols() != term.back.rows())
        throw std::invalid_argument("basis width does not match centering transform");
    return basis * term.back;
}

}  // namespace snr
