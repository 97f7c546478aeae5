#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "snr/family.hpp"
#include "snr/spline.hpp"

namespace snr {

// One penalized term: design block (already centered where required) plus
// its penalty.
struct PenalizedBlock {
    std::string name;
    Eigen::MatrixXd X;
    PenaltyMatrix penalty;
};

struct ModelDesign {
    Eigen::VectorXd y;
    Eigen::VectorXd offset;               // empty -> zeros
    Eigen::MatrixXd Z;                    // fixed effects, incl. intercept
    std::vector<std::string> z_names;
    Eigen::MatrixXd W;                    // graph-statistic effects
    std::vector<std::string> w_names;
    std::vector<PenalizedBlock> blocks;
    Eigen::VectorXd weights;              // empty -> ones

    int rows() const { return static_cast<int>(y.size()); }
};

// Spectral split of a penalty into a spherically penalized part and its
// null space: beta = Xp * beta_p + Xq * beta_q with
// beta' K beta = beta_p' beta_p.
struct ReparamBlock {
    Eigen::MatrixXd Xp;      // m x rank
    Eigen::MatrixXd Xq;      // m x null_dim
    Eigen::MatrixXd Xplus;   // n x rank  = X * Xp
    Eigen::MatrixXd Xminus;  // n x null  = X * Xq
    Eigen::MatrixXd to_pen;  // rank x m: beta_p = to_pen * beta
    Eigen::MatrixXd to_null; // null x m: beta_q = to_null * beta
    Eigen::VectorXd eigenvalues;
};

inline ReparamBlock reparametrize(const Eigen::MatrixXd& X, const PenaltyMatrix& penalty) {
    const Eigen::MatrixXd& K = penalty.K;
    if (K.rows() != K.cols() || K.rows() != X.cols())
        throw std::invalid_argument("penalty/design dimension mismatch");
    if (!K.isApprox(K.transpose(), 1e-10))
        throw std::invalid_argument("penalty matrix must be symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("penalty eigendecomposition failed");
    const Eigen::VectorXd& lambda = eig.eigenvalues(); // ascending
    const double scale = std::max(lambda.cwiseAbs().maxCoeff(), 1.0);
    const double tol = 1e-10 * scale;
    if (lambda.minCoeff() < -tol)
        throw std::invalid_argument("penalty matrix has a negative eigenvalue");

    int null_dim = 0;
    while (null_dim < lambda.size() && lambda[null_dim] <= tol) ++null_dim;
    int rank = static_cast<int>(lambda.size()) - null_dim;

    ReparamBlock block;
    block.eigenvalues = lambda;
    block.Xq = eig.eigenvectors().leftCols(null_dim);
    Eigen::MatrixXd gamma_pos = eig.eigenvectors().rightCols(rank);
    Eigen::VectorXd lam_pos = lambda.tail(rank);
    block.Xp = gamma_pos * lam_pos.cwiseSqrt().cwiseInverse().asDiagonal();
    block.to_pen = lam_pos.cwiseSqrt().asDiagonal() * gamma_pos.transpose();
    block.to_null = block.Xq.transpose();
    block.Xplus = X * block.Xp;
    block.Xminus = X * block.Xq;
    return block;
}

struct FitControl {
    int max_outer = 200;
    int max_inner = 100;
    double iwls_tol = 1e-8;
    double reml_tol = 1e-6;
    // When set, variance parameters are held at these values and the REML
    // step is skipped.
    std::optional<std::vector<double>> fixed_sigma2;
};

struct IterationRecord {
    int iter = 0;
    double deviance = 0.0;
    double max_rel_change = 0.0;
    std::vector<double> sigma2;
};

struct TermEdf {
    std::string name;
    double edf = 0.0;
};

struct FitResult {
    // Column layout of coef/covariance: Z, W, then per block the null-space
    // columns, then per block the penalized columns.
    Eigen::VectorXd coef;
    Eigen::MatrixXd covariance;       // psi * (C'WC/psi + Lambda)^{-1}
    Eigen::VectorXd fitted;           // mu
    Eigen::VectorXd eta;              // offset + C coef
    Eigen::VectorXd column_edf;       // diag of the hat contribution per column
    Eigen::VectorXd y;
    Eigen::VectorXd offset;
    Eigen::VectorXd prior_weights;

    std::vector<std::string> fixed_names; // Z then W
    int z_cols = 0;
    int w_cols = 0;

    struct BlockInfo {
        std::string name;
        ReparamBlock reparam;
        int null_offset = 0, null_cols = 0;
        int pen_offset = 0, pen_cols = 0;
    };
    std::vector<BlockInfo> blocks;

    std::vector<double> sigma2;
    double psi = 1.0;
    double deviance = 0.0;
    double loglik = 0.0;
    double edf_total = 0.0;
    std::vector<TermEdf> term_edf;

    bool converged = false;
    int iterations = 0;
    double final_change = 0.0;
    bool ridge_applied = false;
    std::vector<IterationRecord> trace;
    std::vector<double> inner_deviances; // deviance after every IWLS solve

    FamilyName family = FamilyName::gaussian;

    int n() const { return static_cast<int>(y.size()); }

    // Original-basis coefficients of a penalized term.
    Eigen::VectorXd block_coef(const BlockInfo& b) const {
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(b.reparam.Xp.rows());
        if (b.null_cols > 0)
            beta += b.reparam.Xq * coef.segment(b.null_offset, b.null_cols);
        if (b.pen_cols > 0)
            beta += b.reparam.Xp * coef.segment(b.pen_offset, b.pen_cols);
        return beta;
    }

    // Covariance of the original-basis coefficients of a penalized term.
    Eigen::MatrixXd block_covariance(const BlockInfo& b) const {
        const int m = static_cast<int>(b.reparam.Xp.rows());
        Eigen::MatrixXd t(m, b.null_cols + b.pen_cols);
        if (b.null_cols > 0) t.leftCols(b.null_cols) = b.reparam.Xq;
        if (b.pen_cols > 0) t.rightCols(b.pen_cols) = b.reparam.Xp;
        Eigen::MatrixXd sub(b.null_cols + b.pen_cols, b.null_cols + b.pen_cols);
        std::vector<int> cols;
        for (int i = 0; i < b.null_cols; ++i) cols.push_back(b.null_offset + i);
        for (int i = 0; i < b.pen_cols; ++i) cols.push_back(b.pen_offset + i);
        for (std::size_t r = 0; r < cols.size(); ++r)
            for (std::size_t c = 0; c < cols.size(); ++c)
                sub(static_cast<int>(r), static_cast<int>(c)) = covariance(cols[r], cols[c]);
        return t * sub * t.transpose();
    }
};

namespace detail {

inline std::string format_sigma2(const std::vector<double>& s) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) os << ",";
        os << s[i];
    }
    os << "]";
    return os.str();
}

}  // namespace detail

inline std::string convergence_line(const IterationRecord& r) {
    std::ostringstream os;
    os << "iter=" << r.iter << " deviance=" << r.deviance
       << " max_rel_change=" << r.max_rel_change
       << " sigma2=" << detail::format_sigma2(r.sigma2);
    return os.str();
}

// IWLS for the coefficients alternating with REML Fisher scoring for the
// variance parameters of the working linear mixed model.
inline FitResult fit(const ModelDesign& design, const Family& family,
                     const FitControl& control = {}) {
    const int n = design.rows();
    if (n == 0) throw std::invalid_argument("empty design");
    family.validate_response(design.y);

    Eigen::VectorXd offset =
        design.offset.size() ? design.offset : Eigen::VectorXd::Zero(n);
    Eigen::VectorXd prior_w =
        design.weights.size() ? design.weights : Eigen::VectorXd::Ones(n);
    if (offset.size() != n || prior_w.size() != n)
        throw std::invalid_argument("offset/weights length mismatch");
    if (design.Z.rows() != n && design.Z.size() > 0)
        throw std::invalid_argument("Z row count mismatch");
    if (design.W.rows() != n && design.W.size() > 0)
        throw std::invalid_argument("W row count mismatch");

    const int zc = static_cast<int>(design.Z.cols());
    const int wc = static_cast<int>(design.W.cols());
    const int nblocks = static_cast<int>(design.blocks.size());

    FitResult res;
    res.family = family.name();
    res.y = design.y;
    res.offset = offset;
    res.prior_weights = prior_w;
    res.z_cols = zc;
    res.w_cols = wc;
    res.fixed_names = design.z_names;
    res.fixed_names.insert(res.fixed_names.end(), design.w_names.begin(),
                           design.w_names.end());

    // Reparametrize blocks and lay out columns: Z, W, null parts, penalized
    // parts.
    std::vector<ReparamBlock> reps;
    reps.reserve(nblocks);
    int null_total = 0, pen_total = 0;
    for (const PenalizedBlock& b : design.blocks) {
        if (b.X.rows() != n) throw std::invalid_argument("penalized block row mismatch");
        reps.push_back(reparametrize(b.X, b.penalty));
        null_total += static_cast<int>(reps.back().Xminus.cols());
        pen_total += static_cast<int>(reps.back().Xplus.cols());
    }
    const int p_fixed = zc + wc + null_total;
    const int p = p_fixed + pen_total;

    Eigen::MatrixXd C(n, p);
    if (zc > 0) C.leftCols(zc) = design.Z;
    if (wc > 0) C.middleCols(zc, wc) = design.W;
    {
        int off = zc + wc;
        for (const ReparamBlock& r : reps) {
            int k = static_cast<int>(r.Xminus.cols());
            if (k > 0) C.middleCols(off, k) = r.Xminus;
            off += k;
        }
        for (const ReparamBlock& r : reps) {
            int k = static_cast<int>(r.Xplus.cols());
            if (k > 0) C.middleCols(off, k) = r.Xplus;
            off += k;
        }
    }
    {
        int null_off = zc + wc;
        int pen_off = p_fixed;
        for (int j = 0; j < nblocks; ++j) {
            FitResult::BlockInfo info;
            info.name = design.blocks[j].name;
            info.reparam = reps[j];
            info.null_offset = null_off;
            info.null_cols = static_cast<int>(reps[j].Xminus.cols());
            info.pen_offset = pen_off;
            info.pen_cols = static_cast<int>(reps[j].Xplus.cols());
            null_off += info.null_cols;
            pen_off += info.pen_cols;
            res.blocks.push_back(std::move(info));
        }
    }

    std::vector<double> sigma2(nblocks, 1.0);
    if (control.fixed_sigma2) {
        if (static_cast<int>(control.fixed_sigma2->size()) != nblocks)
            throw std::invalid_argument("fixed_sigma2 size mismatch");
        sigma2 = *control.fixed_sigma2;
    }
    double psi = 1.0;

    Eigen::VectorXd mu = family.initial_mu(design.y);
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i)
        eta[i] = family.link(family.log_link() ? std::max(mu[i], 1e-10) : mu[i]);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);

    auto add_lambda = [&](Eigen::MatrixXd& a) {
        for (int j = 0; j < nblocks; ++j) {
            const auto& b = res.blocks[j];
            double inv = 1.0 / sigma2[j];
            for (int c = 0; c < b.pen_cols; ++c) a(b.pen_offset + c, b.pen_offset + c) += inv;
        }
    };

    Eigen::MatrixXd m_inv;       // C'WC/psi + Lambda, from the last solve
    Eigen::MatrixXd m_mat;       // its inverse
    Eigen::MatrixXd a_unpen;     // C'WC/psi
    double deviance = std::numeric_limits<double>::quiet_NaN();

    auto solve_system = [&](const Eigen::VectorXd& w, const Eigen::VectorXd& z) {
        a_unpen = C.transpose() * w.asDiagonal() * C / psi;
        m_inv = a_unpen;
        add_lambda(m_inv);
        Eigen::VectorXd rhs = C.transpose() * (w.cwiseProduct(z)) / psi;
        Eigen::LDLT<Eigen::MatrixXd> ldlt(m_inv);
        Eigen::VectorXd sol = ldlt.solve(rhs);
        if (!sol.allFinite() || ldlt.info() != Eigen::Success) {
            double jitter = 1e-10 * std::max(1.0, m_inv.trace() / p);
            m_inv.diagonal().array() += jitter;
            res.ridge_applied = true;
            ldlt.compute(m_inv);
            sol = ldlt.solve(rhs);
            if (!sol.allFinite())
                throw std::runtime_error("singular penalized system");
        }
        m_mat = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
        return sol;
    };

    auto working_quantities = [&](Eigen::VectorXd& w, Eigen::VectorXd& z) {
        for (int i = 0; i < n; ++i) {
            double mui = mu[i];
            if (family.log_link()) mui = std::max(mui, 1e-10);
            double me = family.mu_eta(mui);
            double var = family.variance(mui);
            w[i] = prior_w[i] * me * me / var;
            z[i] = (eta[i] - offset[i]) + (design.y[i] - mu[i]) / me;
            if (!std::isfinite(w[i]) || !std::isfinite(z[i]))
                throw std::runtime_error("non-finite working weights");
        }
    };

    auto update_mu = [&]() {
        for (int i = 0; i < n; ++i) {
            double e = family.log_link() ? std::min(eta[i], 700.0) : eta[i];
            mu[i] = family.inverse_link(e);
            if (!std::isfinite(mu[i])) throw std::runtime_error("non-finite fitted mean");
        }
    };

    bool converged = false;
    int outer = 0;
    double outer_change = std::numeric_limits<double>::infinity();
    Eigen::VectorXd w_work(n), z_work(n);

    for (outer = 1; outer <= control.max_outer; ++outer) {
        // (a) IWLS at fixed variance parameters.
        Eigen::VectorXd theta_outer_start = theta;
        for (int inner = 0; inner < control.max_inner; ++inner) {
            working_quantities(w_work, z_work);
            Eigen::VectorXd theta_new = solve_system(w_work, z_work);
            double rel = 0.0;
            for (int c = 0; c < p; ++c)
                rel = std::max(rel, std::abs(theta_new[c] - theta[c]) /
                                        (1.0 + std::abs(theta[c])));
            theta = theta_new;
            eta = offset + C * theta;
            update_mu();
            deviance = family.deviance(design.y, mu, prior_w);
            res.inner_deviances.push_back(deviance);
            if (rel < control.iwls_tol) break;
        }

        // edf with the current weights; needed for the scale update. The
        // floor keeps the working system solvable on exact fits.
        double edf = (m_mat * a_unpen).trace();

        if (family.estimate_scale() && n > edf)
            psi = std::max(deviance / (n - edf), 1e-12);

        // (b) One REML Fisher-scoring step on log sigma_j^2.
        double max_rho_step = 0.0;
        if (nblocks > 0 && !control.fixed_sigma2) {
            Eigen::VectorXd score(nblocks);
            Eigen::MatrixXd info(nblocks, nblocks);
            for (int j = 0; j < nblocks; ++j) {
                const auto& bj = res.blocks[j];
                double vj = sigma2[j];
                double tr_mjj = 0.0;
                for (int c = 0; c < bj.pen_cols; ++c)
                    tr_mjj += m_mat(bj.pen_offset + c, bj.pen_offset + c);
                double t1 = (bj.pen_cols - tr_mjj / vj) / vj;
                double uu = theta.segment(bj.pen_offset, bj.pen_cols).squaredNorm();
                double t2 = uu / (vj * vj);
                score[j] = 0.5 * (t2 - t1) * vj; // d l_R / d log sigma_j^2
                for (int k = 0; k <= j; ++k) {
                    // U_j' P U_k = (delta_jk I - M_jk / v_k) / v_j; the
                    // expected information in log coordinates picks up a
                    // v_j v_k Jacobian factor.
                    const auto& bk = res.blocks[k];
                    double vk = sigma2[k];
                    Eigen::MatrixXd upu =
                        -m_mat.block(bj.pen_offset, bk.pen_offset, bj.pen_cols, bk.pen_cols) /
                        (vj * vk);
                    if (j == k) upu.diagonal().array() += 1.0 / vj;
                    double fisher = 0.5 * upu.squaredNorm() * vj * vk;
                    info(j, k) = info(k, j) = fisher;
                }
            }
            info.diagonal().array() += 1e-12;
            Eigen::VectorXd step = info.ldlt().solve(score);
            for (int j = 0; j < nblocks; ++j) {
                double s = std::clamp(step[j], -3.0, 3.0);
                double updated = std::clamp(sigma2[j] * std::exp(s), 1e-10, 1e10);
                // measure the realized movement so a variance pinned at its
                // bound counts as converged
                max_rho_step =
                    std::max(max_rho_step, std::abs(std::log(updated / sigma2[j])));
                sigma2[j] = updated;
            }
        }

        double coef_change = 0.0;
        for (int c = 0; c < p; ++c)
            coef_change = std::max(coef_change,
                                   std::abs(theta[c] - theta_outer_start[c]) /
                                       (1.0 + std::abs(theta_outer_start[c])));
        outer_change = std::max(coef_change, max_rho_step);

        IterationRecord rec;
        rec.iter = outer;
        rec.deviance = deviance;
        rec.max_rel_change = outer_change;
        rec.sigma2 = sigma2;
        res.trace.push_back(rec);

        if (outer > 1 && coef_change < control.iwls_tol &&
            max_rho_step < control.reml_tol) {
            converged = true;
            break;
        }
    }

    // Final quantities with converged weights.
    auto final_pass = [&]() {
        working_quantities(w_work, z_work);
        theta = solve_system(w_work, z_work);
        eta = offset + C * theta;
        update_mu();
        deviance = family.deviance(design.y, mu, prior_w);
        res.column_edf = (m_mat * a_unpen).diagonal();
        res.edf_total = res.column_edf.sum();
    };
    final_pass();
    if (family.estimate_scale() && n > res.edf_total) {
        // refresh the system at the final scale so the covariance and the
        // effective degrees of freedom use the same psi
        psi = std::max(deviance / (n - res.edf_total), 1e-12);
        final_pass();
    }

    res.coef = theta;
    res.covariance = m_mat; // (C'WC/psi + Lambda)^{-1}, psi included
    res.fitted = mu;
    res.eta = eta;
    res.sigma2 = sigma2;
    res.psi = family.estimate_scale() ? psi : 1.0;
    res.deviance = deviance;
    res.loglik = family.log_likelihood(design.y, mu, prior_w, res.psi);
    res.converged = converged;
    res.iterations = outer > control.max_outer ? control.max_outer : outer;
    res.final_change = outer_change;

    for (int c = 0; c < zc; ++c)
        res.term_edf.push_back({design.z_names[c], res.column_edf[c]});
    for (int c = 0; c < wc; ++c)
        res.term_edf.push_back({design.w_names[c], res.column_edf[zc + c]});
    for (const auto& b : res.blocks) {
        double e = 0.0;
        for (int c = 0; c < b.null_cols; ++c) e += res.column_edf[b.null_offset + c];
        for (int c = 0; c < b.pen_cols; ++c) e += res.column_edf[b.pen_offset + c];
        res.term_edf.push_back({b.name, e});
    }
    return res;
}

struct Criteria {
    double aic = 0.0;
    double bic = 0.0;
    double gcv = 0.0;
    double edf = 0.0;
    double loglik = 0.0;
    double deviance = 0.0;
};

inline Criteria criteria(const FitResult& fit, int n) {
    if (fit.edf_total >= n)
        throw std::invalid_argument("edf >= n: GCV undefined");
    Criteria c;
    c.edf = fit.edf_total;
    c.loglik = fit.loglik;
    c.deviance = fit.deviance;
    c.aic = -2.0 * fit.loglik + 2.0 * fit.edf_total;
    c.bic = -2.0 * fit.loglik + std::log(static_cast<double>(n)) * fit.edf_total;
    double denom = static_cast<double>(n) - fit.edf_total;
    c.gcv = static_cast<double>(n) * fit.deviance / (denom * denom);
    return c;
}

struct CoefficientRow {
    std::string name;
    double estimate = 0.0;
    double std_error = 0.0;
    double t_value = 0.0;
    double p_value = 0.0;
};

// Parametric (fixed and graph-statistic) coefficients with Gaussian-
// approximation p-values.
inline std::vector<CoefficientRow> coefficient_table(const FitResult& fit) {
    std::vector<CoefficientRow> rows;
    const int k = fit.z_cols + fit.w_cols;
    for (int c = 0; c < k; ++c) {
        CoefficientRow r;
        r.name = fit.fixed_names[c];
        r.estimate = fit.coef[c];
        r.std_error = std::sqrt(std::max(fit.covariance(c, c), 0.0));
        r.t_value = r.std_error > 0.0 ? r.estimate / r.std_error : 0.0;
        r.p_value = std::erfc(std::abs(r.t_value) / std::sqrt(2.0));
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace snr
