#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "snr/spline.hpp"
#include "support/oracles.hpp"

using namespace snr;

TEST_CASE("degree-0 basis is the knot-interval indicator") {
    SplineConfig cfg{.degree = 0, .inner_knots = 1, .penalty_order = 1,
                     .domain_min = 0.0, .domain_max = 2.0};
    auto b = bspline_basis({0.5, 1.5, 2.0}, cfg);
    REQUIRE(b.cols() == 2);
    CHECK(b(0, 0) == 1.0);
    CHECK(b(0, 1) == 0.0);
    CHECK(b(1, 0) == 0.0);
    CHECK(b(1, 1) == 1.0);
    CHECK(b(2, 1) == 1.0); // right endpoint belongs to the last interval
}

TEST_CASE("basis rows sum to one inside the domain") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int degree = 0; degree <= 3; ++degree) {
        SplineConfig cfg{.degree = degree, .inner_knots = 7, .penalty_order = 1,
                         .domain_min = -2.0, .domain_max = 3.0};
        std::vector<double> xs;
        for (int i = 0; i < 200; ++i) xs.push_back(-2.0 + 5.0 * u(rng));
        xs.push_back(-2.0);
        xs.push_back(3.0);
        auto b = bspline_basis(xs, cfg);
        for (Eigen::Index r = 0; r < b.rows(); ++r) {
            REQUIRE_THAT(b.row(r).sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
            REQUIRE(b.row(r).minCoeff() >= 0.0);
        }
    }
}

TEST_CASE("basis matches the literal recursion") {
    SplineConfig cfg{.degree = 3, .inner_knots = 6, .penalty_order = 2,
                     .domain_min = 0.0, .domain_max = 1.0};
    REQUIRE(cfg.basis_count() == 10);
    auto knots = detail::clamped_knots(cfg);
    std::vector<double> xs;
    for (int i = 0; i <= 40; ++i) xs.push_back(i / 40.0);
    auto b = bspline_basis(xs, cfg);
    for (std::size_t r = 0; r < xs.size(); ++r)
        for (int c = 0; c < cfg.basis_count(); ++c)
            REQUIRE_THAT(b(static_cast<Eigen::Index>(r), c),
                         Catch::Matchers::WithinAbs(
                             oracle::coxdeboor_recursive(knots, c, 3, xs[r], 1.0), 1e-13));
}

TEST_CASE("basis rejects bad input") {
    SplineConfig cfg;
    CHECK_THROWS(bspline_basis({1.5}, cfg));                 // outside [0,1]
    CHECK_THROWS(bspline_basis({0.5}, SplineConfig{.degree = 3, .inner_knots = 5,
                                                   .penalty_order = 2, .domain_min = 1.0,
                                                   .domain_max = 1.0}));
}

TEST_CASE("difference penalty hand value") {
    auto p = difference_penalty(3, 1);
    Eigen::MatrixXd expect(3, 3);
    expect << 1, -1, 0, -1, 2, -1, 0, -1, 1;
    CHECK(p.K.isApprox(expect, 1e-15));
    CHECK(p.null_dim == 1);
    CHECK_THROWS(difference_penalty(2, 2));
}

TEST_CASE("difference penalty quadratic form equals the difference sum") {
    std::mt19937 rng(21);
    std::normal_distribution<double> z(0.0, 1.0);
    for (int order = 1; order <= 3; ++order) {
        auto p = difference_penalty(12, order);
        for (int rep = 0; rep < 30; ++rep) {
            Eigen::VectorXd beta(12);
            for (int i = 0; i < 12; ++i) beta[i] = z(rng);
            double qf = beta.transpose() * p.K * beta;
            REQUIRE_THAT(qf, Catch::Matchers::WithinAbs(
                                 oracle::difference_quadratic_form(beta, order), 1e-10));
        }
        // polynomials of degree < order are annihilated
        for (int deg = 0; deg < order; ++deg) {
            Eigen::VectorXd poly(12);
            for (int i = 0; i < 12; ++i) poly[i] = std::pow(i + 1.0, deg);
            REQUIRE_THAT((p.K * poly).cwiseAbs().maxCoeff(),
                         Catch::Matchers::WithinAbs(0.0, 1e-10));
        }
    }
}

TEST_CASE("mrf penalty is the lattice Laplacian") {
    LatticeAdjacency adj;
    adj.add_pair("r1", "r2");
    auto p = mrf_penalty(adj);
    Eigen::MatrixXd expect(2, 2);
    expect << 1, -1, -1, 1;
    CHECK(p.K.isApprox(expect, 1e-15));
    CHECK(p.null_dim == 1);

    LatticeAdjacency iso;
    iso.add_pair("r1", "r2");
    iso.add_region("r3");
    auto p3 = mrf_penalty(iso);
    CHECK(p3.K.row(2).cwiseAbs().sum() == 0.0);
    CHECK(p3.null_dim == 2);

    CHECK_THROWS(adj.add_pair("r1", "r1"));
    CHECK_THROWS(LatticeAdjacency::from_matrix({"a", "b"}, {{false, true}, {false, false}}));
}

TEST_CASE("mrf quadratic form equals the pairwise difference sum") {
    std::mt19937 rng(31);
    std::normal_distribution<double> z(0.0, 1.0);
    LatticeAdjacency adj;
    // ring of five regions plus one chord
    std::vector<std::string> ids{"a", "b", "c", "d", "e"};
    for (int i = 0; i < 5; ++i) adj.add_pair(ids[i], ids[(i + 1) % 5]);
    adj.add_pair("a", "c");
    auto p = mrf_penalty(adj);
    auto ridx = [&](const std::string& s) {
        auto v = adj.region_ids();
        return std::find(v.begin(), v.end(), s) - v.begin();
    };
    for (int rep = 0; rep < 30; ++rep) {
        Eigen::VectorXd beta(5);
        for (int i = 0; i < 5; ++i) beta[i] = z(rng);
        double direct = 0.0;
        for (const auto& [a, b] : adj.pairs()) {
            double diff = beta[ridx(a)] - beta[ridx(b)];
            direct += diff * diff;
        }
        double qf = beta.transpose() * p.K * beta;
        REQUIRE_THAT(qf, Catch::Matchers::WithinAbs(direct, 1e-10));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(p.K);
    REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("centering makes fitted values zero mean") {
    std::mt19937 rng(41);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    SplineConfig cfg{.degree = 3, .inner_knots = 8, .penalty_order = 2,
                     .domain_min = 0.0, .domain_max = 1.0};
    std::vector<double> xs;
    for (int i = 0; i < 120; ++i) xs.push_back(u(rng));
    auto basis = bspline_basis(xs, cfg);
    auto centered = center_term(basis);
    REQUIRE(centered.basis.cols() == basis.cols() - 1);

    for (int rep = 0; rep < 20; ++rep) {
        Eigen::VectorXd coef(centered.basis.cols());
        for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] = z(rng);
        Eigen::VectorXd fitted = centered.basis * coef;
        REQUIRE_THAT(fitted.mean(), Catch::Matchers::WithinAbs(0.0, 1e-10));

        // back-transform reproduces the same fit through the full basis
        Eigen::VectorXd full = centered.back * coef;
        REQUIRE((basis * full - fitted).cwiseAbs().maxCoeff() < 1e-10);

        // round trip: project the full coefficients back down
        Eigen::VectorXd again = centered.back.transpose() * full;
        REQUIRE((again - coef).cwiseAbs().maxCoeff() < 1e-10);
    }

    // the constant function is not representable after centering
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(basis.cols());
    Eigen::VectorXd proj = centered.back * (centered.back.transpose() * ones);
    REQUIRE((proj - ones).cwiseAbs().maxCoeff() > 1e-3);

    CHECK_THROWS(center_term(Eigen::MatrixXd::Ones(5, 1)));
}
