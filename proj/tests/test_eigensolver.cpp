#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "duet/eigensolver.hpp"
#include "duet/model.hpp"

using namespace duet;

namespace {

BandedSymmetricMatrix random_band(long dim, int hb, unsigned seed, double scale = 1.0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> un(-1.0, 1.0);
    BandedSymmetricMatrix m(dim, hb);
    for (long j = 0; j < dim; ++j)
        for (int d = 0; d <= hb && j + d < dim; ++d)
            m.band(d, j) = scale * un(gen);
    return m;
}

Eigen::VectorXd dense_eigenvalues(const BandedSymmetricMatrix& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m.to_dense()).eigenvalues();
}

} // namespace

TEST_CASE("already tridiagonal input passes through unchanged") {
    BandedSymmetricMatrix m = random_band(40, 1, 11);
    auto [t, handle] = reduce_to_tridiagonal(m);
    for (long i = 0; i < 40; ++i)
        CHECK(t.diag[i] == m.band(0, i));
    for (long i = 0; i < 39; ++i)
        CHECK(t.sub[i] == m.band(1, i));
}

TEST_CASE("diagonal matrix reduces to itself") {
    BandedSymmetricMatrix m(25, 0);
    for (long i = 0; i < 25; ++i)
        m.band(0, i) = 3.0 + i;
    auto [t, handle] = reduce_to_tridiagonal(m);
    for (long i = 0; i < 25; ++i)
        CHECK(t.diag[i] == doctest::Approx(3.0 + i));
    CHECK(t.sub.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reduction preserves the spectrum") {
    for (auto [dim, hb, seed] : {std::tuple{200L, 6, 1u}, {120L, 2, 2u}, {400L, 9, 3u},
                                 {97L, 5, 4u}, {64L, 13, 5u}}) {
        BandedSymmetricMatrix m = random_band(dim, hb, seed);
        auto [t, handle] = reduce_to_tridiagonal(m);
        BandedSymmetricMatrix tt(dim, 1);
        for (long i = 0; i < dim; ++i)
            tt.band(0, i) = t.diag[i];
        for (long i = 0; i + 1 < dim; ++i)
            tt.band(1, i) = t.sub[i];
        Eigen::VectorXd ev_band = dense_eigenvalues(m);
        Eigen::VectorXd ev_tri = dense_eigenvalues(tt);
        const double scale = ev_band.cwiseAbs().maxCoeff();
        CHECK((ev_band - ev_tri).cwiseAbs().maxCoeff() / scale < 1e-13);
    }
}

TEST_CASE("sturm bisection matches dense list exactly") {
    BandedSymmetricMatrix m = random_band(300, 1, 21);
    auto [t, handle] = reduce_to_tridiagonal(m);
    Eigen::VectorXd ref = dense_eigenvalues(m);
    auto all = eigenvalues_in_interval(t, ref.minCoeff() - 1.0, ref.maxCoeff() + 1.0);
    REQUIRE(static_cast<long>(all.size()) == ref.size());
    const double tol = 1e-12 * t.norm1();
    for (long i = 0; i < ref.size(); ++i)
        CHECK(std::abs(all[static_cast<std::size_t>(i)] - ref[i]) <= 2 * tol + 1e-13);
}

TEST_CASE("interval beyond the spectral range is empty") {
    BandedSymmetricMatrix m = random_band(60, 3, 5);
    auto [t, handle] = reduce_to_tridiagonal(m);
    auto vals = eigenvalues_in_interval(t, 1e3, 2e3);
    CHECK(vals.empty());
}

TEST_CASE("decoupled model: four bare levels inside a window around n0") {
    ModelParams p{.delta_e1 = 0.25, .delta_e2 = 0.125}; // all four spin levels within 1 quantum
    BasisIndex basis = build_basis({0, 60});
    auto h = assemble_hamiltonian(p, basis);
    auto [t, handle] = reduce_to_tridiagonal(h);
    const double e0 = 30.0;
    auto vals = eigenvalues_in_interval(t, e0 - 0.5, e0 + 0.5);
    REQUIRE(vals.size() == 4);
    std::vector<double> expect;
    for (const SpinConfig& s : spin_order)
        expect.push_back(bare_level(30, s, p));
    std::sort(expect.begin(), expect.end());
    for (std::size_t k = 0; k < 4; ++k)
        CHECK(vals[k] == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("too many eigenvalues in one interval is an error") {
    BandedSymmetricMatrix m = random_band(200, 4, 8);
    auto [t, handle] = reduce_to_tridiagonal(m);
    IntervalOptions opt;
    opt.max_count = 10;
    CHECK_THROWS_AS(eigenvalues_in_interval(t, -1e3, 1e3, opt), invalid_argument);
}

TEST_CASE("interval count equals sturm count difference") {
    BandedSymmetricMatrix m = random_band(150, 6, 12);
    auto [t, handle] = reduce_to_tridiagonal(m);
    const double a = -0.8, b = 0.9;
    auto vals = eigenvalues_in_interval(t, a, b);
    CHECK(static_cast<long>(vals.size()) == sturm_count(t, b) - sturm_count(t, a));
}

TEST_CASE("eigenvector of a diagonal matrix is a unit coordinate vector") {
    BandedSymmetricMatrix m(12, 0);
    for (long i = 0; i < 12; ++i)
        m.band(0, i) = 1.0 + 0.5 * i;
    auto [t, handle] = reduce_to_tridiagonal(m);
    Eigen::VectorXd v = eigenvector(t, 1.0 + 0.5 * 7, handle);
    CHECK(std::abs(std::abs(v[7]) - 1.0) < 1e-12);
}

TEST_CASE("random band: inverse-iteration residuals within tolerance") {
    BandedSymmetricMatrix m = random_band(200, 6, 33);
    auto r = eigenpairs_in_interval(m, -0.5, 0.5);
    REQUIRE(r.values.size() > 0);
    for (long k = 0; k < r.values.size(); ++k) {
        CHECK(r.residuals[k] <= 1e-11);
        CHECK(std::abs(r.vectors.col(k).norm() - 1.0) < 1e-12);
    }
    // cross-check the eigenvalues themselves against the dense solver
    Eigen::VectorXd ref = dense_eigenvalues(m);
    for (long k = 0; k < r.values.size(); ++k) {
        double best = 1e300;
        for (long i = 0; i < ref.size(); ++i)
            best = std::min(best, std::abs(ref[i] - r.values[k]));
        CHECK(best <= 2e-12 * m.norm1());
    }
}

TEST_CASE("near-degenerate cluster: orthogonal vectors, resolved gap") {
    // two levels separated by 1e-7 * |H| inside an otherwise well-spread matrix
    const long dim = 80;
    BandedSymmetricMatrix m(dim, 1);
    for (long i = 0; i < dim; ++i)
        m.band(0, i) = 2.0 * static_cast<double>(i);
    const double base = 37.0, gap = 1e-7 * 2 * (dim - 1);
    m.band(0, 40) = base;
    m.band(0, 41) = base; // exact degeneracy on the diagonal...
    m.band(1, 40) = gap / 2; // ...split by the coupling: eigenvalues base +- gap/2
    auto r = eigenpairs_in_interval(m, base - 0.5, base + 0.5, {.abs_tol = 1e-14 * m.norm1()});
    REQUIRE(r.values.size() == 2);
    const double got = r.values[1] - r.values[0];
    CHECK(std::abs(got - gap) <= 0.01 * gap);
    CHECK(std::abs(r.vectors.col(0).dot(r.vectors.col(1))) <= 1e-10);
    for (long k = 0; k < 2; ++k)
        CHECK(r.residuals[k] <= 1e-11);
}

TEST_CASE("dense oracle basics") {
    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    auto r = dense_eigen_oracle(flip);
    CHECK(r.values[0] == doctest::Approx(-1.0));
    CHECK(r.values[1] == doctest::Approx(1.0));

    auto id = dense_eigen_oracle(Eigen::MatrixXd::Identity(9, 9));
    CHECK((id.values.array() - 1.0).abs().maxCoeff() < 1e-14);

    std::mt19937 gen(9);
    std::uniform_real_distribution<double> un(-1, 1);
    Eigen::MatrixXd a(60, 60);
    for (long i = 0; i < 60; ++i)
        for (long j = 0; j < 60; ++j)
            a(i, j) = un(gen);
    Eigen::MatrixXd s = 0.5 * (a + a.transpose());
    auto rr = dense_eigen_oracle(s);
    CHECK(rr.residuals.maxCoeff() < 1e-13);
    CHECK(std::abs(rr.values.sum() - s.trace()) < 1e-11 * std::abs(s.trace()) + 1e-12);
}

TEST_CASE("fifty-seed dense-oracle equivalence, mixed bandwidths") {
    for (unsigned seed = 0; seed < 50; ++seed) {
        const long dim = 50 + 7 * (seed % 8);
        const int hb = 1 + static_cast<int>(seed % 9);
        BandedSymmetricMatrix m = random_band(dim, hb, 1000 + seed);
        auto [t, handle] = reduce_to_tridiagonal(m);
        Eigen::VectorXd ref = dense_eigenvalues(m);
        auto vals = eigenvalues_in_interval(t, ref.minCoeff() - 1, ref.maxCoeff() + 1,
                                            {.abs_tol = 1e-14 * t.norm1()});
        REQUIRE(static_cast<long>(vals.size()) == ref.size());
        const double scale = std::max(1.0, ref.cwiseAbs().maxCoeff());
        for (long i = 0; i < ref.size(); ++i)
            CHECK(std::abs(vals[static_cast<std::size_t>(i)] - ref[i]) / scale < 1e-12);
    }
}
