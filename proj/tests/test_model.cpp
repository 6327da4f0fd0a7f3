#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <sstream>

#include "duet/eigensolver.hpp"
#include "duet/model.hpp"

using namespace duet;

namespace {

// Independent dense construction straight from the operator definition:
// kron(osc, spin1, spin2) with a'+a built from ladder amplitudes. Used as an
// oracle against the banded assembly path.
Eigen::MatrixXd dense_reference(const ModelParams& p, const FockWindow& w) {
    const long nw = w.count();
    Eigen::MatrixXd num = Eigen::MatrixXd::Zero(nw, nw);
    Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(nw, nw); // a' + a
    for (long k = 0; k < nw; ++k) {
        num(k, k) = static_cast<double>(w.n_min + k);
        if (k + 1 < nw) {
            const double amp = std::sqrt(static_cast<double>(w.n_min + k + 1));
            pos(k, k + 1) = amp;
            pos(k + 1, k) = amp;
        }
    }
    Eigen::Matrix2d sz, sx, id2;
    sz << -0.5, 0, 0, 0.5; // basis order (m=-1/2, m=+1/2)
    sx << 0, 1, 1, 0;      // 2 sx / hbar
    id2.setIdentity();

    auto kron3 = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c) {
        Eigen::MatrixXd ab(a.rows() * b.rows(), a.cols() * b.cols());
        for (long i = 0; i < a.rows(); ++i)
            for (long j = 0; j < a.cols(); ++j)
                ab.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        Eigen::MatrixXd abc(ab.rows() * c.rows(), ab.cols() * c.cols());
        for (long i = 0; i < ab.rows(); ++i)
            for (long j = 0; j < ab.cols(); ++j)
                abc.block(i * c.rows(), j * c.cols(), c.rows(), c.cols()) = ab(i, j) * c;
        return abc;
    };

    Eigen::MatrixXd id_n = Eigen::MatrixXd::Identity(nw, nw);
    return p.delta_e1 * kron3(id_n, sz, id2) + p.delta_e2 * kron3(id_n, id2, sz) +
           p.hbar_omega0 * kron3(num, id2, id2) + p.u1 * kron3(pos, sx, id2) +
           p.u2 * kron3(pos, id2, sx);
}

// The dense reference orders states as n-major with spin slots
// (m1,m2) = (-,-), (-,+), (+,-), (+,+) -- same as BasisIndex by construction.

} // namespace

TEST_CASE("basis layout and round trip") {
    BasisIndex small = build_basis({0, 1});
    CHECK(small.dim() == 8);
    CHECK(small.encode(0, spin_dd) == 0);

    BasisIndex big = build_basis({9000, 10600});
    CHECK(big.dim() == 6404);

    BasisIndex b = build_basis({3, 17});
    for (long i = 0; i < b.dim(); ++i) {
        auto [n, s] = b.decode(i);
        CHECK(b.encode(n, s) == i);
    }

    CHECK_THROWS_AS(build_basis({5, 5}), invalid_argument);
    CHECK_THROWS_AS(build_basis({-1, 4}), invalid_argument);
}

TEST_CASE("decoupled limit is diagonal with bare levels") {
    ModelParams p{.delta_e1 = 11, .delta_e2 = 13};
    BasisIndex basis = build_basis({0, 20});
    auto h = assemble_hamiltonian(p, basis);
    for (long i = 0; i < h.dim(); ++i)
        for (long j = 0; j < i; ++j)
            CHECK(h.at(i, j) == 0.0);
    for (long i = 0; i < h.dim(); ++i) {
        auto [n, s] = basis.decode(i);
        CHECK(h.at(i, i) == doctest::Approx(bare_level(n, s, p)).epsilon(1e-15));
    }
}

TEST_CASE("banded assembly matches independent dense operator build") {
    ModelParams p{.delta_e1 = 11, .delta_e2 = 13, .hbar_omega0 = 1, .u1 = 0.7, .u2 = 0.4};
    BasisIndex basis = build_basis({0, 30});
    auto h = assemble_hamiltonian(p, basis);
    Eigen::MatrixXd ref = dense_reference(p, basis.window());

    CHECK((h.to_dense() - ref).cwiseAbs().maxCoeff() < 1e-14);

    auto ours = dense_eigen_oracle(h.to_dense());
    auto theirs = dense_eigen_oracle(ref);
    const double scale = ref.cwiseAbs().maxCoeff();
    CHECK((ours.values - theirs.values).cwiseAbs().maxCoeff() / scale < 1e-12);
}

TEST_CASE("single off-diagonal element is U1 sqrt(n)") {
    ModelParams p{.delta_e1 = 5, .delta_e2 = 7, .hbar_omega0 = 1, .u1 = 0.3, .u2 = 0.2};
    BasisIndex basis = build_basis({0, 12});
    auto h = assemble_hamiltonian(p, basis);
    for (long n = 1; n <= 12; ++n) {
        const long i = basis.encode(n, spin_ud);
        const long j = basis.encode(n - 1, spin_dd);
        CHECK(h.at(i, j) == doctest::Approx(p.u1 * std::sqrt(double(n))).epsilon(1e-15));
    }
}

TEST_CASE("hermiticity, selection rule, band containment") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> un(0.05, 1.5);
    for (int rep = 0; rep < 3; ++rep) {
        ModelParams p{.delta_e1 = 3 + un(gen), .delta_e2 = 5 + un(gen), .hbar_omega0 = 1,
                      .u1 = un(gen), .u2 = un(gen)};
        BasisIndex basis = build_basis({0, 90}); // dim 364
        auto h = assemble_hamiltonian(p, basis);
        Eigen::MatrixXd d = h.to_dense();
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
        for (long i = 0; i < d.rows(); ++i) {
            for (long j = 0; j < i; ++j) {
                if (d(i, j) == 0.0)
                    continue;
                CHECK(i - j <= 7); // stays inside the documented bandwidth bound
                auto [ni, si] = basis.decode(i);
                auto [nj, sj] = basis.decode(j);
                CHECK(std::abs(ni - nj) == 1);
                const int flips = (si.s1 != sj.s1) + (si.s2 != sj.s2);
                CHECK(flips == 1);
            }
        }
    }
}

TEST_CASE("matvec agrees with dense apply") {
    ModelParams p{.delta_e1 = 4.5, .delta_e2 = 6.5, .hbar_omega0 = 1, .u1 = 0.4, .u2 = 0.9};
    BasisIndex basis = build_basis({0, 40});
    auto h = assemble_hamiltonian(p, basis);
    Eigen::MatrixXd d = h.to_dense();
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> un(-1, 1);
    Eigen::VectorXd x(h.dim());
    for (long i = 0; i < x.size(); ++i)
        x[i] = un(gen);
    Eigen::VectorXd y1 = h.apply(x);
    Eigen::VectorXd y2 = d * x;
    CHECK((y1 - y2).norm() / y2.norm() < 1e-14);
}

TEST_CASE("bare level arithmetic and degeneracy condition") {
    ModelParams p{.delta_e1 = 11, .delta_e2 = 13};
    CHECK(bare_level(0, spin_dd, p) == doctest::Approx(-12.0));
    CHECK(bare_level(100, spin_ud, p) == doctest::Approx(99.0));

    // bare_level(n,-,+) == bare_level(n+dn,+,-) iff dE2 - dE1 = dn * hw0
    const long dn = 2;
    ModelParams q{.delta_e1 = 11, .delta_e2 = 11 + double(dn)};
    for (long n : {10L, 500L}) {
        CHECK(bare_level(n, spin_du, q) ==
              doctest::Approx(bare_level(n + dn, spin_ud, q)).epsilon(1e-15));
        // dE2 - dE1 = 2 for q, so dn = 4 must not be degenerate
        CHECK(bare_level(n, spin_du, q) != doctest::Approx(bare_level(n + 4, spin_ud, q)));
    }
}

TEST_CASE("parameter validation and advisories") {
    ModelParams bad{.delta_e1 = -1, .delta_e2 = 13};
    CHECK_THROWS_AS(bad.validate(), invalid_argument);
    ModelParams bad2{.delta_e1 = 11, .delta_e2 = 13, .hbar_omega0 = 0};
    CHECK_THROWS_AS(bad2.validate(), invalid_argument);
    ModelParams bad3{.delta_e1 = 11, .delta_e2 = 13, .u1 = -0.5};
    CHECK_THROWS_AS(bad3.validate(), invalid_argument);

    ModelParams ok{.delta_e1 = 11, .delta_e2 = 13};
    CHECK(ok.advisories().empty());
    ModelParams loud{.delta_e1 = 0.5, .delta_e2 = 13};
    CHECK(loud.advisories().size() == 1);

    ModelParams nonstd{.delta_e1 = 11, .delta_e2 = 13, .variant = Variant::Conjugate};
    BasisIndex basis = build_basis({0, 4});
    CHECK_THROWS_AS(assemble_hamiltonian(nonstd, basis), invalid_argument);
}

TEST_CASE("spectrum scales linearly with the energy unit") {
    ModelParams p = ModelParams::from_g(9, 12, 1.0, 0.3, 0.2, 40);
    ModelParams p2 = p;
    p2.delta_e1 *= 2;
    p2.delta_e2 *= 2;
    p2.hbar_omega0 *= 2;
    p2.u1 *= 2;
    p2.u2 *= 2;
    BasisIndex basis = build_basis({0, 50});
    auto e1 = dense_eigen_oracle(assemble_hamiltonian(p, basis).to_dense());
    auto e2 = dense_eigen_oracle(assemble_hamiltonian(p2, basis).to_dense());
    CHECK((2.0 * e1.values - e2.values).cwiseAbs().maxCoeff() < 1e-11 * e2.values.cwiseAbs().maxCoeff());
}

TEST_CASE("truncation convergence near the tracked level") {
    // interior eigenvalue near n0*hw0 stops moving once the window converged
    const double n0 = 150;
    ModelParams p = ModelParams::from_g(21, 19, 1.0, 0.25, 0.25, n0);
    auto track = [&](FockWindow w) {
        BasisIndex basis = build_basis(w);
        auto h = assemble_hamiltonian(p, basis);
        auto [tri, handle] = reduce_to_tridiagonal(h);
        auto vals = eigenvalues_in_interval(tri, n0 - 0.5, n0 + 0.5, {.abs_tol = 1e-13});
        REQUIRE(!vals.empty());
        return vals.front();
    };
    FockWindow w{0, 360};
    const double lam = track(w);
    const double lam_big = track(enlarged(w, 1.25));
    CHECK(std::abs(lam_big - lam) < 1e-10 * p.hbar_omega0);
}

TEST_CASE("banded csv dump lists stored nonzeros") {
    ModelParams p{.delta_e1 = 3, .delta_e2 = 4, .u1 = 0.1, .u2 = 0.0};
    BasisIndex basis = build_basis({0, 1});
    auto h = assemble_hamiltonian(p, basis);
    std::ostringstream os;
    dump_csv(h, os);
    const std::string text = os.str();
    CHECK(text.rfind("row,col,value\n", 0) == 0);
    CHECK(text.find("6,0,") != std::string::npos); // U1 coupling (0,dd) -> (1,ud)
}
