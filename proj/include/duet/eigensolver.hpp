#pragma once

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <vector>

#include "duet/model.hpp"

// Interior eigenpairs of banded real symmetric matrices: Givens reduction to
// tridiagonal form, Sturm-sequence bisection for eigenvalues in an interval,
// inverse iteration on the original band for eigenvectors, plus a dense
// cubic-cost oracle for cross-checks.
namespace duet {

struct Tridiagonal {
    Eigen::VectorXd diag;
    Eigen::VectorXd sub; // size dim-1

    long dim() const { return diag.size(); }
    double norm1() const;
};

/// Handle for recovering eigenvectors of the original matrix; keeps the band
/// so vectors can be computed by inverse iteration at a tridiagonal eigenvalue.
class BandTransform {
public:
    BandTransform() = default;
    explicit BandTransform(std::shared_ptr<const BandedSymmetricMatrix> band)
        : band_(std::move(band)) {}
    const BandedSymmetricMatrix& band() const;

private:
    std::shared_ptr<const BandedSymmetricMatrix> band_;
};

/// Orthogonal similarity reduction of a symmetric band to tridiagonal form
/// (Givens rotations with bulge chasing). Already-tridiagonal input is
/// returned unchanged.
std::pair<Tridiagonal, BandTransform> reduce_to_tridiagonal(const BandedSymmetricMatrix& band);

/// Number of eigenvalues of T strictly below x (Sturm sequence count).
long sturm_count(const Tridiagonal& t, double x);

struct IntervalOptions {
    double abs_tol = -1.0;          // absolute bisection tolerance; < 0 -> tol_factor*|T|_1
    double abs_tol_factor = 1e-12;  // default tolerance relative to |T|_1
    long max_count = 512;           // guard: error out on wider intervals
};

/// All eigenvalues of T in (a, b], each bisected to the absolute tolerance.
std::vector<double> eigenvalues_in_interval(const Tridiagonal& t, double a, double b,
                                            IntervalOptions opt = {});

struct EigenvectorOptions {
    int max_iterations = 24;
    double residual_tol_factor = 1e-11; // |Hv - lambda v| <= factor * |H|_1
    double cluster_tol_factor = 1e-8;   // eigenvalues closer than this are one cluster
};

/// Unit eigenvector of the original banded matrix for an eigenvalue lambda of
/// its tridiagonal reduction (inverse iteration with a banded LU).
Eigen::VectorXd eigenvector(const Tridiagonal& t, double lambda, const BandTransform& transform,
                            EigenvectorOptions opt = {});

/// Vectors for a sorted set of eigenvalues; near-degenerate clusters are
/// reorthogonalized jointly. Column k corresponds to lambdas[k].
Eigen::MatrixXd eigenvectors(const std::vector<double>& lambdas, const BandTransform& transform,
                             EigenvectorOptions opt = {});

struct EigenResult {
    Eigen::VectorXd values;            // ascending
    Eigen::MatrixXd vectors;           // column k pairs with values[k]; may be empty
    Eigen::VectorXd residuals;         // |Hv - lambda v| / |H|_1 per pair
    std::array<long, 2> sturm_counts{0, 0}; // eigenvalue counts at interval endpoints
};

/// Full spectrum and vectors by the classical dense method (dim <= 2000).
EigenResult dense_eigen_oracle(const Eigen::MatrixXd& symmetric);

/// Convenience composition: reduce, bisect in (a, b], recover vectors.
EigenResult eigenpairs_in_interval(const BandedSymmetricMatrix& band, double a, double b,
                                   IntervalOptions iopt = {}, EigenvectorOptions vopt = {});

} // namespace duet
