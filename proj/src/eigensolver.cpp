#include "duet/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace duet {

namespace {

// Deterministic start vectors for inverse iteration (xorshift; independent of
// libstdc++ distribution internals so output is reproducible everywhere).
class SplitMix {
public:
    explicit SplitMix(std::uint64_t seed) : state_(seed) {}
    double uniform() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return 2.0 * (static_cast<double>(z >> 11) * 0x1.0p-53) - 1.0;
    }

private:
    std::uint64_t state_;
};

// LU factorization of a banded matrix with partial pivoting, LAPACK-style
// storage: work(ku + kl + 1 + kl rows). Here kl = ku = hb.
class BandedLU {
public:
    BandedLU(const BandedSymmetricMatrix& a, double shift, double pivot_floor) {
        n_ = a.dim();
        hb_ = a.half_bandwidth();
        rows_ = 3 * hb_ + 1;
        pivot_floor_ = std::max(pivot_floor, 1e-300);
        w_ = Eigen::MatrixXd::Zero(rows_, n_);
        piv_.resize(n_);
        // A(i,j) lands in w_(2*hb + i - j, j); top hb rows are pivoting fill.
        for (long j = 0; j < n_; ++j) {
            for (long i = std::max<long>(0, j - hb_); i <= std::min<long>(n_ - 1, j + hb_); ++i) {
                double v = a.at(i, j);
                if (i == j)
                    v -= shift;
                w_(2 * hb_ + i - j, j) = v;
            }
        }
        factor();
    }

    bool singular() const { return singular_; }

    void solve(Eigen::VectorXd& b) const {
        // forward substitution with the recorded row swaps
        for (long j = 0; j < n_ - 1; ++j) {
            const long p = piv_[j];
            if (p != j)
                std::swap(b[j], b[p]);
            const long last = std::min<long>(n_ - 1, j + hb_);
            for (long i = j + 1; i <= last; ++i)
                b[i] -= mult_(i - j - 1, j) * b[j];
        }
        // back substitution; U has up to 2*hb superdiagonals after pivoting
        for (long j = n_ - 1; j >= 0; --j) {
            b[j] /= w_(2 * hb_, j);
            const long up = std::min<long>(2 * hb_, j);
            for (long d = 1; d <= up; ++d)
                b[j - d] -= w_(2 * hb_ - d, j) * b[j];
        }
    }

private:
    void factor() {
        mult_ = Eigen::MatrixXd::Zero(std::max(hb_, 1), std::max<long>(1, n_ - 1));
        for (long j = 0; j < n_ - 1; ++j) {
            const long reach = std::min<long>(2 * hb_, n_ - 1 - j);
            long p = j;
            double best = std::abs(w_(2 * hb_, j));
            for (long i = 1; i <= std::min<long>(hb_, n_ - 1 - j); ++i) {
                const double cand = std::abs(w_(2 * hb_ + i, j));
                if (cand > best) {
                    best = cand;
                    p = j + i;
                }
            }
            piv_[j] = p;
            if (p != j)
                swap_rows(j, p);
            double pivot = w_(2 * hb_, j);
            if (std::abs(pivot) < pivot_floor_) {
                pivot = (pivot < 0 ? -pivot_floor_ : pivot_floor_);
                w_(2 * hb_, j) = pivot;
                singular_ = true;
            }
            for (long i = 1; i <= std::min<long>(hb_, n_ - 1 - j); ++i) {
                const double m = w_(2 * hb_ + i, j) / pivot;
                mult_(i - 1, j) = m;
                if (m != 0.0) {
                    for (long c = 1; c <= reach; ++c)
                        w_(2 * hb_ + i - c, j + c) -= m * w_(2 * hb_ - c, j + c);
                }
                w_(2 * hb_ + i, j) = 0.0;
            }
        }
        piv_[n_ - 1] = n_ - 1;
        if (std::abs(w_(2 * hb_, n_ - 1)) < pivot_floor_) {
            const double v = w_(2 * hb_, n_ - 1);
            w_(2 * hb_, n_ - 1) = (v < 0 ? -pivot_floor_ : pivot_floor_);
            singular_ = true;
        }
    }

    void swap_rows(long j, long p) {
        // called while factoring column j with p in (j, j+hb]; both rows have
        // active entries only in columns [j, j+2*hb]
        for (long c = j; c <= std::min<long>(n_ - 1, j + 2 * hb_); ++c) {
            const long d1 = 2 * hb_ + j - c;
            const long d2 = 2 * hb_ + p - c;
            std::swap(w_(d1, c), w_(d2, c));
        }
    }

    long n_ = 0;
    int hb_ = 0;
    long rows_ = 0;
    double pivot_floor_ = 1e-300;
    Eigen::MatrixXd w_;
    Eigen::MatrixXd mult_;
    std::vector<long> piv_;
    bool singular_ = false;
};

double tridiagonal_norm1(const Eigen::VectorXd& d, const Eigen::VectorXd& e) {
    double best = 0.0;
    const long n = d.size();
    for (long i = 0; i < n; ++i) {
        double s = std::abs(d[i]);
        if (i > 0)
            s += std::abs(e[i - 1]);
        if (i + 1 < n)
            s += std::abs(e[i]);
        best = std::max(best, s);
    }
    return best;
}

} // namespace

double Tridiagonal::norm1() const { return tridiagonal_norm1(diag, sub); }

const BandedSymmetricMatrix& BandTransform::band() const {
    if (!band_)
        throw invalid_argument("invalid-argument: empty transform handle");
    return *band_;
}

std::pair<Tridiagonal, BandTransform> reduce_to_tridiagonal(const BandedSymmetricMatrix& band) {
    const long n = band.dim();
    const int b = band.half_bandwidth();
    BandTransform handle(std::make_shared<BandedSymmetricMatrix>(band));

    Tridiagonal t;
    if (b <= 1) {
        t.diag = band.bands().row(0).transpose();
        t.sub = Eigen::VectorXd::Zero(std::max<long>(0, n - 1));
        if (b == 1)
            for (long j = 0; j + 1 < n; ++j)
                t.sub[j] = band.band(1, j);
        return {std::move(t), std::move(handle)};
    }

    // Working copy with one extra diagonal for the chased bulge.
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(b + 2, n);
    w.topRows(b + 1) = band.bands();

    auto entry = [&](long i, long j) -> double& {
        // lower-triangle accessor, i >= j, i - j <= b+1
        return w(i - j, j);
    };

    // Two-sided Givens rotation in the (p, p+1) plane, computed to zero the
    // entry A(p+1, q) against A(p, q), applied across the band (+bulge slot).
    auto rotate = [&](long p, long q, int d) {
        const double f = entry(p, q);
        const double g = entry(p + 1, q);
        if (g == 0.0)
            return false;
        const double r = std::hypot(f, g);
        const double c = f / r, s = g / r;

        for (long k = std::max<long>(0, p - d); k <= p - 1; ++k) {
            double& a = entry(p, k);
            double& bb = entry(p + 1, k);
            const double a0 = a, b0 = bb;
            a = c * a0 + s * b0;
            bb = -s * a0 + c * b0;
        }
        {
            double& app = entry(p, p);
            double& apq = entry(p + 1, p);
            double& aqq = entry(p + 1, p + 1);
            const double a0 = app, x0 = apq, q0 = aqq;
            app = c * c * a0 + 2.0 * c * s * x0 + s * s * q0;
            aqq = s * s * a0 - 2.0 * c * s * x0 + c * c * q0;
            apq = (c * c - s * s) * x0 + c * s * (q0 - a0);
        }
        for (long k = p + 2; k <= std::min<long>(n - 1, p + d + 1); ++k) {
            double& a = entry(k, p);
            double& bb = entry(k, p + 1);
            const double a0 = a, b0 = bb;
            a = c * a0 + s * b0;
            bb = -s * a0 + c * b0;
        }
        entry(p + 1, q) = 0.0; // annihilated by construction; drop the rounding residue
        return true;
    };

    for (int d = b; d >= 2; --d) {
        for (long j = 0; j + d < n; ++j) {
            if (entry(j + d, j) == 0.0)
                continue;
            // eliminate the outermost element of column j, then chase the
            // bulge (distance d+1 fill) down the band
            rotate(j + d - 1, j, d);
            for (long s = j + 2 * d; s < n; s += d) {
                if (entry(s, s - d - 1) == 0.0)
                    break;
                rotate(s - 1, s - d - 1, d);
            }
        }
    }

    t.diag = w.row(0).transpose();
    t.sub = Eigen::VectorXd::Zero(n - 1);
    for (long j = 0; j + 1 < n; ++j)
        t.sub[j] = w(1, j);
    return {std::move(t), std::move(handle)};
}

long sturm_count(const Tridiagonal& t, double x) {
    const long n = t.dim();
    const double pivmin = 1e-300;
    long count = 0;
    double dprev = 1.0;
    for (long i = 0; i < n; ++i) {
        const double off = (i > 0) ? t.sub[i - 1] : 0.0;
        double d = (t.diag[i] - x) - (i > 0 ? off * off / dprev : 0.0);
        if (d == 0.0)
            d = -pivmin;
        if (std::abs(d) < pivmin)
            d = (d < 0 ? -pivmin : pivmin);
        if (d < 0.0)
            ++count;
        dprev = d;
    }
    return count;
}

std::vector<double> eigenvalues_in_interval(const Tridiagonal& t, double a, double b,
                                            IntervalOptions opt) {
    if (!(a < b))
        throw invalid_argument("invalid-argument: interval requires a < b");
    const double norm = t.norm1();
    const double tol = opt.abs_tol > 0.0 ? opt.abs_tol
                                         : std::max(opt.abs_tol_factor * norm,
                                                    4.0 * std::numeric_limits<double>::min());
    const long ca = sturm_count(t, std::nextafter(a, b)); // (a, b]: exclude a itself
    const long cb = sturm_count(t, std::nextafter(b, std::numeric_limits<double>::infinity()));
    const long found = cb - ca;
    if (found > opt.max_count)
        throw invalid_argument("too-many-eigenvalues: interval holds " + std::to_string(found) +
                               " (> " + std::to_string(opt.max_count) + "); shrink it");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(found));
    for (long k = ca; k < cb; ++k) {
        // bisect for eigenvalue with index k (0-based, ascending)
        double lo = a, hi = b;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            if (sturm_count(t, mid) > k)
                hi = mid;
            else
                lo = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

namespace {

Eigen::VectorXd inverse_iteration(const BandedSymmetricMatrix& h, double lambda,
                                  const std::vector<Eigen::VectorXd>& orthogonal_to,
                                  const EigenvectorOptions& opt, std::uint64_t seed) {
    const long n = h.dim();
    const double norm1 = h.norm1();
    const double res_tol = opt.residual_tol_factor * std::max(norm1, 1e-300);
    const double pivot_floor = 1e-3 * std::numeric_limits<double>::epsilon() * std::max(norm1, 1.0);

    BandedLU lu(h, lambda, pivot_floor);
    SplitMix rng(seed);
    Eigen::VectorXd v(n);
    for (long i = 0; i < n; ++i)
        v[i] = rng.uniform();
    for (const auto& u : orthogonal_to)
        v -= u.dot(v) * u;
    v.normalize();

    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iterations; ++it) {
        lu.solve(v);
        for (const auto& u : orthogonal_to)
            v -= u.dot(v) * u;
        const double len = v.norm();
        if (!(len > 0.0) || !std::isfinite(len)) {
            // restart from a fresh random direction
            for (long i = 0; i < n; ++i)
                v[i] = rng.uniform();
            for (const auto& u : orthogonal_to)
                v -= u.dot(v) * u;
            v.normalize();
            continue;
        }
        v /= len;
        residual = (h.apply(v) - lambda * v).norm();
        // a second sweep settles the direction, not just the residual
        if (residual <= res_tol && it >= 1)
            return v;
    }
    if (residual <= 10.0 * res_tol)
        return v; // close enough that a Rayleigh polish downstream succeeds
    throw numerical_error("no-convergence: inverse iteration stalled (residual " +
                          std::to_string(residual / std::max(norm1, 1e-300)) + " of |H|_1)");
}

} // namespace

Eigen::VectorXd eigenvector(const Tridiagonal& t, double lambda, const BandTransform& transform,
                            EigenvectorOptions opt) {
    (void)t;
    return inverse_iteration(transform.band(), lambda, {}, opt, 0x5eedULL);
}

Eigen::MatrixXd eigenvectors(const std::vector<double>& lambdas, const BandTransform& transform,
                             EigenvectorOptions opt) {
    const BandedSymmetricMatrix& h = transform.band();
    const double cluster_tol = opt.cluster_tol_factor * std::max(h.norm1(), 1e-300);
    const long n = h.dim();
    Eigen::MatrixXd out(n, static_cast<long>(lambdas.size()));

    std::size_t k = 0;
    while (k < lambdas.size()) {
        std::size_t end = k + 1;
        while (end < lambdas.size() && lambdas[end] - lambdas[end - 1] <= cluster_tol)
            ++end;
        std::vector<Eigen::VectorXd> done;
        for (std::size_t j = k; j < end; ++j) {
            // shifts inside a cluster are separated slightly so the LU sees
            // distinct systems
            const double sep = cluster_tol * static_cast<double>(j - k) * 1e-2;
            Eigen::VectorXd v = inverse_iteration(h, lambdas[j] + sep, done, opt,
                                                  0x9e3779b9ULL + 0x100ULL * j);
            done.push_back(v);
            out.col(static_cast<long>(j)) = v;
        }
        k = end;
    }
    // one modified-Gram-Schmidt sweep removes residual cross-talk between
    // nearby (but unclustered) eigenvalues
    for (long j = 0; j < out.cols(); ++j) {
        for (long i = 0; i < j; ++i)
            out.col(j) -= out.col(i).dot(out.col(j)) * out.col(i);
        out.col(j).normalize();
    }
    return out;
}

EigenResult dense_eigen_oracle(const Eigen::MatrixXd& symmetric) {
    if (symmetric.rows() != symmetric.cols())
        throw invalid_argument("invalid-argument: matrix must be square");
    if (symmetric.rows() > 2000)
        throw invalid_argument("invalid-argument: dense oracle capped at dim 2000");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(symmetric);
    if (solver.info() != Eigen::Success)
        throw numerical_error("no-convergence: dense eigensolver failed");
    EigenResult r;
    r.values = solver.eigenvalues();
    r.vectors = solver.eigenvectors();
    const double norm1 = symmetric.cwiseAbs().colwise().sum().maxCoeff();
    r.residuals.resize(r.values.size());
    for (long k = 0; k < r.values.size(); ++k)
        r.residuals[k] = (symmetric * r.vectors.col(k) - r.values[k] * r.vectors.col(k)).norm() /
                         std::max(norm1, 1e-300);
    r.sturm_counts = {0, r.values.size()};
    return r;
}

EigenResult eigenpairs_in_interval(const BandedSymmetricMatrix& band, double a, double b,
                                   IntervalOptions iopt, EigenvectorOptions vopt) {
    auto [tri, handle] = reduce_to_tridiagonal(band);
    const std::vector<double> vals = eigenvalues_in_interval(tri, a, b, iopt);
    EigenResult r;
    r.values = Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<long>(vals.size()));
    r.sturm_counts = {sturm_count(tri, a), sturm_count(tri, b)};
    if (!vals.empty()) {
        r.vectors = eigenvectors(vals, handle, vopt);
        const double norm1 = band.norm1();
        r.residuals.resize(r.values.size());
        for (long k = 0; k < r.values.size(); ++k)
            r.residuals[k] =
                (band.apply(r.vectors.col(k)) - r.values[k] * r.vectors.col(k)).norm() /
                std::max(norm1, 1e-300);
    }
    return r;
}

} // namespace duet
