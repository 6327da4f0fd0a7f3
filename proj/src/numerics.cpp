#include "duet/numerics.hpp"

#include <algorithm>
#include <cstdlib>

namespace duet::num {

namespace {

Quadrature make_gauss_legendre(int order) {
    // Newton iteration on the Legendre recurrence, nodes seeded by the
    // Chebyshev-like asymptotic estimate.
    Quadrature q;
    q.x.resize(order);
    q.w.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        q.x[i] = -x;
        q.x[order - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        q.w[i] = w;
        q.w[order - 1 - i] = w;
    }
    return q;
}

} // namespace

const Quadrature& gauss_legendre(int order) {
    if (order < 1)
        throw invalid_argument("invalid-argument: quadrature order must be >= 1");
    static std::mutex mtx;
    static std::map<int, Quadrature> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end())
        it = cache.emplace(order, make_gauss_legendre(order)).first;
    return it->second;
}

double brent_root(const std::function<double(double)>& f, double a, double b,
                  RootOptions opt) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0)
        return a;
    if (fb == 0.0)
        return b;
    if (fa * fb > 0.0)
        throw invalid_argument("invalid-argument: root not bracketed");
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int it = 0; it < opt.max_iter; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * 1e-16 * std::abs(b) + 0.5 * opt.xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0)
            return b;
        if (opt.ftol > 0.0 && std::abs(fb) <= opt.ftol)
            return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // inverse quadratic / secant step
            double p, qq;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                const double q1 = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * q1 * (q1 - r) - (b - a) * (r - 1.0));
                qq = (q1 - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                qq = -qq;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * qq - std::abs(tol1 * qq), std::abs(e * qq))) {
                e = d;
                d = p / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        if ((fb > 0) == (fc > 0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    throw numerical_error("no-convergence: root iteration limit reached");
}

MinResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double xtol_rel, int max_iter) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    int evals = 2;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(b - a) <= xtol_rel * (std::abs(a) + std::abs(b)) * 0.5)
            break;
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        ++evals;
    }
    return (f1 < f2) ? MinResult{x1, f1, evals} : MinResult{x2, f2, evals};
}

double parabola_vertex(double xa, double fa, double xb, double fb, double xc, double fc) {
    const double d1 = (xb - xa) * (fb - fc);
    const double d2 = (xb - xc) * (fb - fa);
    const double denom = 2.0 * (d1 - d2);
    if (denom == 0.0)
        return xb;
    const double shift = ((xb - xa) * d1 - (xb - xc) * d2) / denom;
    if (!std::isfinite(shift))
        return xb;
    return xb - shift;
}

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, double h) {
    Eigen::VectorXd out(f.size());
    if (f.size() == 0)
        return out;
    out[0] = 0.0;
    for (Eigen::Index i = 1; i < f.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return out;
}

double hermite_function(long n, double y) {
    // psi_0 = pi^{-1/4} exp(-y^2/2); the Gaussian exponent is tracked
    // separately so the recurrence survives y^2/2 beyond the double range.
    double log_scale = -0.5 * y * y - 0.25 * std::log(pi);
    double p0 = 1.0, p1 = 0.0; // psi_k / exp(log_scale), psi_{k-1} / exp(..)
    for (long k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = std::sqrt(2.0 / (k + 1.0)) * y * p1 - std::sqrt(double(k) / (k + 1.0)) * p2;
        const double mag = std::abs(p0);
        if (mag > 1e250) {
            p0 *= 1e-250;
            p1 *= 1e-250;
            log_scale += std::log(1e250);
        } else if (mag > 0.0 && mag < 1e-250) {
            p0 *= 1e250;
            p1 *= 1e250;
            log_scale -= std::log(1e250);
        }
    }
    if (p0 == 0.0)
        return 0.0;
    const double lg = log_scale + std::log(std::abs(p0));
    if (lg < -700.0)
        return 0.0;
    return std::copysign(std::exp(lg), p0);
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (n == 0)
        return;
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex err_mtx;
    std::exception_ptr first_error;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i)
                    fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mtx);
                if (!first_error)
                    first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace duet::num
