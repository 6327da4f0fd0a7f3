#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "duet/common.hpp"

// Small self-contained numerical kernels shared across the library:
// Gauss-Legendre rules, bracketing root finds, golden-section minimization,
// scaled Hermite functions, and a deterministic parallel map.
namespace duet::num {

struct Quadrature {
    Eigen::VectorXd x; // nodes on [-1, 1]
    Eigen::VectorXd w;
};

/// Gauss-Legendre nodes/weights on [-1,1], cached per order.
const Quadrature& gauss_legendre(int order);

/// \int_a^b f dx with a single Gauss-Legendre panel of the given order.
template <class F>
double integrate_gl(F&& f, double a, double b, int order = 64) {
    const Quadrature& q = gauss_legendre(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < q.x.size(); ++i)
        acc += q.w[i] * f(mid + half * q.x[i]);
    return acc * half;
}

/// Composite Gauss-Legendre over `panels` equal subintervals.
template <class F>
double integrate_gl_composite(F&& f, double a, double b, int order, int panels) {
    double acc = 0.0;
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p)
        acc += integrate_gl(f, a + p * step, a + (p + 1) * step, order);
    return acc;
}

struct RootOptions {
    double xtol = 1e-14;
    double ftol = 0.0; // if > 0, stop once |f| <= ftol
    int max_iter = 200;
};

/// Brent's method on [a,b]; requires f(a) and f(b) of opposite (or zero) sign.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  RootOptions opt = {});

struct MinResult {
    double x;
    double fx;
    int evaluations;
};

/// Golden-section minimization of a unimodal f on [a,b].
MinResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double xtol_rel, int max_iter = 120);

/// Vertex of the parabola through three points; falls back to xb.
double parabola_vertex(double xa, double fa, double xb, double fb, double xc, double fc);

/// Cumulative trapezoid of samples f on a uniform grid with spacing h;
/// out[0] = 0.
Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& f, double h);

/// Normalized harmonic-oscillator eigenfunction psi_n(y) (unit frequency,
/// \int psi_n^2 dy = 1). Stable for any n via an exponent-tracked three-term
/// recurrence; underflows cleanly to 0 deep in the classically forbidden tail.
double hermite_function(long n, double y);

/// Deterministic parallel loop: fn(i) for i in [0,n). Work is split in
/// contiguous blocks; exceptions are rethrown on the calling thread.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

} // namespace duet::num
