#include "duet/rotated_frame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "duet/io.hpp"
#include "duet/numerics.hpp"

namespace duet {

namespace {

struct SpinCouple {
    double m;  // +-1/2
    double de;
    double u;
};

inline double sqrt_term(double y, const SpinCouple& s) {
    return std::sqrt(s.de * s.de + 8.0 * s.u * s.u * y * y);
}

// ---------------------------------------------------------------------------
// Numerov discretization of  -u'' + v u = eps u  as the generalized pencil
// A x = eps B x with A = -delta2/h^2 + sym(B diag(v)), B = tridiag(1,10,1)/12.
// Tridiagonal and symmetric, O(h^4) accurate; eigenvalue counts come from the
// LDL^T inertia of A - eps B (B is positive definite).
// ---------------------------------------------------------------------------
struct NumerovPencil {
    Eigen::VectorXd v; // potential samples
    double h = 0.0;

    long dim() const { return v.size(); }

    double adiag(long i, double lam) const {
        return 2.0 / (h * h) + 10.0 * (v[i] - lam) / 12.0;
    }
    double aoff(long i, double lam) const { // coupling (i, i+1)
        return -1.0 / (h * h) + (v[i] + v[i + 1]) / 24.0 - lam / 12.0;
    }

    long count_below(double lam) const {
        const long n = dim();
        const double pivmin = 1e-300;
        long count = 0;
        double dprev = 1.0;
        for (long i = 0; i < n; ++i) {
            const double off = (i > 0) ? aoff(i - 1, lam) : 0.0;
            double d = adiag(i, lam) - (i > 0 ? off * off / dprev : 0.0);
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

    Eigen::VectorXd apply_a(const Eigen::VectorXd& x) const {
        const long n = dim();
        Eigen::VectorXd y(n);
        for (long i = 0; i < n; ++i) {
            double acc = adiag(i, 0.0) * x[i];
            if (i > 0)
                acc += aoff(i - 1, 0.0) * x[i - 1];
            if (i + 1 < n)
                acc += aoff(i, 0.0) * x[i + 1];
            y[i] = acc;
        }
        return y;
    }

    Eigen::VectorXd apply_b(const Eigen::VectorXd& x) const {
        const long n = dim();
        Eigen::VectorXd y(n);
        for (long i = 0; i < n; ++i) {
            double acc = 10.0 * x[i];
            if (i > 0)
                acc += x[i - 1];
            if (i + 1 < n)
                acc += x[i + 1];
            y[i] = acc / 12.0;
        }
        return y;
    }

    double rayleigh(const Eigen::VectorXd& x) const {
        return x.dot(apply_a(x)) / x.dot(apply_b(x));
    }
};

// Tridiagonal LU with partial pivoting for (A - lam B) x = rhs.
struct TridiagSolver {
    Eigen::VectorXd dl, d, du, du2;
    std::vector<int> swap_next;

    TridiagSolver(const NumerovPencil& p, double lam) {
        const long n = p.dim();
        d.resize(n);
        dl.resize(std::max<long>(0, n - 1));
        du.resize(std::max<long>(0, n - 1));
        du2 = Eigen::VectorXd::Zero(std::max<long>(0, n - 2));
        swap_next.assign(n, 0);
        for (long i = 0; i < n; ++i)
            d[i] = p.adiag(i, lam);
        for (long i = 0; i + 1 < n; ++i)
            dl[i] = du[i] = p.aoff(i, lam);

        const double floor = 1e-3 * std::numeric_limits<double>::epsilon() *
                             (p.v.cwiseAbs().maxCoeff() + 4.0 / (p.h * p.h) + std::abs(lam));
        for (long i = 0; i + 1 < n; ++i) {
            if (std::abs(d[i]) >= std::abs(dl[i])) {
                if (std::abs(d[i]) < floor)
                    d[i] = (d[i] < 0 ? -floor : floor);
                const double m = dl[i] / d[i];
                dl[i] = m; // store multiplier
                d[i + 1] -= m * du[i];
            } else {
                // swap rows i, i+1
                swap_next[i] = 1;
                const double m = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = m;
                const double tmp = d[i + 1];
                d[i + 1] = du[i] - m * tmp;
                du[i] = tmp;
                if (i + 2 < n) {
                    du2[i] = du[i + 1];
                    du[i + 1] = -m * du[i + 1];
                }
            }
        }
        const long last = n - 1;
        if (std::abs(d[last]) < floor)
            d[last] = (d[last] < 0 ? -floor : floor);
    }

    void solve(Eigen::VectorXd& b) const {
        const long n = d.size();
        for (long i = 0; i + 1 < n; ++i) {
            if (swap_next[i])
                std::swap(b[i], b[i + 1]);
            b[i + 1] -= dl[i] * b[i];
        }
        b[n - 1] /= d[n - 1];
        if (n >= 2)
            b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for (long i = n - 3; i >= 0; --i)
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
};

std::vector<SpinCouple> couples(SpinConfig spin, const ModelParams& p) {
    return {{spin.m1(), p.delta_e1, p.u1}, {spin.m2(), p.delta_e2, p.u2}};
}

double potential_value(double y, const std::vector<SpinCouple>& cs, double hw0) {
    double v = y * y;
    for (const auto& c : cs)
        v += 2.0 * c.m / hw0 * sqrt_term(y, c);
    return v;
}

// Crude phase-integral estimate of eps_n, used only to size grids.
double estimate_epsilon(const ModelParams& p, SpinConfig spin, long n) {
    const auto cs = couples(spin, p);
    auto v = [&](double y) { return potential_value(y, cs, p.hbar_omega0); };
    const double vmin = v(0.0);
    auto turning = [&](double eps) {
        double hi = 1.0;
        while (v(hi) < eps)
            hi *= 1.5;
        double lo = 0.0;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (v(mid) < eps ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto phase = [&](double eps) {
        const double yt = turning(eps);
        return 2.0 * num::integrate_gl(
                         [&](double s) {
                             const double y = yt * std::sin(s);
                             return std::sqrt(std::max(eps - v(y), 0.0)) * yt * std::cos(s);
                         },
                         0.0, 0.5 * pi, 96);
    };
    const double target = (static_cast<double>(n) + 0.5) * pi;
    double lo = vmin + 1e-9, hi = vmin + 8.0;
    while (phase(hi) < target)
        hi = vmin + 2.0 * (hi - vmin);
    return num::brent_root([&](double e) { return phase(e) - target; }, lo, hi,
                           {.xtol = 1e-6, .ftol = 1e-7});
}

Grid1d grid_for(const ModelParams& p, const std::vector<std::pair<SpinConfig, long>>& levels,
                double ppw, double tail) {
    double eps_max = -std::numeric_limits<double>::infinity();
    for (const auto& [spin, n] : levels)
        eps_max = std::max(eps_max, estimate_epsilon(p, spin, n) + 2.0);

    auto vmin_any = [&](double y) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [spin, n] : levels) {
            (void)n;
            best = std::min(best, potential_value(y, couples(spin, p), p.hbar_omega0));
        }
        return best;
    };

    // outermost turning point among the levels, then the potential floor
    double edge = 1.0;
    while (vmin_any(edge) < eps_max)
        edge *= 1.25;
    double vmin = std::numeric_limits<double>::infinity();
    for (double y = 0.0; y <= edge; y += std::max(edge / 512.0, 1e-3))
        vmin = std::min(vmin, vmin_any(y));
    const double half = edge + tail;
    const double kmax = std::sqrt(std::max(eps_max - vmin, 1.0));
    const double h = 2.0 * pi / (ppw * kmax);
    Eigen::Index size = static_cast<Eigen::Index>(std::ceil(2.0 * half / h)) + 1;
    if (size % 2 == 0)
        ++size; // keep y = 0 on the grid
    Grid1d g;
    g.h = 2.0 * half / static_cast<double>(size - 1);
    g.y0 = -half;
    g.size = size;
    return g;
}

long count_nodes(const Eigen::VectorXd& u) {
    const double floor = 1e-9 * u.cwiseAbs().maxCoeff();
    long nodes = 0;
    double prev = 0.0;
    for (long i = 0; i < u.size(); ++i) {
        const double x = u[i];
        if (std::abs(x) <= floor)
            continue;
        if (prev != 0.0 && ((x > 0) != (prev > 0)))
            ++nodes;
        prev = x;
    }
    return nodes;
}

// Exact expectation of f against |psi_n|^2 via composite Simpson; the
// integrand oscillates on the scale pi/sqrt(2n+1).
template <class F>
double harmonic_expectation_exact(F&& f, long n, double ppw = 32.0) {
    const double yt = std::sqrt(2.0 * static_cast<double>(n) + 1.0);
    const double half = yt + 8.0;
    const double lam_min = pi / std::max(yt, 1.0); // half-wavelength of psi^2
    double h = lam_min / ppw;
    Eigen::Index m = static_cast<Eigen::Index>(std::ceil(2.0 * half / h));
    if (m % 2 == 1)
        ++m;
    h = 2.0 * half / static_cast<double>(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i <= m; ++i) {
        const double y = -half + h * static_cast<double>(i);
        const double psi = num::hermite_function(n, y);
        if (psi == 0.0)
            continue;
        const double w = (i == 0 || i == m) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f(y) * psi * psi;
    }
    return acc * h / 3.0;
}

// Classical (WKB) density of harmonic level n: arcsine law on
// [-sqrt(2n+1), sqrt(2n+1)]; agrees with the exact expectation to O(n^-2).
template <class F>
double harmonic_expectation_classical(F&& f, double n) {
    const double yt2 = 2.0 * n + 1.0;
    return 2.0 / pi *
           num::integrate_gl([&](double th) { return f(std::sqrt(yt2) * std::sin(th)); }, 0.0,
                             0.5 * pi, 128);
}

constexpr long kExactExpectationMaxN = 3000;

void require_common_grid(const OscillatorLevel& a, const OscillatorLevel& b) {
    if (!a.grid.same_as(b.grid))
        throw invalid_argument("grid-mismatch: levels must share one grid");
}

} // namespace

Eigen::VectorXd Grid1d::points() const {
    Eigen::VectorXd p(size);
    for (Eigen::Index i = 0; i < size; ++i)
        p[i] = y(i);
    return p;
}

bool Grid1d::same_as(const Grid1d& other, double rel_tol) const {
    const double scale = std::max({std::abs(y0), std::abs(other.y0), h, 1e-300});
    return size == other.size && std::abs(y0 - other.y0) <= rel_tol * scale &&
           std::abs(h - other.h) <= rel_tol * h;
}

double potential_v(double y, SpinConfig spin, const ModelParams& params) {
    return potential_value(y, couples(spin, params), params.hbar_omega0);
}

Eigen::ArrayXd potential_v(const Eigen::ArrayXd& y, SpinConfig spin, const ModelParams& params) {
    Eigen::ArrayXd out(y.size());
    const auto cs = couples(spin, params);
    for (Eigen::Index i = 0; i < y.size(); ++i)
        out[i] = potential_value(y[i], cs, params.hbar_omega0);
    return out;
}

Grid1d common_grid(const ModelParams& params,
                   const std::vector<std::pair<SpinConfig, long>>& levels,
                   double points_per_wavelength, double tail) {
    params.validate();
    if (points_per_wavelength < 12.0)
        throw invalid_argument("resolution-error: need at least 12 points per wavelength");
    return grid_for(params, levels, points_per_wavelength, tail);
}

OscillatorLevel solve_h0_level(const ModelParams& params, SpinConfig spin, long n,
                               const H0Options& options) {
    params.validate();
    if (n < 0)
        throw invalid_argument("invalid-argument: level index must be >= 0");

    Grid1d grid = options.grid ? *options.grid
                               : grid_for(params, {{spin, n}}, options.points_per_wavelength,
                                          options.tail);
    if (grid.size < 16)
        throw invalid_argument("resolution-error: grid too small");

    NumerovPencil pencil;
    pencil.h = grid.h;
    pencil.v.resize(grid.size);
    const auto cs = couples(spin, params);
    for (Eigen::Index i = 0; i < grid.size; ++i)
        pencil.v[i] = potential_value(grid.y(i), cs, params.hbar_omega0);

    const double vmin = pencil.v.minCoeff();
    const double v_edge = std::min(pencil.v[0], pencil.v[grid.size - 1]);

    // resolution precondition at the target level (local wavelength at eps)
    {
        const double eps_rough = std::min(vmin + 2.0 * n + 3.0, v_edge);
        const double kmax = std::sqrt(std::max(eps_rough - vmin, 1.0));
        if (grid.h > 2.0 * pi / (12.0 * kmax) * (1.0 + 1e-9))
            throw invalid_argument("resolution-error: fewer than 12 grid points per local "
                                   "wavelength at the requested level");
    }

    // bracket the n-th pencil eigenvalue
    double lo = vmin - 1.0;
    while (pencil.count_below(lo) > 0)
        lo = vmin - 2.0 * (vmin - lo);
    double hi = vmin + 4.0;
    while (pencil.count_below(hi) < n + 1) {
        hi = vmin + 2.0 * (hi - vmin);
        if (hi > v_edge + 1.0)
            throw invalid_argument("capacity-error: level index beyond what the grid can hold");
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (pencil.count_below(mid) > n ? hi : lo) = mid;
    }
    double lam = 0.5 * (lo + hi);
    if (lam > v_edge - 1.0)
        throw invalid_argument("capacity-error: level is not bound within the grid extent");

    // inverse iteration + Rayleigh polish
    Eigen::VectorXd u(grid.size);
    {
        TridiagSolver lu(pencil, lam);
        std::uint64_t state = 0x243f6a8885a308d3ULL ^ static_cast<std::uint64_t>(n);
        for (Eigen::Index i = 0; i < grid.size; ++i) {
            state = state * 6364136223846793005ULL + 1442695040888963407ULL;
            u[i] = 2.0 * (static_cast<double>(state >> 11) * 0x1.0p-53) - 1.0;
        }
        u.normalize();
        for (int it = 0; it < 4; ++it) {
            Eigen::VectorXd rhs = pencil.apply_b(u);
            lu.solve(rhs);
            rhs.normalize();
            u = rhs;
        }
        const double rq = pencil.rayleigh(u);
        TridiagSolver lu2(pencil, rq);
        Eigen::VectorXd rhs = pencil.apply_b(u);
        lu2.solve(rhs);
        rhs.normalize();
        u = rhs;
        lam = pencil.rayleigh(u);
    }

    const long nodes = count_nodes(u);
    if (nodes != n)
        throw numerical_error("no-convergence: converged to " + std::to_string(nodes) +
                              " nodes instead of " + std::to_string(n) + "; refine the grid");

    // sign convention: positive leading lobe
    Eigen::Index first = 0;
    const double floor = 1e-9 * u.cwiseAbs().maxCoeff();
    while (first < u.size() && std::abs(u[first]) <= floor)
        ++first;
    if (first < u.size() && u[first] < 0)
        u = -u;

    u /= std::sqrt(u.squaredNorm() * grid.h);

    OscillatorLevel level;
    level.n = n;
    level.spin = spin;
    level.epsilon = lam;
    level.grid = grid;
    level.u = std::move(u);
    return level;
}

double rayleigh_quotient(const OscillatorLevel& level, const ModelParams& params) {
    NumerovPencil pencil;
    pencil.h = level.grid.h;
    pencil.v.resize(level.grid.size);
    const auto cs = couples(level.spin, params);
    for (Eigen::Index i = 0; i < level.grid.size; ++i)
        pencil.v[i] = potential_value(level.grid.y(i), cs, params.hbar_omega0);
    return pencil.rayleigh(level.u);
}

double dressed_energy(double delta_e, double u_coupling, double n, DressedMethod method) {
    if (!(delta_e > 0.0))
        throw invalid_argument("invalid-argument: transition energy must be positive");
    if (n < 0.0)
        throw invalid_argument("invalid-argument: occupation must be >= 0");
    if (u_coupling == 0.0)
        return delta_e;
    const double c = 8.0 * u_coupling * u_coupling / (delta_e * delta_e);
    auto f = [&](double y) { return std::sqrt(1.0 + c * y * y); };
    const bool integral_n = std::floor(n) == n;
    if (method == DressedMethod::HarmonicExpectation && integral_n &&
        n <= static_cast<double>(kExactExpectationMaxN))
        return delta_e * harmonic_expectation_exact(f, static_cast<long>(n));
    return delta_e * harmonic_expectation_classical(f, n);
}

double i12_numeric(const OscillatorLevel& a, const OscillatorLevel& b, const ModelParams& params) {
    require_common_grid(a, b);
    const double c1 = 8.0 * params.u1 * params.u1 / (params.delta_e1 * params.delta_e1);
    const double c2 = 8.0 * params.u2 * params.u2 / (params.delta_e2 * params.delta_e2);
    const Eigen::Index m = a.grid.size;
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double y = a.grid.y(i);
        const double y2 = y * y;
        w[i] = 1.0 / ((1.0 + c1 * y2) * (1.0 + c2 * y2));
    }
    // weight in the symmetrized Numerov mass-matrix product
    // (B diag(w) + diag(w) B)/2: discrete levels are B-orthogonal, so the
    // O(h^2) cross-term of a plain sum drops out, and the form is exactly
    // symmetric under swapping the two levels
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        acc += 10.0 * w[i] * a.u[i] * b.u[i];
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        acc += 0.5 * (w[i] + w[i + 1]) * (a.u[i] * b.u[i + 1] + a.u[i + 1] * b.u[i]);
    return acc / 12.0 * a.grid.h;
}

double v12_element(const OscillatorLevel& a, const OscillatorLevel& b, const ModelParams& params) {
    if (!(a.spin == spin_du && b.spin == spin_ud))
        throw invalid_argument("selection-rule-error: spin-spin element couples (-,+) to (+,-)");
    return 2.0 * params.hbar_omega0 * (params.u1 / params.delta_e1) *
           (params.u2 / params.delta_e2) * i12_numeric(a, b, params);
}

double v1_element(const OscillatorLevel& a, const OscillatorLevel& b, const ModelParams& params,
                  int which_spin) {
    if (which_spin != 1 && which_spin != 2)
        throw invalid_argument("invalid-argument: which_spin must be 1 or 2");
    const bool flips_target =
        (which_spin == 1) ? (a.spin.s1 != b.spin.s1) : (a.spin.s2 != b.spin.s2);
    const bool spectator_same =
        (which_spin == 1) ? (a.spin.s2 == b.spin.s2) : (a.spin.s1 == b.spin.s1);
    if (!flips_target || !spectator_same)
        throw invalid_argument("selection-rule-error: V_j flips exactly spin j");
    require_common_grid(a, b);

    const double de = (which_spin == 1) ? params.delta_e1 : params.delta_e2;
    const double uc = (which_spin == 1) ? params.u1 : params.u2;
    const double amp = std::sqrt(2.0) * uc / de;
    const double c = 8.0 * uc * uc / (de * de);
    const double h = a.grid.h;
    const Eigen::Index m = a.grid.size;

    // fourth-order central derivative of u_b; the tails are numerically zero
    double acc = 0.0;
    for (Eigen::Index i = 2; i + 2 < m; ++i) {
        const double y = a.grid.y(i);
        const double denom = 1.0 + c * y * y;
        const double f = amp / denom;
        const double fp = -2.0 * amp * c * y / (denom * denom);
        const double ub_prime =
            (b.u[i - 2] - 8.0 * b.u[i - 1] + 8.0 * b.u[i + 1] - b.u[i + 2]) / (12.0 * h);
        acc += a.u[i] * (2.0 * f * ub_prime + fp * b.u[i]);
    }
    return 0.5 * params.hbar_omega0 * acc * h;
}

double w_potential(double y, const ModelParams& params, int which_spin) {
    if (which_spin != 1 && which_spin != 2)
        throw invalid_argument("invalid-argument: which_spin must be 1 or 2");
    const double de = (which_spin == 1) ? params.delta_e1 : params.delta_e2;
    const double uc = (which_spin == 1) ? params.u1 : params.u2;
    const double denom = 1.0 + 8.0 * uc * uc * y * y / (de * de);
    const double r = uc / de;
    return params.hbar_omega0 * r * r / (denom * denom);
}

PtSplitting pt_splitting_excitation_transfer(const ModelParams& params, long n, long delta_n,
                                             const H0Options& options) {
    if (delta_n % 2 != 0)
        throw invalid_argument("invalid-argument: excitation transfer exchanges an even "
                               "number of quanta");
    if (n + delta_n < 0 || n < 0)
        throw invalid_argument("invalid-argument: level indices must be >= 0");
    H0Options opts = options;
    if (!opts.grid)
        opts.grid = common_grid(params, {{spin_du, n}, {spin_ud, n + delta_n}},
                                options.points_per_wavelength, options.tail);
    OscillatorLevel a = solve_h0_level(params, spin_du, n, opts);
    OscillatorLevel b = solve_h0_level(params, spin_ud, n + delta_n, opts);

    PtSplitting out;
    out.i12 = i12_numeric(a, b, params);
    const double element = v12_element(a, b, params);
    out.value = 2.0 * std::abs(element);
    out.detuning = std::abs(a.energy(params) - b.energy(params));
    out.off_resonance = out.detuning > 10.0 * out.value;
    return out;
}

PtSplitting pt_splitting_energy_exchange(const ModelParams& params, long n, long delta_n,
                                         int which_spin, const H0Options& options) {
    if (delta_n % 2 == 0)
        throw invalid_argument("invalid-argument: energy exchange trades an odd number "
                               "of quanta");
    if (n + delta_n < 0 || n < 0)
        throw invalid_argument("invalid-argument: level indices must be >= 0");
    // excited state of spin j with the spectator down, against both spins down
    const SpinConfig up_j = (which_spin == 1) ? spin_ud : spin_du;
    H0Options opts = options;
    if (!opts.grid)
        opts.grid = common_grid(params, {{up_j, n}, {spin_dd, n + delta_n}},
                                options.points_per_wavelength, options.tail);
    OscillatorLevel a = solve_h0_level(params, up_j, n, opts);
    OscillatorLevel b = solve_h0_level(params, spin_dd, n + delta_n, opts);

    PtSplitting out;
    const double element = v1_element(a, b, params, which_spin);
    out.value = 2.0 * std::abs(element);
    out.detuning = std::abs(a.energy(params) - b.energy(params));
    out.off_resonance = out.detuning > 10.0 * out.value;
    return out;
}

void export_csv(const OscillatorLevel& level, std::ostream& os) {
    os << "y,u\n";
    for (Eigen::Index i = 0; i < level.grid.size; ++i)
        os << io::sig9(level.grid.y(i)) << ',' << io::sig9(level.u[i]) << '\n';
}

} // namespace duet
