#include "duet/model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "duet/io.hpp"

namespace duet {

void ModelParams::validate() const {
    if (!(delta_e1 > 0.0) || !(delta_e2 > 0.0))
        throw invalid_argument("invalid-argument: transition energies must be positive");
    if (!(hbar_omega0 > 0.0))
        throw invalid_argument("invalid-argument: oscillator quantum must be positive");
    if (u1 < 0.0 || u2 < 0.0 || !std::isfinite(u1) || !std::isfinite(u2))
        throw invalid_argument("invalid-argument: couplings must be finite and >= 0");
    if (variant == Variant::Lossy && gamma < 0.0)
        throw invalid_argument("invalid-argument: loss rate must be >= 0");
}

std::vector<std::string> ModelParams::advisories() const {
    std::vector<std::string> out;
    if (hbar_omega0 >= std::min(delta_e1, delta_e2))
        out.push_back("multiphoton-regime: hbar_omega0 >= min(delta_e1, delta_e2); "
                      "the dressed-level analysis assumes a much smaller oscillator quantum");
    return out;
}

ModelParams ModelParams::from_g(double de1, double de2, double hw0, double g1, double g2,
                                double n0, Variant variant, double gamma) {
    if (!(n0 > 0.0))
        throw invalid_argument("invalid-argument: n0 must be positive");
    ModelParams p;
    p.delta_e1 = de1;
    p.delta_e2 = de2;
    p.hbar_omega0 = hw0;
    p.u1 = g1 * de1 / std::sqrt(n0);
    p.u2 = g2 * de2 / std::sqrt(n0);
    p.variant = variant;
    p.gamma = gamma;
    p.validate();
    return p;
}

BasisIndex::BasisIndex(FockWindow window) : window_(window) {
    if (window.n_min < 0 || window.n_max <= window.n_min)
        throw invalid_argument("invalid-argument: Fock window empty or negative");
}

long BasisIndex::encode(long n, SpinConfig spin) const {
    if (n < window_.n_min || n > window_.n_max)
        throw invalid_argument("invalid-argument: Fock index outside window");
    return 4 * (n - window_.n_min) + spin_slot(spin);
}

std::pair<long, SpinConfig> BasisIndex::decode(long index) const {
    if (index < 0 || index >= dim())
        throw invalid_argument("invalid-argument: basis index out of range");
    return {window_.n_min + index / 4, spin_order[static_cast<std::size_t>(index % 4)]};
}

BandedSymmetricMatrix::BandedSymmetricMatrix(long dim, int half_bandwidth)
    : dim_(dim), hb_(half_bandwidth), bands_(Eigen::MatrixXd::Zero(half_bandwidth + 1, dim)) {
    if (dim < 1 || half_bandwidth < 0)
        throw invalid_argument("invalid-argument: bad banded-matrix shape");
}

double BandedSymmetricMatrix::at(long i, long j) const {
    if (i < j)
        std::swap(i, j);
    const long d = i - j;
    return d > hb_ ? 0.0 : bands_(d, j);
}

Eigen::VectorXd BandedSymmetricMatrix::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(dim_);
    for (long j = 0; j < dim_; ++j) {
        y[j] += bands_(0, j) * x[j];
        const long dmax = std::min<long>(hb_, dim_ - 1 - j);
        for (long d = 1; d <= dmax; ++d) {
            const double v = bands_(d, j);
            y[j + d] += v * x[j];
            y[j] += v * x[j + d];
        }
    }
    return y;
}

Eigen::MatrixXd BandedSymmetricMatrix::to_dense() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim_, dim_);
    for (long j = 0; j < dim_; ++j) {
        const long dmax = std::min<long>(hb_, dim_ - 1 - j);
        for (long d = 0; d <= dmax; ++d) {
            a(j + d, j) = bands_(d, j);
            a(j, j + d) = bands_(d, j);
        }
    }
    return a;
}

double BandedSymmetricMatrix::norm1() const {
    double best = 0.0;
    Eigen::VectorXd col_sum = Eigen::VectorXd::Zero(dim_);
    for (long j = 0; j < dim_; ++j) {
        col_sum[j] += std::abs(bands_(0, j));
        const long dmax = std::min<long>(hb_, dim_ - 1 - j);
        for (long d = 1; d <= dmax; ++d) {
            const double v = std::abs(bands_(d, j));
            col_sum[j] += v;
            col_sum[j + d] += v;
        }
    }
    for (long j = 0; j < dim_; ++j)
        best = std::max(best, col_sum[j]);
    return best;
}

BasisIndex build_basis(FockWindow window) { return BasisIndex(window); }

BandedSymmetricMatrix assemble_hamiltonian(const ModelParams& params, const BasisIndex& basis) {
    params.validate();
    if (params.variant != Variant::Standard)
        throw invalid_argument("unsupported-variant: only the standard variant is "
                               "assembled exactly; conjugate/lossy are handled by the "
                               "finite-basis model");

    const FockWindow w = basis.window();
    BandedSymmetricMatrix h(basis.dim(), 6);

    for (long n = w.n_min; n <= w.n_max; ++n) {
        for (const SpinConfig& s : spin_order) {
            const long i = basis.encode(n, s);
            h.band(0, i) = bare_level(n, s, params);
        }
        if (n == w.n_max)
            continue;
        // sigma_x selection rule: n -> n+1 with exactly one spin flipped
        const double amp = std::sqrt(static_cast<double>(n + 1));
        for (const SpinConfig& s : spin_order) {
            const long col = basis.encode(n, s);
            const long row1 = basis.encode(n + 1, s.flipped(1));
            const long row2 = basis.encode(n + 1, s.flipped(2));
            h.band(static_cast<int>(row1 - col), col) += params.u1 * amp;
            h.band(static_cast<int>(row2 - col), col) += params.u2 * amp;
        }
    }
    return h;
}

double bare_level(long n, SpinConfig spin, const ModelParams& params) {
    return params.delta_e1 * spin.m1() + params.delta_e2 * spin.m2() +
           static_cast<double>(n) * params.hbar_omega0;
}

FockWindow default_window(const ModelParams& params, double n0) {
    const double g = std::max(params.g1(n0), params.g2(n0));
    const long half = static_cast<long>(std::ceil(std::max(200.0, 8.0 * g * std::sqrt(n0))));
    FockWindow w;
    w.n_min = std::max<long>(0, static_cast<long>(std::floor(n0)) - half);
    w.n_max = static_cast<long>(std::ceil(n0)) + half;
    return w;
}

FockWindow enlarged(FockWindow w, double factor) {
    const long half = (w.n_max - w.n_min) / 2;
    const long mid = (w.n_max + w.n_min) / 2;
    const long nh = static_cast<long>(std::ceil(half * factor));
    return FockWindow{std::max<long>(0, mid - nh), mid + nh};
}

void dump_csv(const BandedSymmetricMatrix& m, std::ostream& os) {
    os << "row,col,value\n";
    for (long j = 0; j < m.dim(); ++j) {
        const long dmax = std::min<long>(m.half_bandwidth(), m.dim() - 1 - j);
        for (long d = 0; d <= dmax; ++d) {
            const double v = m.band(static_cast<int>(d), j);
            if (v != 0.0)
                os << (j + d) << ',' << j << ',' << io::sig9(v) << '\n';
        }
    }
}

} // namespace duet
