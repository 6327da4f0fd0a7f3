#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "duet/common.hpp"

// Two spin-1/2 systems coupled linearly to one oscillator:
//
//   H = dE1 sz1/hbar + dE2 sz2/hbar + hw0 a'a
//       + U1 (a'+a) 2sx1/hbar + U2 (a'+a) 2sx2/hbar
//
// assembled on the truncated product basis |n>|m1>|m2> as a banded real
// symmetric matrix. Energies are quoted in units of hw0 unless the unit is
// changed explicitly.
namespace duet {

enum class Variant : std::uint8_t { Standard, Conjugate, Lossy };

struct ModelParams {
    double delta_e1 = 1.0;
    double delta_e2 = 1.0;
    double hbar_omega0 = 1.0;
    double u1 = 0.0;
    double u2 = 0.0;
    Variant variant = Variant::Standard;
    double gamma = 0.0; // intermediate-state loss rate; meaningful for Lossy only

    /// Throws invalid_argument on hard invariant violations.
    void validate() const;

    /// Non-fatal advisories (e.g. outside the multiphoton regime).
    std::vector<std::string> advisories() const;

    double g1(double n) const { return u1 * std::sqrt(n) / delta_e1; }
    double g2(double n) const { return u2 * std::sqrt(n) / delta_e2; }

    /// Couplings from dimensionless g_j = U_j sqrt(n0) / dE_j.
    static ModelParams from_g(double de1, double de2, double hw0, double g1, double g2,
                              double n0, Variant variant = Variant::Standard,
                              double gamma = 0.0);
};

// m_j = s_j / 2 with s_j in {-1, +1}.
struct SpinConfig {
    int s1 = -1;
    int s2 = -1;

    double m1() const { return 0.5 * s1; }
    double m2() const { return 0.5 * s2; }
    int m(int which) const { return which == 1 ? s1 : s2; }
    SpinConfig flipped(int which) const {
        return which == 1 ? SpinConfig{-s1, s2} : SpinConfig{s1, -s2};
    }
    bool operator==(const SpinConfig&) const = default;
};

inline constexpr SpinConfig spin_dd{-1, -1};
inline constexpr SpinConfig spin_du{-1, +1};
inline constexpr SpinConfig spin_ud{+1, -1};
inline constexpr SpinConfig spin_uu{+1, +1};

// Block-internal order (m1,m2) = (-,-), (-,+), (+,-), (+,+); fixes the
// bandwidth bound and keeps emitted files stable.
inline constexpr std::array<SpinConfig, 4> spin_order{spin_dd, spin_du, spin_ud, spin_uu};

inline int spin_slot(SpinConfig s) { return (s.s1 > 0 ? 2 : 0) + (s.s2 > 0 ? 1 : 0); }

struct FockWindow {
    long n_min = 0;
    long n_max = 0;

    long count() const { return n_max - n_min + 1; }
};

/// n-major bijection (n, m1, m2) <-> flat index over a Fock window.
class BasisIndex {
public:
    explicit BasisIndex(FockWindow window);

    const FockWindow& window() const { return window_; }
    long dim() const { return 4 * window_.count(); }

    long encode(long n, SpinConfig spin) const;
    std::pair<long, SpinConfig> decode(long index) const;

private:
    FockWindow window_;
};

/// Real symmetric matrix stored as its lower band: band(d, j) = A(j+d, j).
class BandedSymmetricMatrix {
public:
    BandedSymmetricMatrix(long dim, int half_bandwidth);

    long dim() const { return dim_; }
    int half_bandwidth() const { return hb_; }

    double at(long i, long j) const;
    double& band(int d, long j) { return bands_(d, j); }
    double band(int d, long j) const { return bands_(d, j); }
    const Eigen::MatrixXd& bands() const { return bands_; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd to_dense() const;
    double norm1() const;

private:
    long dim_;
    int hb_;
    Eigen::MatrixXd bands_; // (hb+1) x dim
};

BasisIndex build_basis(FockWindow window);

/// Eq.-of-motion matrix of the standard variant on the given basis.
/// Diagonal dE1 m1 + dE2 m2 + n hw0; off-diagonal U_j sqrt(n+1) between
/// states one oscillator quantum apart with spin j flipped.
BandedSymmetricMatrix assemble_hamiltonian(const ModelParams& params, const BasisIndex& basis);

/// Uncoupled level energy dE1 m1 + dE2 m2 + n hw0.
double bare_level(long n, SpinConfig spin, const ModelParams& params);

/// Default truncation window around n0 (coupling spreads Fock occupation by
/// O(g sqrt(n0))); callers grow it until tracked eigenvalues converge.
FockWindow default_window(const ModelParams& params, double n0);

FockWindow enlarged(FockWindow w, double factor);

/// Debug dump, one "row,col,value" line per stored nonzero.
void dump_csv(const BandedSymmetricMatrix& m, std::ostream& os);

} // namespace duet
