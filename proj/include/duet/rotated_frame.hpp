#pragma once

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>

#include "duet/model.hpp"

// Machinery of the rotated picture: the 1-D Schrodinger problem
//
//   eps u = [-d^2/dy^2 + v(y)] u,   eps = 2E/hw0 + 1,
//   v(y) = y^2 + (2 m1/hw0) sqrt(dE1^2 + 8 U1^2 y^2)
//              + (2 m2/hw0) sqrt(dE2^2 + 8 U2^2 y^2),
//
// dressed transition energies dE_j(g_j), and the perturbation matrix
// elements (V1/V2 first-derivative operators, the V12 spin-spin term, W_j
// potentials) that set level splittings at resonance.
namespace duet {

struct Grid1d {
    double y0 = 0.0; // leftmost point
    double h = 0.0;
    Eigen::Index size = 0;

    double y(Eigen::Index i) const { return y0 + h * static_cast<double>(i); }
    Eigen::VectorXd points() const;
    bool same_as(const Grid1d& other, double rel_tol = 1e-12) const;
};

struct OscillatorLevel {
    long n = 0;
    SpinConfig spin;
    double epsilon = 0.0; // normalized eigenvalue, eps = 2E/hw0 + 1
    Grid1d grid;
    Eigen::VectorXd u; // normalized so that sum(u^2) h = 1

    double energy(const ModelParams& p) const { return 0.5 * p.hbar_omega0 * (epsilon - 1.0); }
};

enum class DressedMethod { HarmonicExpectation, WkbSelfConsistent };

struct DressedEnergies {
    double de1 = 0.0;
    double de2 = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
    DressedMethod method = DressedMethod::HarmonicExpectation;
};

double potential_v(double y, SpinConfig spin, const ModelParams& params);
Eigen::ArrayXd potential_v(const Eigen::ArrayXd& y, SpinConfig spin, const ModelParams& params);

struct H0Options {
    double points_per_wavelength = 96.0; // >= 12 required at the target level
    double tail = 6.0;                   // grid extent beyond the outer turning point
    std::optional<Grid1d> grid;          // explicit grid overrides the automatic one
};

/// n-th eigenpair of the 1-D problem for one spin sector, located by Sturm
/// bisection on a Numerov discretization and verified by node count.
OscillatorLevel solve_h0_level(const ModelParams& params, SpinConfig spin, long n,
                               const H0Options& options = {});

/// <u|(-d^2/dy^2 + v)|u> evaluated with the same discretization that produced
/// the level; equals level.epsilon up to solver tolerance.
double rayleigh_quotient(const OscillatorLevel& level, const ModelParams& params);

/// Grid that can host every requested (spin, n) level at the given resolution.
Grid1d common_grid(const ModelParams& params,
                   const std::vector<std::pair<SpinConfig, long>>& levels,
                   double points_per_wavelength = 96.0, double tail = 6.0);

/// Bloch-Siegert dressed transition energy
///   dE(g) = dE <n| sqrt(1 + 8 U^2 y^2 / dE^2) |n>.
/// HarmonicExpectation integrates the exact |n> density (semiclassical density
/// above an internal n-threshold where both agree to ~1e-8); WkbSelfConsistent
/// averages over the WKB (classical) phase-space density of level n.
double dressed_energy(double delta_e, double u_coupling, double n,
                      DressedMethod method = DressedMethod::HarmonicExpectation);

/// Overlap integral I12 = int u_a L1(y) L2(y) u_b dy with the two Lorentzian
/// dressing weights L_j = [1 + 8 U_j^2 y^2/dE_j^2]^{-1}.
double i12_numeric(const OscillatorLevel& a, const OscillatorLevel& b, const ModelParams& params);

/// Spin-spin matrix element <a|V12|b> = 2 hw0 (U1/dE1)(U2/dE2) I12 between
/// levels with spins (-,+) and (+,-).
double v12_element(const OscillatorLevel& a, const OscillatorLevel& b, const ModelParams& params);

/// Matrix element of the symmetrized first-derivative operator V_j between
/// levels whose spins differ by one flip of system j (spin factor magnitude 1):
///   (hw0/2) int u_a [2 f_j u_b' + f_j' u_b] dy,
///   f_j(y) = (sqrt(2) U_j / dE_j) / (1 + 8 U_j^2 y^2 / dE_j^2).
double v1_element(const OscillatorLevel& a, const OscillatorLevel& b, const ModelParams& params,
                  int which_spin);

/// W_j(y) = hw0 (U_j/dE_j)^2 / (1 + 8 U_j^2 y^2/dE_j^2)^2 (neglected in the
/// level analysis; exposed for magnitude checks).
double w_potential(double y, const ModelParams& params, int which_spin);

struct PtSplitting {
    double value = 0.0;     // delta E_min
    double i12 = 0.0;       // signed overlap integral
    double detuning = 0.0;  // |E_a - E_b| of the two basis levels
    bool off_resonance = false;
};

/// Degenerate two-state splitting 2|<a|V12|b>| for the excitation-transfer
/// pair (n, -, +) and (n + delta_n, +, -); delta_n must be even. Flags (but
/// still returns) results computed off resonance.
PtSplitting pt_splitting_excitation_transfer(const ModelParams& params, long n, long delta_n,
                                             const H0Options& options = {});

/// Same two-state construction for an energy-exchange pair: gap
/// 2|<n,up_j|V_j|n+delta_n,down_j>| with the spectator spin down.
PtSplitting pt_splitting_energy_exchange(const ModelParams& params, long n, long delta_n,
                                         int which_spin, const H0Options& options = {});

/// CSV export "y,u".
void export_csv(const OscillatorLevel& level, std::ostream& os);

} // namespace duet
