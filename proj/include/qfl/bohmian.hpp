#pragma once

// Nonrelativistic wave mechanics on a uniform 1D grid and the Bohmian layer
// on top of it: polar (rho, S) decomposition, quantum potential, guidance
// velocities, trajectory ensembles, equivariance statistics and the
// two-particle quantum potential.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qfl {

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;
using MaskMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Densities below this fraction of the peak density count as nodes.
inline constexpr double kNodeEpsilon = 1e-10;
/// Guidance speeds at nodes are clamped to this many units of hbar/(m dx).
inline constexpr double kNodeSpeedFactor = 10.0;
/// Largest grid edge accepted for two-particle fields.
inline constexpr Eigen::Index kMaxTwoParticleGrid = 256;

enum class Boundary { periodic, hard_wall };

class Grid1D {
public:
    Grid1D(double x_min, double x_max, Eigen::Index n_points, Boundary boundary);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    Eigen::Index size() const noexcept { return n_; }
    Boundary boundary() const noexcept { return boundary_; }
    bool periodic() const noexcept { return boundary_ == Boundary::periodic; }
    double length() const noexcept { return x_max_ - x_min_; }

    /// (x_max - x_min)/n for periodic grids, /(n - 1) for hard walls.
    double dx() const noexcept;
    double x(Eigen::Index i) const noexcept { return x_min_ + static_cast<double>(i) * dx(); }
    Eigen::VectorXd points() const;

private:
    double x_min_, x_max_;
    Eigen::Index n_;
    Boundary boundary_;
};

/// psi(x, t) sampled on a grid. Discrete norm is sum |psi_i|^2 dx.
struct WaveField {
    Eigen::VectorXcd values;
    Grid1D grid;
    double mass = 1;
    double hbar = 1;
    double t = 0;

    WaveField(Eigen::VectorXcd values, Grid1D grid, double mass, double hbar, double t = 0);

    double norm() const;
    Eigen::VectorXd density() const;
    /// Rescales to unit discrete norm.
    WaveField& normalize();
};

/// Normalized Gaussian packet exp(-(x-x0)^2/(4 sigma^2) + i k0 x).
WaveField gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0, double mass = 1, double hbar = 1);

/// Normalized sum of two Gaussian packets (the 1D two-slit stand-in).
WaveField two_packet_superposition(const Grid1D& grid, double separation, double sigma, double k0, double mass = 1,
                                   double hbar = 1);

/// e^{i p x / hbar} / sqrt(L) on a periodic grid.
WaveField plane_wave(const Grid1D& grid, double momentum, double mass = 1, double hbar = 1);

// ---------------------------------------------------------------------------
// Time evolution
// ---------------------------------------------------------------------------

/// Crank–Nicolson propagator for i hbar dpsi/dt = (-hbar^2/2m d^2/dx^2 + V) psi
/// with a second-order Laplacian. The tridiagonal (cyclic for periodic grids)
/// system is factorized once.
class CrankNicolson {
public:
    CrankNicolson(const Grid1D& grid, const Eigen::VectorXd& potential, double dt, double mass, double hbar);

    void step(Eigen::VectorXcd& psi) const;
    double dt() const noexcept { return dt_; }

private:
    void solve_tridiagonal(Eigen::VectorXcd& rhs) const;

    bool periodic_;
    double dt_;
    std::complex<double> off_;  // constant off-diagonal of the implicit matrix
    Eigen::VectorXcd diag_;     // implicit diagonal
    Eigen::VectorXcd explicit_diag_;
    // Thomas factorization of the (possibly corner-modified) tridiagonal part
    Eigen::VectorXcd c_prime_;
    Eigen::VectorXcd denom_;
    // Sherman–Morrison correction for the periodic corners
    Eigen::VectorXcd z_;
    std::complex<double> gamma_;
};

/// True when dt exceeds the accuracy hint m dx^2 / hbar. Crank–Nicolson stays
/// stable past it; callers report it rather than fail.
bool exceeds_step_hint(const Grid1D& grid, double dt, double mass, double hbar);

/// Advances psi by `steps` steps of dt in a static potential.
WaveField evolve(const WaveField& psi, const Eigen::VectorXd& potential, double dt, int steps);

/// Snapshots every `stride` steps, including the initial state.
std::vector<WaveField> evolve_history(const WaveField& psi, const Eigen::VectorXd& potential, double dt, int steps,
                                      int stride = 1);

/// Time integral of the spatial norm over the snapshot window (trapezoid rule).
double spacetime_norm(std::span<const WaveField> history);

// ---------------------------------------------------------------------------
// Polar decomposition and derived fields
// ---------------------------------------------------------------------------

/// rho = |psi|^2 and S = hbar * (unwrapped phase). S is NaN where rho is below
/// the node threshold; `defined` marks the rest.
struct MadelungPair {
    Eigen::VectorXd rho;
    Eigen::VectorXd S;
    Mask defined;
};

MadelungPair madelung(const WaveField& psi);
WaveField synthesize(const Eigen::VectorXd& rho, const Eigen::VectorXd& S, const Grid1D& grid, double mass,
                     double hbar, double t = 0);
WaveField synthesize(const MadelungPair& pair, const Grid1D& grid, double mass, double hbar, double t = 0);

/// Q = -(hbar^2/2m) (d^2 sqrt(rho)/dx^2) / sqrt(rho); NaN at nodes.
struct QuantumPotential {
    Eigen::VectorXd Q;
    Mask defined;
};

QuantumPotential quantum_potential(const WaveField& psi);

/// v = (hbar/m) Im(psi* dpsi/dx) / |psi|^2 with an 8th-order central
/// derivative. At nodes the speed is clamped to kNodeSpeedFactor hbar/(m dx).
struct VelocityField {
    Eigen::VectorXd v;
    Mask clamped;
    double v_max = 0;
};

VelocityField velocity_field(const WaveField& psi);

// ---------------------------------------------------------------------------
// Trajectories
// ---------------------------------------------------------------------------

struct Trajectory {
    std::vector<double> t;
    std::vector<double> x;
    double x0 = 0;
    bool truncated = false;  ///< left a hard-wall grid
};

/// Integrates dx/dt = v(x, t) through a snapshot history with the classic
/// four-stage scheme, v interpolated linearly in x and t. Snapshots must be
/// equally spaced in time. Each snapshot interval is split into at least
/// `substeps` integration steps, and into more where the velocity is steep
/// enough that a coarse step could reorder neighbouring trajectories.
std::vector<Trajectory> propagate_trajectories(std::span<const WaveField> history, std::span<const double> x0,
                                               int substeps = 1, unsigned threads = 1);

/// Positions of every non-truncated trajectory at sample index `k`.
std::vector<double> positions_at(std::span<const Trajectory> trajectories, std::size_t k);

/// Inverse-CDF draws from |psi|^2 using the piecewise-linear grid CDF.
/// Sample j uses substream j of `seed`.
std::vector<double> sample_positions(const WaveField& psi, std::size_t count, std::uint64_t seed);

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `positions` and the grid CDF of |psi|^2.
double equivariance_test(std::span<const double> positions, const WaveField& psi);

// ---------------------------------------------------------------------------
// Classical / quantum Hamilton–Jacobi structure
// ---------------------------------------------------------------------------

/// Residuals of the Hamilton–Jacobi equation dS/dt + (dS/dx)^2/2m + V and the
/// continuity equation drho/dt + d(rho v)/dx at the middle of three snapshots.
struct ClassicalResidual {
    Eigen::VectorXd hamilton_jacobi;
    Eigen::VectorXd continuity;
    Mask defined;
};

/// From (rho, S) directly, with central differences in t and x.
ClassicalResidual classical_residual(const MadelungPair& before, const MadelungPair& at, const MadelungPair& after,
                                     const Eigen::VectorXd& potential, const Grid1D& grid, double dt, double hbar,
                                     double mass);

/// Same residuals read off the complex equation
/// (-hbar^2/2m d^2/dx^2 + V - Q) psi = i hbar dpsi/dt: the real part of
/// R/psi is minus the Hamilton–Jacobi residual and 2 rho Im(R/psi)/hbar is
/// the continuity residual.
ClassicalResidual wave_equation_residual(const WaveField& before, const WaveField& at, const WaveField& after,
                                         const Eigen::VectorXd& potential);

/// max |m x'' + d(V + Q)/dx| along a trajectory sampled at the snapshot
/// times, with x'' from second differences. `Q_history[k]` belongs to sample k.
double quantum_newton_residual(const Trajectory& trajectory, std::span<const Eigen::VectorXd> Q_history,
                               const Eigen::VectorXd& potential, const Grid1D& grid, double mass);

// ---------------------------------------------------------------------------
// Two particles
// ---------------------------------------------------------------------------

/// Psi(x1, x2) on grid x grid with equal masses; rows index x1.
struct TwoParticleField {
    Eigen::MatrixXcd values;
    Grid1D grid;
    double mass = 1;
    double hbar = 1;

    TwoParticleField(Eigen::MatrixXcd values, Grid1D grid, double mass, double hbar);
    double norm() const;
};

/// Normalized product g(x1) g(x2).
TwoParticleField product_state(const WaveField& a, const WaveField& b);
/// Normalized (a(x1) b(x2) + b(x1) a(x2)).
TwoParticleField symmetrized_state(const WaveField& a, const WaveField& b);

struct TwoParticleQ {
    Eigen::MatrixXd Q;
    MaskMatrix defined;
    /// max |Q(a,b) + Q(a',b') - Q(a,b') - Q(a',b)| over defined quadruples;
    /// zero iff Q is a sum Q1(x1) + Q2(x2).
    double separability_defect = 0;
};

TwoParticleQ quantum_potential_2(const TwoParticleField& psi);

}  // namespace qfl
