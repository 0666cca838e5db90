#include "qfl/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfl/parallel.hpp"
#include "qfl/random.hpp"

namespace qfl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMonotoneStep = 0.5;
using cd = std::complex<double>;

// 8th-order central first-derivative weights for offsets 1..4.
constexpr double kD1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};

// Neighbor value with periodic wrap or a zero ghost outside hard walls.
template <typename Vec>
auto neighbor(const Vec& v, Eigen::Index i, Eigen::Index offset, bool periodic) -> typename Vec::Scalar {
    const Eigen::Index n = v.size();
    Eigen::Index j = i + offset;
    if (periodic) {
        j %= n;
        if (j < 0) j += n;
        return v(j);
    }
    if (j < 0 || j >= n) return typename Vec::Scalar(0);
    return v(j);
}

bool stencil_inside(const Grid1D& g, Eigen::Index i, Eigen::Index half) {
    return g.periodic() || (i - half >= 0 && i + half < g.size());
}

Eigen::Index wrap_index(Eigen::Index i, Eigen::Index n) {
    i %= n;
    return i < 0 ? i + n : i;
}

double wrap_phase(double a) {
    return std::remainder(a, 2.0 * std::numbers::pi);
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
    if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite values");
}

Mask node_mask(const Eigen::VectorXd& rho) {
    const double peak = rho.maxCoeff();
    return (rho.array() > kNodeEpsilon * peak);
}

// Linear interpolation of a grid field at position x. Periodic grids wrap;
// hard-wall grids clamp to the end cells.
double interpolate(const Eigen::VectorXd& f, const Grid1D& g, double x) {
    const double s = (x - g.x_min()) / g.dx();
    double fl = std::floor(s);
    const double w = s - fl;
    auto i0 = static_cast<Eigen::Index>(fl);
    if (g.periodic()) {
        const Eigen::Index n = g.size();
        return (1 - w) * f(wrap_index(i0, n)) + w * f(wrap_index(i0 + 1, n));
    }
    if (i0 < 0) return f(0);
    if (i0 >= g.size() - 1) return f(g.size() - 1);
    return (1 - w) * f(i0) + w * f(i0 + 1);
}

bool inside(const Grid1D& g, double x) {
    return g.periodic() || (x >= g.x_min() && x <= g.x_max());
}

// Piecewise-linear CDF of a nonnegative grid density.
class GridCdf {
public:
    GridCdf(const Eigen::VectorXd& rho, const Grid1D& g) : grid_(g) {
        const Eigen::Index n = g.size();
        const Eigen::Index cells = g.periodic() ? n : n - 1;
        nodes_.resize(static_cast<std::size_t>(cells) + 1);
        cdf_.resize(static_cast<std::size_t>(cells) + 1);
        nodes_[0] = g.x_min();
        cdf_[0] = 0;
        for (Eigen::Index c = 0; c < cells; ++c) {
            const double mass = 0.5 * (rho(c) + rho(wrap_index(c + 1, n))) * g.dx();
            nodes_[static_cast<std::size_t>(c) + 1] = g.x(c + 1);
            cdf_[static_cast<std::size_t>(c) + 1] = cdf_[static_cast<std::size_t>(c)] + mass;
        }
        const double total = cdf_.back();
        if (!(total > 0)) throw std::invalid_argument("density has zero total mass");
        for (auto& v : cdf_) v /= total;
        cdf_.back() = 1.0;
    }

    double operator()(double x) const {
        if (grid_.periodic()) x = grid_.x_min() + std::fmod(std::fmod(x - grid_.x_min(), grid_.length()) + grid_.length(), grid_.length());
        if (x <= nodes_.front()) return 0;
        if (x >= nodes_.back()) return 1;
        const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
        const auto c = static_cast<std::size_t>(it - nodes_.begin()) - 1;
        const double w = (x - nodes_[c]) / (nodes_[c + 1] - nodes_[c]);
        return (1 - w) * cdf_[c] + w * cdf_[c + 1];
    }

    double inverse(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.begin()) return nodes_.front();
        if (it == cdf_.end()) return nodes_.back();
        const auto c = static_cast<std::size_t>(it - cdf_.begin()) - 1;
        const double span = cdf_[c + 1] - cdf_[c];
        const double w = span > 0 ? (u - cdf_[c]) / span : 0.0;
        return nodes_[c] + w * (nodes_[c + 1] - nodes_[c]);
    }

private:
    Grid1D grid_;
    std::vector<double> nodes_;
    std::vector<double> cdf_;
};

}  // namespace

// ---------------------------------------------------------------------------

Grid1D::Grid1D(double x_min, double x_max, Eigen::Index n_points, Boundary boundary)
    : x_min_(x_min), x_max_(x_max), n_(n_points), boundary_(boundary) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min))
        throw std::invalid_argument("Grid1D: need finite x_min < x_max");
    if (n_points < 16) throw std::invalid_argument("Grid1D: at least 16 points required");
}

double Grid1D::dx() const noexcept {
    return periodic() ? length() / static_cast<double>(n_) : length() / static_cast<double>(n_ - 1);
}

Eigen::VectorXd Grid1D::points() const {
    Eigen::VectorXd p(n_);
    for (Eigen::Index i = 0; i < n_; ++i) p(i) = x(i);
    return p;
}

WaveField::WaveField(Eigen::VectorXcd v, Grid1D g, double m, double h, double time)
    : values(std::move(v)), grid(g), mass(m), hbar(h), t(time) {
    if (values.size() != grid.size()) throw std::invalid_argument("WaveField: value count differs from grid size");
    if (!(mass > 0) || !(hbar > 0)) throw std::invalid_argument("WaveField: mass and hbar must be positive");
}

double WaveField::norm() const { return values.squaredNorm() * grid.dx(); }

Eigen::VectorXd WaveField::density() const { return values.cwiseAbs2(); }

WaveField& WaveField::normalize() {
    const double n = norm();
    if (!(n > 0)) throw std::invalid_argument("WaveField: cannot normalize a zero field");
    values /= std::sqrt(n);
    return *this;
}

WaveField gaussian_packet(const Grid1D& grid, double x0, double sigma, double k0, double mass, double hbar) {
    if (!(sigma > 0)) throw std::invalid_argument("gaussian_packet: sigma must be positive");
    Eigen::VectorXcd v(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        v(i) = std::exp(cd(-(x - x0) * (x - x0) / (4 * sigma * sigma), k0 * x));
    }
    WaveField w(std::move(v), grid, mass, hbar);
    w.normalize();
    return w;
}

WaveField two_packet_superposition(const Grid1D& grid, double separation, double sigma, double k0, double mass,
                                   double hbar) {
    const auto left = gaussian_packet(grid, -separation / 2, sigma, k0, mass, hbar);
    const auto right = gaussian_packet(grid, separation / 2, sigma, -k0, mass, hbar);
    WaveField w(left.values + right.values, grid, mass, hbar);
    w.normalize();
    return w;
}

WaveField plane_wave(const Grid1D& grid, double momentum, double mass, double hbar) {
    if (!grid.periodic()) throw std::invalid_argument("plane_wave: requires a periodic grid");
    const double cycles = momentum * grid.length() / (2 * std::numbers::pi * hbar);
    if (std::abs(cycles - std::round(cycles)) > 1e-9)
        throw std::invalid_argument("plane_wave: momentum is not a lattice momentum of the box");
    Eigen::VectorXcd v(grid.size());
    const double amp = 1.0 / std::sqrt(grid.length());
    for (Eigen::Index i = 0; i < grid.size(); ++i) v(i) = amp * std::exp(cd(0, momentum * grid.x(i) / hbar));
    return WaveField(std::move(v), grid, mass, hbar);
}

// ---------------------------------------------------------------------------

CrankNicolson::CrankNicolson(const Grid1D& grid, const Eigen::VectorXd& potential, double dt, double mass,
                             double hbar)
    : periodic_(grid.periodic()), dt_(dt) {
    if (!(dt > 0)) throw std::invalid_argument("CrankNicolson: dt must be positive");
    if (potential.size() != grid.size()) throw std::invalid_argument("CrankNicolson: potential size differs from grid");
    require_finite(potential, "CrankNicolson: potential");

    const Eigen::Index n = grid.size();
    const double dx = grid.dx();
    const double kappa = hbar * hbar / (2 * mass * dx * dx);
    const cd r(0, dt / (2 * hbar));

    off_ = -r * kappa;
    diag_.resize(n);
    explicit_diag_.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 2 * kappa + potential(i);
        diag_(i) = 1.0 + r * h;
        explicit_diag_(i) = 1.0 - r * h;
    }

    Eigen::VectorXcd b = diag_;
    if (periodic_) {
        gamma_ = -b(0);
        b(0) -= gamma_;
        b(n - 1) -= off_ * off_ / gamma_;
    }
    c_prime_.resize(n);
    denom_.resize(n);
    denom_(0) = b(0);
    c_prime_(0) = off_ / b(0);
    for (Eigen::Index i = 1; i < n; ++i) {
        denom_(i) = b(i) - off_ * c_prime_(i - 1);
        c_prime_(i) = off_ / denom_(i);
    }
    if (periodic_) {
        z_ = Eigen::VectorXcd::Zero(n);
        z_(0) = gamma_;
        z_(n - 1) = off_;
        solve_tridiagonal(z_);
    }
}

void CrankNicolson::solve_tridiagonal(Eigen::VectorXcd& d) const {
    const Eigen::Index n = d.size();
    d(0) /= denom_(0);
    for (Eigen::Index i = 1; i < n; ++i) d(i) = (d(i) - off_ * d(i - 1)) / denom_(i);
    for (Eigen::Index i = n - 2; i >= 0; --i) d(i) -= c_prime_(i) * d(i + 1);
}

void CrankNicolson::step(Eigen::VectorXcd& psi) const {
    const Eigen::Index n = psi.size();
    Eigen::VectorXcd rhs(n);
    const cd couple = -off_;
    for (Eigen::Index i = 0; i < n; ++i)
        rhs(i) = explicit_diag_(i) * psi(i) + couple * (neighbor(psi, i, -1, periodic_) + neighbor(psi, i, 1, periodic_));
    solve_tridiagonal(rhs);
    if (periodic_) {
        const cd fact = (rhs(0) + off_ * rhs(n - 1) / gamma_) / (1.0 + z_(0) + off_ * z_(n - 1) / gamma_);
        rhs -= fact * z_;
    }
    psi = std::move(rhs);
}

bool exceeds_step_hint(const Grid1D& grid, double dt, double mass, double hbar) {
    return dt > mass * grid.dx() * grid.dx() / hbar;
}

WaveField evolve(const WaveField& psi, const Eigen::VectorXd& potential, double dt, int steps) {
    if (steps < 0) throw std::invalid_argument("evolve: negative step count");
    require_finite(potential, "evolve: potential");
    if (steps == 0) return psi;
    const CrankNicolson cn(psi.grid, potential, dt, psi.mass, psi.hbar);
    WaveField out = psi;
    for (int s = 0; s < steps; ++s) cn.step(out.values);
    out.t = psi.t + dt * steps;
    return out;
}

std::vector<WaveField> evolve_history(const WaveField& psi, const Eigen::VectorXd& potential, double dt, int steps,
                                      int stride) {
    if (steps < 0 || stride < 1) throw std::invalid_argument("evolve_history: need steps >= 0 and stride >= 1");
    require_finite(potential, "evolve_history: potential");
    std::vector<WaveField> history{psi};
    if (steps == 0) return history;
    const CrankNicolson cn(psi.grid, potential, dt, psi.mass, psi.hbar);
    WaveField cur = psi;
    for (int s = 1; s <= steps; ++s) {
        cn.step(cur.values);
        cur.t = psi.t + dt * s;
        if (s % stride == 0) history.push_back(cur);
    }
    return history;
}

double spacetime_norm(std::span<const WaveField> history) {
    double total = 0;
    for (std::size_t k = 1; k < history.size(); ++k)
        total += 0.5 * (history[k].norm() + history[k - 1].norm()) * (history[k].t - history[k - 1].t);
    return total;
}

// ---------------------------------------------------------------------------

MadelungPair madelung(const WaveField& psi) {
    const Eigen::Index n = psi.values.size();
    MadelungPair out{psi.density(), Eigen::VectorXd::Constant(n, kNaN), Mask()};
    out.defined = node_mask(out.rho);
    bool have_prev = false;
    double prev_arg = 0, prev_phase = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!out.defined(i)) continue;
        const double a = std::arg(psi.values(i));
        const double phase = have_prev ? prev_phase + wrap_phase(a - prev_arg) : a;
        out.S(i) = psi.hbar * phase;
        prev_arg = a;
        prev_phase = phase;
        have_prev = true;
    }
    return out;
}

WaveField synthesize(const Eigen::VectorXd& rho, const Eigen::VectorXd& S, const Grid1D& grid, double mass,
                     double hbar, double t) {
    if (rho.size() != grid.size() || S.size() != grid.size())
        throw std::invalid_argument("synthesize: field sizes differ from grid");
    if ((rho.array() < 0).any()) throw std::invalid_argument("synthesize: negative density");
    Eigen::VectorXcd v(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double phase = std::isfinite(S(i)) ? S(i) / hbar : 0.0;
        v(i) = std::sqrt(rho(i)) * std::exp(cd(0, phase));
    }
    return WaveField(std::move(v), grid, mass, hbar, t);
}

WaveField synthesize(const MadelungPair& pair, const Grid1D& grid, double mass, double hbar, double t) {
    return synthesize(pair.rho, pair.S, grid, mass, hbar, t);
}

QuantumPotential quantum_potential(const WaveField& psi) {
    const Eigen::Index n = psi.values.size();
    const Eigen::VectorXd rho = psi.density();
    const Eigen::VectorXd amp = rho.cwiseSqrt();
    const bool per = psi.grid.periodic();
    const double dx = psi.grid.dx();
    const double pref = -psi.hbar * psi.hbar / (2 * psi.mass);
    QuantumPotential out{Eigen::VectorXd::Constant(n, kNaN), node_mask(rho)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!stencil_inside(psi.grid, i, 1)) out.defined(i) = false;
        if (!out.defined(i)) continue;
        const double lap = (neighbor(amp, i, -1, per) - 2 * amp(i) + neighbor(amp, i, 1, per)) / (dx * dx);
        out.Q(i) = pref * lap / amp(i);
    }
    return out;
}

VelocityField velocity_field(const WaveField& psi) {
    const Eigen::Index n = psi.values.size();
    const bool per = psi.grid.periodic();
    const double dx = psi.grid.dx();
    const Eigen::VectorXd rho = psi.density();
    const Mask ok = node_mask(rho);
    VelocityField out{Eigen::VectorXd::Zero(n), Mask::Constant(n, false),
                      kNodeSpeedFactor * psi.hbar / (psi.mass * dx)};
    for (Eigen::Index i = 0; i < n; ++i) {
        cd deriv = 0;
        for (int k = 0; k < 4; ++k)
            deriv += kD1[k] * (neighbor(psi.values, i, k + 1, per) - neighbor(psi.values, i, -(k + 1), per));
        deriv /= dx;
        const double num = std::imag(std::conj(psi.values(i)) * deriv);
        double v = rho(i) > 0 ? psi.hbar * num / (psi.mass * rho(i)) : 0.0;
        if (!ok(i)) {
            v = std::clamp(std::isfinite(v) ? v : 0.0, -out.v_max, out.v_max);
            out.clamped(i) = true;
        }
        out.v(i) = v;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Trajectory> propagate_trajectories(std::span<const WaveField> history, std::span<const double> x0,
                                               int substeps, unsigned threads) {
    if (history.size() < 2) throw std::invalid_argument("propagate_trajectories: need at least two snapshots");
    if (substeps < 1) throw std::invalid_argument("propagate_trajectories: substeps must be >= 1");
    const Grid1D& g = history.front().grid;
    const double h = history[1].t - history[0].t;
    if (!(h > 0)) throw std::invalid_argument("propagate_trajectories: snapshot times must increase");
    for (std::size_t k = 1; k < history.size(); ++k) {
        const double hk = history[k].t - history[k - 1].t;
        if (std::abs(hk - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw std::invalid_argument("propagate_trajectories: snapshots are not equally spaced");
    }
    for (double x : x0)
        if (!inside(g, x)) throw std::invalid_argument("propagate_trajectories: start point outside the grid");

    std::vector<Eigen::VectorXd> vel;
    vel.reserve(history.size());
    for (const auto& w : history) vel.push_back(velocity_field(w).v);

    // Steps per interval: at least `substeps`, and enough that h * max|dv/dx|
    // of the interpolated field stays below kMonotoneStep.
    const Eigen::Index n = g.size();
    const Eigen::Index cells = g.periodic() ? n : n - 1;
    std::vector<int> steps(history.size() - 1, substeps);
    std::vector<double> lip(history.size(), 0.0);
    for (std::size_t k = 0; k < vel.size(); ++k)
        for (Eigen::Index c = 0; c < cells; ++c)
            lip[k] = std::max(lip[k], std::abs(vel[k](wrap_index(c + 1, n)) - vel[k](c)) / g.dx());
    for (std::size_t k = 0; k + 1 < history.size(); ++k) {
        const double need = std::ceil(h * std::max(lip[k], lip[k + 1]) / kMonotoneStep);
        steps[k] = std::max(substeps, static_cast<int>(std::min(need, 1e6)));
    }

    std::vector<Trajectory> out(x0.size());
    parallel_for(x0.size(), threads, [&](std::size_t j) {
        Trajectory tr;
        tr.x0 = x0[j];
        tr.t.push_back(history.front().t);
        tr.x.push_back(x0[j]);
        double x = x0[j];
        // v at snapshot k plus fraction s of the way to k+1
        auto v_at = [&](std::size_t k, double s, double pos) {
            const double a = interpolate(vel[k], g, pos);
            if (s == 0.0) return a;
            return (1 - s) * a + s * interpolate(vel[k + 1], g, pos);
        };
        for (std::size_t k = 0; k + 1 < history.size() && !tr.truncated; ++k) {
            const int ns = steps[k];
            const double sub = h / ns;
            for (int m = 0; m < ns; ++m) {
                const double s0 = static_cast<double>(m) / ns;
                const double sm = (m + 0.5) / ns;
                const double s1 = static_cast<double>(m + 1) / ns;
                const double k1 = v_at(k, s0, x);
                const double x2 = x + 0.5 * sub * k1;
                const double k2 = v_at(k, sm, x2);
                const double x3 = x + 0.5 * sub * k2;
                const double k3 = v_at(k, sm, x3);
                const double x4 = x + sub * k3;
                const double k4 = (m + 1 == ns) ? v_at(k + 1, 0.0, x4) : v_at(k, s1, x4);
                const double xn = x + sub * (k1 + 2 * k2 + 2 * k3 + k4) / 6;
                if (!inside(g, x2) || !inside(g, x3) || !inside(g, x4) || !inside(g, xn)) {
                    tr.truncated = true;
                    break;
                }
                x = xn;
            }
            if (tr.truncated) break;
            tr.t.push_back(history[k + 1].t);
            tr.x.push_back(x);
        }
        out[j] = std::move(tr);
    });
    return out;
}

std::vector<double> positions_at(std::span<const Trajectory> trajectories, std::size_t k) {
    std::vector<double> out;
    for (const auto& tr : trajectories)
        if (!tr.truncated && k < tr.x.size()) out.push_back(tr.x[k]);
    return out;
}

std::vector<double> sample_positions(const WaveField& psi, std::size_t count, std::uint64_t seed) {
    const GridCdf cdf(psi.density(), psi.grid);
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        StreamRng rng(seed, j);
        out[j] = cdf.inverse(rng.uniform());
    }
    return out;
}

double equivariance_test(std::span<const double> positions, const WaveField& psi) {
    if (positions.empty()) throw std::invalid_argument("equivariance_test: empty ensemble");
    const GridCdf cdf(psi.density(), psi.grid);
    std::vector<double> f;
    f.reserve(positions.size());
    for (double x : positions) f.push_back(cdf(x));
    std::sort(f.begin(), f.end());
    const double n = static_cast<double>(f.size());
    double d = 0;
    for (std::size_t j = 0; j < f.size(); ++j) {
        d = std::max(d, static_cast<double>(j + 1) / n - f[j]);
        d = std::max(d, f[j] - static_cast<double>(j) / n);
    }
    return d;
}

// ---------------------------------------------------------------------------

ClassicalResidual classical_residual(const MadelungPair& before, const MadelungPair& at, const MadelungPair& after,
                                     const Eigen::VectorXd& potential, const Grid1D& grid, double dt, double hbar,
                                     double mass) {
    const Eigen::Index n = grid.size();
    for (const auto* p : {&before, &at, &after})
        if (p->rho.size() != n || p->S.size() != n || p->defined.size() != n)
            throw std::invalid_argument("classical_residual: field sizes differ from grid");
    if (potential.size() != n) throw std::invalid_argument("classical_residual: potential size differs from grid");
    if (!(dt > 0)) throw std::invalid_argument("classical_residual: dt must be positive");

    const double dx = grid.dx();
    const bool per = grid.periodic();
    ClassicalResidual out{Eigen::VectorXd::Constant(n, kNaN), Eigen::VectorXd::Constant(n, kNaN),
                          Mask::Constant(n, false)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!stencil_inside(grid, i, 1)) continue;
        const Eigen::Index l = wrap_index(i - 1, n), r = wrap_index(i + 1, n);
        if (!(before.defined(i) && after.defined(i) && at.defined(i) && at.defined(l) && at.defined(r))) continue;

        // the phase may have wrapped by a multiple of 2 pi hbar between slices
        const double dS = hbar * wrap_phase((after.S(i) - before.S(i)) / hbar);
        const double S_t = dS / (2 * dt);
        double Sl = at.S(l), Sr = at.S(r);
        if (per && i == 0) Sl = at.S(i) - hbar * wrap_phase((at.S(i) - Sl) / hbar);
        if (per && i == n - 1) Sr = at.S(i) + hbar * wrap_phase((Sr - at.S(i)) / hbar);
        const double S_x = (Sr - Sl) / (2 * dx);
        const double S_xx = (Sr - 2 * at.S(i) + Sl) / (dx * dx);
        const double rho_t = (after.rho(i) - before.rho(i)) / (2 * dt);
        const double rho_x = (neighbor(at.rho, i, 1, per) - neighbor(at.rho, i, -1, per)) / (2 * dx);

        out.hamilton_jacobi(i) = S_t + S_x * S_x / (2 * mass) + potential(i);
        out.continuity(i) = rho_t + (rho_x * S_x + at.rho(i) * S_xx) / mass;
        out.defined(i) = true;
    }
    return out;
}

ClassicalResidual wave_equation_residual(const WaveField& before, const WaveField& at, const WaveField& after,
                                         const Eigen::VectorXd& potential) {
    const Grid1D& g = at.grid;
    const Eigen::Index n = g.size();
    if (before.values.size() != n || after.values.size() != n || potential.size() != n)
        throw std::invalid_argument("wave_equation_residual: field sizes differ from grid");
    const double dt = 0.5 * (after.t - before.t);
    if (!(dt > 0)) throw std::invalid_argument("wave_equation_residual: snapshot times must increase");

    const double dx = g.dx();
    const bool per = g.periodic();
    const double hbar = at.hbar, mass = at.mass;
    const QuantumPotential q = quantum_potential(at);
    const Eigen::VectorXd rho = at.density();
    ClassicalResidual out{Eigen::VectorXd::Constant(n, kNaN), Eigen::VectorXd::Constant(n, kNaN),
                          Mask::Constant(n, false)};
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!stencil_inside(g, i, 1) || !q.defined(i)) continue;
        const cd psi = at.values(i);
        const cd psi_t = (after.values(i) - before.values(i)) / (2 * dt);
        const cd lap =
            (neighbor(at.values, i, -1, per) - 2.0 * psi + neighbor(at.values, i, 1, per)) / (dx * dx);
        const cd residual =
            cd(0, hbar) * psi_t - (-hbar * hbar / (2 * mass) * lap + (potential(i) - q.Q(i)) * psi);
        const cd ratio = residual / psi;
        out.hamilton_jacobi(i) = -ratio.real();
        out.continuity(i) = 2 * rho(i) * ratio.imag() / hbar;
        out.defined(i) = true;
    }
    return out;
}

double quantum_newton_residual(const Trajectory& trajectory, std::span<const Eigen::VectorXd> Q_history,
                               const Eigen::VectorXd& potential, const Grid1D& grid, double mass) {
    const std::size_t m = trajectory.x.size();
    if (m < 3) throw std::invalid_argument("quantum_newton_residual: need at least three samples");
    if (Q_history.size() < m) throw std::invalid_argument("quantum_newton_residual: Q history shorter than trajectory");
    const Eigen::Index n = grid.size();
    const double dx = grid.dx();
    const bool per = grid.periodic();
    double worst = 0;
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double h1 = trajectory.t[k] - trajectory.t[k - 1];
        const double h2 = trajectory.t[k + 1] - trajectory.t[k];
        const double acc = 2 * ((trajectory.x[k + 1] - trajectory.x[k]) / h2 - (trajectory.x[k] - trajectory.x[k - 1]) / h1) / (h1 + h2);
        const Eigen::VectorXd total = potential + Q_history[k];
        Eigen::VectorXd force(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!stencil_inside(grid, i, 1)) {
                force(i) = i == 0 ? (total(1) - total(0)) / dx : (total(n - 1) - total(n - 2)) / dx;
                continue;
            }
            force(i) = (neighbor(total, i, 1, per) - neighbor(total, i, -1, per)) / (2 * dx);
        }
        const double grad = interpolate(force, grid, trajectory.x[k]);
        worst = std::max(worst, std::abs(mass * acc + grad));
        if (!std::isfinite(grad)) return kNaN;
    }
    return worst;
}

// ---------------------------------------------------------------------------

TwoParticleField::TwoParticleField(Eigen::MatrixXcd v, Grid1D g, double m, double h)
    : values(std::move(v)), grid(g), mass(m), hbar(h) {
    if (values.rows() != grid.size() || values.cols() != grid.size())
        throw std::invalid_argument("TwoParticleField: values must be grid x grid");
    if (grid.size() > kMaxTwoParticleGrid)
        throw std::invalid_argument("TwoParticleField: grid larger than " + std::to_string(kMaxTwoParticleGrid));
    if (!(mass > 0) || !(hbar > 0)) throw std::invalid_argument("TwoParticleField: mass and hbar must be positive");
    if (std::abs(norm() - 1.0) > 1e-8) throw std::invalid_argument("TwoParticleField: not unit norm");
}

double TwoParticleField::norm() const { return values.squaredNorm() * grid.dx() * grid.dx(); }

TwoParticleField product_state(const WaveField& a, const WaveField& b) {
    Eigen::MatrixXcd m = a.values * b.values.transpose();
    m /= std::sqrt(m.squaredNorm() * a.grid.dx() * a.grid.dx());
    return TwoParticleField(std::move(m), a.grid, a.mass, a.hbar);
}

TwoParticleField symmetrized_state(const WaveField& a, const WaveField& b) {
    Eigen::MatrixXcd m = a.values * b.values.transpose() + b.values * a.values.transpose();
    m /= std::sqrt(m.squaredNorm() * a.grid.dx() * a.grid.dx());
    return TwoParticleField(std::move(m), a.grid, a.mass, a.hbar);
}

TwoParticleQ quantum_potential_2(const TwoParticleField& psi) {
    const Eigen::Index n = psi.grid.size();
    const bool per = psi.grid.periodic();
    const double dx = psi.grid.dx();
    const Eigen::MatrixXd rho = psi.values.cwiseAbs2();
    const Eigen::MatrixXd amp = rho.cwiseSqrt();
    const double peak = rho.maxCoeff();
    const double pref = -psi.hbar * psi.hbar / (2 * psi.mass);

    auto at = [&](Eigen::Index a, Eigen::Index b) -> double {
        if (per) return amp(wrap_index(a, n), wrap_index(b, n));
        if (a < 0 || b < 0 || a >= n || b >= n) return 0.0;
        return amp(a, b);
    };

    TwoParticleQ out{Eigen::MatrixXd::Constant(n, n, kNaN), (rho.array() > kNodeEpsilon * peak), 0.0};
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            if (!per && (a == 0 || b == 0 || a == n - 1 || b == n - 1)) out.defined(a, b) = false;
            if (!out.defined(a, b)) continue;
            const double lap = (at(a - 1, b) + at(a + 1, b) + at(a, b - 1) + at(a, b + 1) - 4 * amp(a, b)) / (dx * dx);
            out.Q(a, b) = pref * lap / amp(a, b);
        }

    // For each row pair the double difference over columns b, b' is the
    // spread of Q(a, .) - Q(a', .).
    double defect = 0;
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index a2 = a + 1; a2 < n; ++a2) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (Eigen::Index b = 0; b < n; ++b) {
                if (!out.defined(a, b) || !out.defined(a2, b)) continue;
                const double d = out.Q(a, b) - out.Q(a2, b);
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            if (hi >= lo) defect = std::max(defect, hi - lo);
        }
    out.separability_defect = defect;
    return out;
}

}  // namespace qfl
