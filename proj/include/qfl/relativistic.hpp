#pragma once

// Klein–Gordon fields on a periodic 1+1 box as analytic mode sums, and the
// Dirac gamma matrices. Natural units, hbar = c = 1, metric (+, -).

#include <array>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qfl {

enum class Frequency { positive, negative };

inline int sign_of(Frequency f) { return f == Frequency::positive ? 1 : -1; }

/// omega = sqrt(k^2 + m^2). Throws for m < 0 or k = m = 0.
double omega(double k, double m);

/// u(t, x) = exp(-i s (omega t - k x)) / sqrt(2 omega L), s = +1 for positive
/// frequency. `omega` is stored rather than recomputed so residual checks can
/// be handed a deliberately wrong one.
struct KGMode {
    double L = 0;
    int n = 0;
    double m = 0;
    Frequency sign = Frequency::positive;
    double k = 0;
    double omega = 0;

    std::complex<double> value(double t, double x) const;
    /// Phase velocity factor: du/dt = -i s omega u, du/dx = i s k u.
    std::complex<double> dt_factor() const;
    std::complex<double> dx_factor() const;
};

KGMode kg_mode(double L, int n, double m, Frequency sign);

struct KGTerm {
    KGMode mode;
    std::complex<double> c;
};

class KGField {
public:
    KGField(double L, double m, std::vector<KGTerm> terms = {});

    double L() const noexcept { return L_; }
    double mass() const noexcept { return m_; }
    const std::vector<KGTerm>& terms() const noexcept { return terms_; }

    /// Appends c times the mode (n, sign) of this box and mass.
    KGField& add(int n, Frequency sign, std::complex<double> c);

    std::complex<double> operator()(double t, double x) const;
    std::complex<double> dt(double t, double x) const;
    std::complex<double> dx(double t, double x) const;

    /// Complex conjugate field: each c u_{s,n} becomes c* u_{-s,n}.
    KGField conjugate() const;

private:
    double L_, m_;
    std::vector<KGTerm> terms_;
};

/// Sample points (t, x).
using SpacetimePoint = std::pair<double, double>;

/// max |(d_t^2 - d_x^2 + m^2) psi| over the samples, term by term with each
/// mode's stored omega.
double kg_residual(const KGField& field, std::span<const SpacetimePoint> samples);

/// Charge density j0 = -2 Im(psi* d_t psi) and contravariant flux
/// j1 = 2 Im(psi* d_x psi), so that d_t j0 + d_x j1 = 0.
struct Current {
    double j0 = 0;
    double j1 = 0;
};

Current kg_current(const KGField& field, double t, double x);

struct CurrentProfile {
    Eigen::VectorXd j0;
    Eigen::VectorXd j1;
};

CurrentProfile kg_current(const KGField& field, double t, const Eigen::VectorXd& xs);

/// max |d_t j0 + d_x j1| over xs at time t, both derivatives by central
/// differences with step h.
double conservation_residual(const KGField& field, double t, const Eigen::VectorXd& xs, double h = 1e-4);

/// i \int_0^L (f* d_t g - d_t f* g) dx, in closed form per mode pair. Fields
/// may carry different masses (then the value depends on t); they must share L.
std::complex<double> kg_inner(const KGField& f, const KGField& g, double t);

/// \int j0 dx = (f, f).
double kg_charge(const KGField& field);

struct FrequencySplit {
    KGField plus;
    KGField minus;
};

FrequencySplit frequency_split(const KGField& field);

struct NegativityScan {
    double min_j0 = 0;
    double t = 0;
    double x = 0;
    double grid_min_j0 = 0;  ///< before refinement
};

/// Minimum of j0 over [t0, t1] x [0, L) on an nt x nx grid, then polished by
/// alternating golden-section searches within one grid cell until the point
/// moves less than `tol`. Values within 1e-13 relative count as ties, which go
/// to the lowest t and then the lowest x.
NegativityScan negativity_scan(const KGField& field, double t0, double t1, int nt, int nx, double tol = 1e-8,
                               unsigned threads = 1);

struct CurrentSample {
    double t, x, j0, j1;
};

/// j0, j1 on the nt x nx grid used by negativity_scan, t-major.
std::vector<CurrentSample> sample_current(const KGField& field, double t0, double t1, int nt, int nx);

// ---------------------------------------------------------------------------
// Dirac
// ---------------------------------------------------------------------------

using Spinor = Eigen::Vector4cd;
using GammaSet = std::array<Eigen::Matrix4cd, 4>;

/// Dirac representation: gamma^0 = diag(1, -1), gamma^i = [[0, sigma_i], [-sigma_i, 0]].
GammaSet dirac_gammas();

/// eta^{mu nu} = diag(1, -1, -1, -1).
double minkowski(int mu, int nu);

/// j^mu = psibar gamma^mu psi with psibar = psi^dagger gamma^0.
std::array<double, 4> dirac_current(const Spinor& psi, const GammaSet& gammas);

}  // namespace qfl
