#include "qfl/relativistic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfl/parallel.hpp"
#include "qfl/spin.hpp"

namespace qfl {

namespace {

using cd = std::complex<double>;
constexpr double kTwoPi = 2 * std::numbers::pi;

void require_same_box(const KGField& f, const KGField& g) {
    if (f.L() != g.L()) throw std::invalid_argument("Klein-Gordon fields live in boxes of different length");
}

template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

}  // namespace

double omega(double k, double m) {
    if (!(m >= 0)) throw std::invalid_argument("omega: mass must be nonnegative");
    if (k == 0 && m == 0) throw std::invalid_argument("omega: zero-frequency mode (k = m = 0)");
    return std::sqrt(k * k + m * m);
}

KGMode kg_mode(double L, int n, double m, Frequency sign) {
    if (!(L > 0)) throw std::invalid_argument("kg_mode: box length must be positive");
    const double k = kTwoPi * n / L;
    return KGMode{L, n, m, sign, k, omega(k, m)};
}

cd KGMode::value(double t, double x) const {
    const double s = sign_of(sign);
    return std::exp(cd(0, -s * (omega * t - k * x))) / std::sqrt(2 * omega * L);
}

cd KGMode::dt_factor() const { return cd(0, -sign_of(sign) * omega); }
cd KGMode::dx_factor() const { return cd(0, sign_of(sign) * k); }

// ---------------------------------------------------------------------------

KGField::KGField(double L, double m, std::vector<KGTerm> terms) : L_(L), m_(m), terms_(std::move(terms)) {
    if (!(L > 0) || !(m >= 0)) throw std::invalid_argument("KGField: need L > 0 and m >= 0");
    for (const auto& term : terms_) {
        if (term.mode.L != L_) throw std::invalid_argument("KGField: term built for a different box");
        if (!std::isfinite(term.c.real()) || !std::isfinite(term.c.imag()))
            throw std::invalid_argument("KGField: non-finite coefficient");
    }
}

KGField& KGField::add(int n, Frequency sign, cd c) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw std::invalid_argument("KGField: non-finite coefficient");
    terms_.push_back({kg_mode(L_, n, m_, sign), c});
    return *this;
}

cd KGField::operator()(double t, double x) const {
    cd sum = 0;
    for (const auto& term : terms_) sum += term.c * term.mode.value(t, x);
    return sum;
}

cd KGField::dt(double t, double x) const {
    cd sum = 0;
    for (const auto& term : terms_) sum += term.c * term.mode.dt_factor() * term.mode.value(t, x);
    return sum;
}

cd KGField::dx(double t, double x) const {
    cd sum = 0;
    for (const auto& term : terms_) sum += term.c * term.mode.dx_factor() * term.mode.value(t, x);
    return sum;
}

KGField KGField::conjugate() const {
    std::vector<KGTerm> out;
    out.reserve(terms_.size());
    for (auto term : terms_) {
        term.mode.sign = term.mode.sign == Frequency::positive ? Frequency::negative : Frequency::positive;
        term.c = std::conj(term.c);
        out.push_back(term);
    }
    return KGField(L_, m_, std::move(out));
}

double kg_residual(const KGField& field, std::span<const SpacetimePoint> samples) {
    const double m2 = field.mass() * field.mass();
    double worst = 0;
    for (const auto& [t, x] : samples) {
        cd r = 0;
        for (const auto& term : field.terms()) {
            const auto& u = term.mode;
            r += term.c * (-u.omega * u.omega + u.k * u.k + m2) * u.value(t, x);
        }
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

Current kg_current(const KGField& field, double t, double x) {
    const cd psi = field(t, x);
    return {-2 * std::imag(std::conj(psi) * field.dt(t, x)), 2 * std::imag(std::conj(psi) * field.dx(t, x))};
}

CurrentProfile kg_current(const KGField& field, double t, const Eigen::VectorXd& xs) {
    CurrentProfile out{Eigen::VectorXd(xs.size()), Eigen::VectorXd(xs.size())};
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const auto c = kg_current(field, t, xs(i));
        out.j0(i) = c.j0;
        out.j1(i) = c.j1;
    }
    return out;
}

double conservation_residual(const KGField& field, double t, const Eigen::VectorXd& xs, double h) {
    if (!(h > 0)) throw std::invalid_argument("conservation_residual: step must be positive");
    double worst = 0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        const double x = xs(i);
        const double dj0 = (kg_current(field, t + h, x).j0 - kg_current(field, t - h, x).j0) / (2 * h);
        const double dj1 = (kg_current(field, t, x + h).j1 - kg_current(field, t, x - h).j1) / (2 * h);
        worst = std::max(worst, std::abs(dj0 + dj1));
    }
    return worst;
}

std::complex<double> kg_inner(const KGField& f, const KGField& g, double t) {
    require_same_box(f, g);
    cd sum = 0;
    for (const auto& a : f.terms())
        for (const auto& b : g.terms()) {
            const int sa = sign_of(a.mode.sign), sb = sign_of(b.mode.sign);
            // lattice momenta orthogonal unless the spatial phases cancel
            if (sa * a.mode.n != sb * b.mode.n) continue;
            const double wa = sa * a.mode.omega, wb = sb * b.mode.omega;
            const double weight = (wa + wb) / (2 * std::sqrt(a.mode.omega * b.mode.omega));
            sum += std::conj(a.c) * b.c * weight * std::exp(cd(0, (wa - wb) * t));
        }
    return sum;
}

double kg_charge(const KGField& field) { return kg_inner(field, field, 0).real(); }

FrequencySplit frequency_split(const KGField& field) {
    std::vector<KGTerm> plus, minus;
    for (const auto& term : field.terms()) (term.mode.sign == Frequency::positive ? plus : minus).push_back(term);
    return {KGField(field.L(), field.mass(), std::move(plus)), KGField(field.L(), field.mass(), std::move(minus))};
}

NegativityScan negativity_scan(const KGField& field, double t0, double t1, int nt, int nx, double tol,
                               unsigned threads) {
    if (nt < 2 || nx < 2 || !(t1 > t0)) throw std::invalid_argument("negativity_scan: need nt, nx >= 2 and t1 > t0");
    const double ht = (t1 - t0) / (nt - 1);
    const double hx = field.L() / nx;
    auto j0 = [&](double t, double x) { return kg_current(field, t, x).j0; };

    // values this close count as ties so that rounding noise cannot beat the
    // lowest-t, lowest-x rule
    auto tie = [](double v) { return 1e-13 * std::max(1.0, std::abs(v)); };

    struct RowMin {
        double value;
        int j;
    };
    std::vector<RowMin> rows(static_cast<std::size_t>(nt));
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        RowMin best{std::numeric_limits<double>::infinity(), 0};
        const double t = t0 + static_cast<double>(i) * ht;
        for (int j = 0; j < nx; ++j) {
            const double v = j0(t, j * hx);
            if (v < best.value - tie(best.value) || best.value == std::numeric_limits<double>::infinity())
                best = {v, j};
        }
        rows[i] = best;
    });
    std::size_t bi = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].value < rows[bi].value - tie(rows[bi].value)) bi = i;

    NegativityScan out;
    out.t = t0 + static_cast<double>(bi) * ht;
    out.x = rows[bi].j * hx;
    out.grid_min_j0 = out.min_j0 = rows[bi].value;

    double t = out.t, x = out.x;
    for (int iter = 0; iter < 100; ++iter) {
        const double tn = golden_min([&](double s) { return j0(s, x); }, std::max(t0, t - ht), std::min(t1, t + ht),
                                     tol / 10);
        const double xn = golden_min([&](double s) { return j0(tn, s); }, x - hx, x + hx, tol / 10);
        const double moved = std::abs(tn - t) + std::abs(xn - x);
        t = tn;
        x = xn;
        if (moved < tol) break;
    }
    const double refined = j0(t, x);
    if (refined < out.min_j0 - tie(out.min_j0)) {
        out.min_j0 = refined;
        out.t = t;
        out.x = x - field.L() * std::floor(x / field.L());
    }
    return out;
}

std::vector<CurrentSample> sample_current(const KGField& field, double t0, double t1, int nt, int nx) {
    if (nt < 2 || nx < 2 || !(t1 > t0)) throw std::invalid_argument("sample_current: need nt, nx >= 2 and t1 > t0");
    std::vector<CurrentSample> out;
    out.reserve(static_cast<std::size_t>(nt) * static_cast<std::size_t>(nx));
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nx; ++j) {
            const double t = t0 + i * (t1 - t0) / (nt - 1), x = j * field.L() / nx;
            const auto c = kg_current(field, t, x);
            out.push_back({t, x, c.j0, c.j1});
        }
    return out;
}

// ---------------------------------------------------------------------------

GammaSet dirac_gammas() {
    GammaSet g;
    g[0].setZero();
    g[0].topLeftCorner<2, 2>().setIdentity();
    g[0].bottomRightCorner<2, 2>() = -Eigen::Matrix2cd::Identity();
    for (int i = 1; i <= 3; ++i) {
        const Eigen::Matrix2cd s = pauli(i).matrix();
        g[i].setZero();
        g[i].topRightCorner<2, 2>() = s;
        g[i].bottomLeftCorner<2, 2>() = -s;
    }
    return g;
}

double minkowski(int mu, int nu) {
    if (mu < 0 || mu > 3 || nu < 0 || nu > 3) throw std::invalid_argument("minkowski: index out of range");
    if (mu != nu) return 0;
    return mu == 0 ? 1 : -1;
}

std::array<double, 4> dirac_current(const Spinor& psi, const GammaSet& gammas) {
    const Eigen::RowVector4cd bar = psi.adjoint() * gammas[0];
    std::array<double, 4> j{};
    j[0] = psi.squaredNorm();
    for (int mu = 1; mu < 4; ++mu) j[mu] = (bar * gammas[mu] * psi).value().real();
    return j;
}

}  // namespace qfl
