#include "qfl/bogoliubov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qfl/errors.hpp"
#include "qfl/fock.hpp"
#include "qfl/parallel.hpp"

namespace qfl {

namespace {

using cd = std::complex<double>;

void require_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

std::string describe(cd z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

ModeBasis plane_wave_basis(std::string name, double L, double m, std::vector<int> ns,
                           std::vector<std::complex<double>> phases) {
    if (!phases.empty() && phases.size() != ns.size())
        throw std::invalid_argument("plane_wave_basis: one phase per mode expected");
    ModeBasis out{std::move(name), L, ns, {}};
    for (std::size_t i = 0; i < ns.size(); ++i) {
        KGField f(L, m);
        f.add(ns[i], Frequency::positive, phases.empty() ? cd(1) : phases[i]);
        out.modes.push_back(std::move(f));
    }
    return out;
}

void check_orthonormal(const ModeBasis& basis, double t, double tol) {
    if (basis.labels.size() != basis.modes.size())
        throw std::invalid_argument("ModeBasis '" + basis.name + "': labels and modes differ in count");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const KGField fi_conj = basis.modes[i].conjugate();
        for (std::size_t j = i; j < basis.size(); ++j) {
            const KGField fj_conj = basis.modes[j].conjugate();
            const cd want = i == j ? 1.0 : 0.0;
            const cd pos = kg_inner(basis.modes[i], basis.modes[j], t);
            const cd neg = kg_inner(fi_conj, fj_conj, t);
            const cd mix = kg_inner(basis.modes[i], fj_conj, t);
            auto fail = [&](const std::string& form, cd got, cd expected) {
                throw ContractViolation("ModeBasis '" + basis.name + "' is not orthonormal: " + form + " for pair (" +
                                        std::to_string(basis.labels[i]) + ", " + std::to_string(basis.labels[j]) +
                                        ") is " + describe(got) + ", expected " + describe(expected));
            };
            if (std::abs(pos - want) > tol) fail("(f_i, f_j)", pos, want);
            if (std::abs(neg + want) > tol) fail("(f_i*, f_j*)", neg, -want);
            if (std::abs(mix) > tol) fail("(f_i, f_j*)", mix, 0.0);
        }
    }
}

double BogoliubovMap::normalization_residual() const {
    const Eigen::Index n = alpha.rows();
    const Eigen::MatrixXcd r =
        alpha * alpha.adjoint() - beta.conjugate() * beta.transpose() - Eigen::MatrixXcd::Identity(n, n);
    return r.cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd BogoliubovMap::transfer_matrix() const {
    const Eigen::Index nl = alpha.rows(), nk = alpha.cols();
    Eigen::MatrixXcd t(2 * nk, 2 * nl);
    t.topLeftCorner(nk, nl) = alpha.transpose();
    t.topRightCorner(nk, nl) = beta.transpose();
    t.bottomLeftCorner(nk, nl) = beta.adjoint();
    t.bottomRightCorner(nk, nl) = alpha.adjoint();
    return t;
}

BogoliubovMap bogoliubov_from_bases(const ModeBasis& in, const ModeBasis& out, double t, unsigned threads) {
    if (in.L != out.L) throw std::invalid_argument("bogoliubov_from_bases: bases live in different boxes");
    check_orthonormal(in, t);
    check_orthonormal(out, t);

    const auto nl = static_cast<Eigen::Index>(out.size());
    const auto nk = static_cast<Eigen::Index>(in.size());
    BogoliubovMap map{Eigen::MatrixXcd::Zero(nl, nk), Eigen::MatrixXcd::Zero(nl, nk), in, out};

    std::vector<KGField> in_conj;
    in_conj.reserve(in.size());
    for (const auto& f : in.modes) in_conj.push_back(f.conjugate());

    parallel_for(out.size(), threads, [&](std::size_t l) {
        for (std::size_t k = 0; k < in.size(); ++k) {
            const auto li = static_cast<Eigen::Index>(l), ki = static_cast<Eigen::Index>(k);
            map.alpha(li, ki) = kg_inner(out.modes[l], in.modes[k], t);
            map.beta(li, ki) = std::conj(kg_inner(out.modes[l], in_conj[k], t));
        }
    });
    return map;
}

double vacuum_occupation(const BogoliubovMap& map, std::size_t l) {
    if (l >= static_cast<std::size_t>(map.beta.rows())) throw std::out_of_range("vacuum_occupation: mode index");
    return map.beta.row(static_cast<Eigen::Index>(l)).squaredNorm();
}

double operator_vacuum_occupation(std::complex<double> alpha, std::complex<double> beta, int truncation) {
    const auto fs = ladder(truncation);
    const CMatrix<double> abar = alpha * fs.a + std::conj(beta) * fs.a_dag;
    const CMatrix<double> nbar = abar.adjoint() * abar;
    return nbar(0, 0).real();
}

QuenchResult sudden_quench(const QuenchModel& q, unsigned threads) {
    if (!(q.m_in >= 0) || !(q.m_out >= 0)) throw std::invalid_argument("sudden_quench: masses must be nonnegative");
    require_positive(q.L, "sudden_quench: L");
    if (q.ns.empty()) throw std::invalid_argument("sudden_quench: no modes");

    std::set<int> closed;
    for (int n : q.ns) {
        closed.insert(n);
        closed.insert(-n);
    }
    const std::vector<int> labels(closed.begin(), closed.end());
    const ModeBasis in = plane_wave_basis("in", q.L, q.m_in, labels);
    const ModeBasis out = plane_wave_basis("out", q.L, q.m_out, labels);

    QuenchResult result{bogoliubov_from_bases(in, out, 0, threads), {}};
    auto index = [&](int n) {
        return static_cast<Eigen::Index>(std::lower_bound(labels.begin(), labels.end(), n) - labels.begin());
    };
    for (int n : q.ns) {
        const Eigen::Index k = index(n), l = index(-n);
        QuenchMode m;
        m.n = n;
        m.omega_in = in.modes[static_cast<std::size_t>(k)].terms()[0].mode.omega;
        m.omega_out = out.modes[static_cast<std::size_t>(k)].terms()[0].mode.omega;
        m.alpha = result.map.alpha(k, k);
        m.beta = result.map.beta(l, k);
        m.n_created = vacuum_occupation(result.map, static_cast<std::size_t>(k));
        result.modes.push_back(m);
    }
    return result;
}

// ---------------------------------------------------------------------------

double bose_einstein(double omega, double T) {
    require_positive(omega, "bose_einstein: omega");
    require_positive(T, "bose_einstein: T");
    return 1 / std::expm1(omega / T);
}

double unruh_temperature(double a) {
    require_positive(a, "unruh: acceleration");
    return a / (2 * std::numbers::pi);
}

double unruh_spectrum(double omega, double a) { return bose_einstein(omega, unruh_temperature(a)); }

double hawking_temperature(double M, double G) {
    require_positive(M, "hawking: M");
    require_positive(G, "hawking: G");
    return 1 / (8 * std::numbers::pi * G * M);
}

double hawking_spectrum(double omega, double M, double G) { return bose_einstein(omega, hawking_temperature(M, G)); }

namespace {

std::vector<ThermalSpectrumPoint> table(double T, const std::vector<double>& omegas) {
    std::vector<ThermalSpectrumPoint> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back({w, bose_einstein(w, T), T});
    return out;
}

}  // namespace

std::vector<ThermalSpectrumPoint> unruh_table(double a, const std::vector<double>& omegas) {
    return table(unruh_temperature(a), omegas);
}

std::vector<ThermalSpectrumPoint> hawking_table(double M, double G, const std::vector<double>& omegas) {
    return table(hawking_temperature(M, G), omegas);
}

ThermalFit thermality_fit(const std::vector<ThermalSpectrumPoint>& points) {
    if (points.size() < 2) throw std::invalid_argument("thermality_fit: need at least two points");
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd A(n, 2);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = points[static_cast<std::size_t>(i)];
        if (!(p.occupation > 0)) throw std::invalid_argument("thermality_fit: occupations must be positive");
        A(i, 0) = p.omega;
        A(i, 1) = 1;
        y(i) = std::log1p(1 / p.occupation);
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(y);
    ThermalFit fit;
    fit.slope = c(0);
    fit.intercept = c(1);
    fit.temperature = 1 / c(0);
    fit.residual = (A * c - y).cwiseAbs().maxCoeff();
    return fit;
}

}  // namespace qfl
