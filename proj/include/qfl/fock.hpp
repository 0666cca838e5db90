#pragma once

// Truncated Fock spaces: ladder and number operators, harmonic and polynomial
// Hamiltonians in the number basis, multimode free fields, bosonic two-particle
// states and a Jordan–Wigner fermion register.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include "qfl/errors.hpp"
#include "qfl/spin.hpp"

namespace qfl {

/// Largest product of per-mode dimensions a multimode register may have.
inline constexpr Eigen::Index kMaxMultiModeDim = 4096;
/// Largest fermion register (2^10 states).
inline constexpr int kMaxFermionModes = 10;

template <typename Real>
using SparseCMatrix = Eigen::SparseMatrix<std::complex<Real>>;

/// a and a^dagger on span{|0>, ..., |N_max>}.
template <typename Real>
struct FockSpaceT {
    CMatrix<Real> a;
    CMatrix<Real> a_dag;

    Eigen::Index dim() const noexcept { return a.rows(); }
    Eigen::Index n_max() const noexcept { return a.rows() - 1; }
};

template <typename Real = double>
FockSpaceT<Real> ladder(Eigen::Index dim) {
    if (dim < 2) throw std::invalid_argument("ladder: dimension must be at least 2");
    CMatrix<Real> a = CMatrix<Real>::Zero(dim, dim);
    for (Eigen::Index n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<Real>(n));
    CMatrix<Real> a_dag = a.adjoint();
    return {std::move(a), std::move(a_dag)};
}

/// diag(0, 1, ..., N_max). Equal to a^dagger a entry for entry; built as a
/// diagonal so that N|n> = n|n> holds without rounding.
template <typename Real>
OperatorT<Real> number_op(const FockSpaceT<Real>& fs) {
    CMatrix<Real> n = CMatrix<Real>::Zero(fs.dim(), fs.dim());
    for (Eigen::Index i = 0; i < fs.dim(); ++i) n(i, i) = static_cast<Real>(i);
    return OperatorT<Real>(std::move(n));
}

/// (a^dagger)^n |0> / sqrt(n!).
template <typename Real>
StateVectorT<Real> fock_state(const FockSpaceT<Real>& fs, Eigen::Index n) {
    if (n < 0 || n > fs.n_max())
        throw std::invalid_argument("fock_state: n = " + std::to_string(n) + " outside 0.." +
                                    std::to_string(fs.n_max()));
    CVector<Real> v = CVector<Real>::Zero(fs.dim());
    v(0) = 1;
    Real norm = 1;
    for (Eigen::Index k = 1; k <= n; ++k) {
        v = fs.a_dag * v;
        norm *= std::sqrt(static_cast<Real>(k));
    }
    return StateVectorT<Real>(CVector<Real>(v / norm));
}

template <typename Real>
OperatorT<Real> harmonic_hamiltonian(const FockSpaceT<Real>& fs, Real omega) {
    if (!(omega > 0)) throw std::invalid_argument("harmonic_h: omega must be positive");
    CMatrix<Real> h = CMatrix<Real>::Zero(fs.dim(), fs.dim());
    for (Eigen::Index i = 0; i < fs.dim(); ++i) h(i, i) = omega * (static_cast<Real>(i) + Real(0.5));
    return OperatorT<Real>(std::move(h));
}

/// Spectrum of omega (N + 1/2), ascending.
template <typename Real>
std::vector<Real> harmonic_h(const FockSpaceT<Real>& fs, Real omega) {
    const auto h = harmonic_hamiltonian(fs, omega);
    std::vector<Real> out;
    for (Eigen::Index i = 0; i < fs.dim(); ++i) out.push_back(h(i, i).real());
    return out;
}

// ---------------------------------------------------------------------------
// Polynomial potentials
// ---------------------------------------------------------------------------

/// V(x) = sum_j c_j x^j.
template <typename Real>
struct PolynomialT {
    std::vector<Real> coefficients;

    int degree() const {
        for (int j = static_cast<int>(coefficients.size()) - 1; j >= 0; --j)
            if (coefficients[static_cast<std::size_t>(j)] != Real(0)) return j;
        return 0;
    }
    Real coefficient(int j) const {
        return j < static_cast<int>(coefficients.size()) ? coefficients[static_cast<std::size_t>(j)] : Real(0);
    }
    Real operator()(Real x) const {
        Real v = 0;
        for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * x + *it;
        return v;
    }
};

/// Parses sums of terms `c`, `c*x`, `c*x^p` (the `*` is optional, p a
/// nonnegative integer). Anything else throws Unsupported.
inline PolynomialT<double> parse_potential(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) throw Unsupported("potential: empty expression");

    PolynomialT<double> out;
    auto add = [&](std::size_t power, double c) {
        if (out.coefficients.size() <= power) out.coefficients.resize(power + 1, 0.0);
        out.coefficients[power] += c;
    };
    std::size_t i = 0;
    while (i < s.size()) {
        double sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        double coef = 1;
        bool have_coef = false;
        if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
            std::size_t used = 0;
            coef = std::stod(s.substr(i), &used);
            i += used;
            have_coef = true;
        }
        std::size_t power = 0;
        if (i < s.size() && s[i] == '*') {
            if (!have_coef) throw Unsupported("potential: dangling '*' in '" + text + "'");
            ++i;
        }
        if (i < s.size() && s[i] == 'x') {
            ++i;
            power = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                std::size_t start = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (start == i) throw Unsupported("potential: non-integer power in '" + text + "'");
                power = std::stoul(s.substr(start, i - start));
            }
        } else if (!have_coef) {
            throw Unsupported("potential: '" + text + "' is not a polynomial in x");
        }
        if (i < s.size() && s[i] != '+' && s[i] != '-')
            throw Unsupported("potential: '" + text + "' is not a polynomial in x");
        add(power, sign * coef);
    }
    return out;
}

/// x = (a + a^dagger) / sqrt(2 m omega) on a truncated space.
template <typename Real>
CMatrix<Real> position_op(const FockSpaceT<Real>& fs, Real omega, Real mass) {
    return (fs.a + fs.a_dag) / std::sqrt(2 * mass * omega);
}

template <typename Real>
struct GeneralSpectrumT {
    std::vector<Real> eigenvalues;  ///< ascending, all dim of them
    Real n_commutator_norm = 0;     ///< Frobenius norm of [N, H]
    OperatorT<Real> hamiltonian;

    /// The lowest third, the part that survives truncation doubling.
    std::vector<Real> low_third() const {
        return {eigenvalues.begin(), eigenvalues.begin() + static_cast<std::ptrdiff_t>(eigenvalues.size() / 3)};
    }
};

/// H = omega (N + 1/2) + [V(x) - m omega^2 x^2 / 2]. The bracket is built on a
/// space deg(V) states larger and then cut back, so its matrix elements in
/// the working basis are exact.
template <typename Real>
GeneralSpectrumT<Real> general_h(const FockSpaceT<Real>& fs, Real omega, const PolynomialT<Real>& V, Real mass) {
    if (!(omega > 0) || !(mass > 0)) throw std::invalid_argument("general_h: omega and mass must be positive");
    const Eigen::Index d = fs.dim();
    const int deg = std::max(V.degree(), 2);

    std::vector<Real> b(static_cast<std::size_t>(deg) + 1);
    for (int j = 0; j <= deg; ++j) b[static_cast<std::size_t>(j)] = V.coefficient(j);
    b[2] -= mass * omega * omega / 2;

    const auto big = ladder<Real>(d + deg);
    const CMatrix<Real> x = position_op(big, omega, mass);
    const CMatrix<Real> id = CMatrix<Real>::Identity(d + deg, d + deg);
    CMatrix<Real> bracket = b[static_cast<std::size_t>(deg)] * id;
    for (int j = deg - 1; j >= 0; --j) bracket = (bracket * x + b[static_cast<std::size_t>(j)] * id).eval();

    CMatrix<Real> h = bracket.topLeftCorner(d, d);
    for (Eigen::Index i = 0; i < d; ++i) h(i, i) += omega * (static_cast<Real>(i) + Real(0.5));
    h = ((h + h.adjoint()) / Real(2)).eval();

    Real comm = 0;
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) comm += std::norm(static_cast<Real>(i - j) * h(i, j));

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>> solver(h.real(),
                                                                                            Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("general_h: eigensolver failed");
    std::vector<Real> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + d);
    return {std::move(ev), std::sqrt(comm), OperatorT<Real>(std::move(h))};
}

// ---------------------------------------------------------------------------
// Many modes
// ---------------------------------------------------------------------------

template <typename Real>
struct ModeSpecT {
    std::string label;
    Real omega;
    Eigen::Index truncation;  ///< states per mode, occupations 0..truncation-1
};

/// Product register; mode 0 is the slowest index.
template <typename Real>
class MultiModeT {
public:
    explicit MultiModeT(std::vector<ModeSpecT<Real>> modes) : modes_(std::move(modes)) {
        if (modes_.empty()) throw std::invalid_argument("MultiMode: no modes");
        dim_ = 1;
        for (const auto& m : modes_) {
            if (!(m.omega > 0)) throw std::invalid_argument("MultiMode: mode '" + m.label + "' has omega <= 0");
            if (m.truncation < 1) throw std::invalid_argument("MultiMode: truncation must be >= 1");
            dim_ *= m.truncation;
            if (dim_ > kMaxMultiModeDim)
                throw ResourceError("MultiMode: total dimension exceeds " + std::to_string(kMaxMultiModeDim));
        }
    }

    const std::vector<ModeSpecT<Real>>& modes() const noexcept { return modes_; }
    Eigen::Index dim() const noexcept { return dim_; }

    /// Occupation numbers of product-basis index `index`.
    std::vector<Eigen::Index> occupations(Eigen::Index index) const {
        std::vector<Eigen::Index> n(modes_.size());
        for (std::size_t k = modes_.size(); k-- > 0;) {
            n[k] = index % modes_[k].truncation;
            index /= modes_[k].truncation;
        }
        return n;
    }

    /// a_k embedded in the register (identity on the other factors).
    SparseCMatrix<Real> annihilator(std::size_t k) const {
        return embed(k, [](Eigen::Index d) {
            SparseCMatrix<Real> f(d, d);
            for (Eigen::Index n = 1; n < d; ++n) f.insert(n - 1, n) = std::sqrt(static_cast<Real>(n));
            return f;
        });
    }

    /// N_k embedded in the register, with the exact diagonal of number_op.
    SparseCMatrix<Real> number(std::size_t k) const {
        return embed(k, [](Eigen::Index d) {
            SparseCMatrix<Real> f(d, d);
            for (Eigen::Index n = 1; n < d; ++n) f.insert(n, n) = static_cast<Real>(n);
            return f;
        });
    }

private:
    template <typename Factor>
    SparseCMatrix<Real> embed(std::size_t k, Factor&& factor) const {
        if (k >= modes_.size()) throw std::out_of_range("MultiMode: mode index out of range");
        SparseCMatrix<Real> out(1, 1);
        out.insert(0, 0) = 1;
        for (std::size_t j = 0; j < modes_.size(); ++j) {
            const Eigen::Index d = modes_[j].truncation;
            SparseCMatrix<Real> f(d, d);
            if (j == k)
                f = factor(d);
            else
                f.setIdentity();
            out = Eigen::kroneckerProduct(out, f).eval();
        }
        return out;
    }

    std::vector<ModeSpecT<Real>> modes_;
    Eigen::Index dim_ = 1;
};

template <typename Real>
struct MultiModeSpectrumT {
    std::vector<Real> eigenvalues;                       ///< ascending
    std::vector<std::vector<Eigen::Index>> occupations;  ///< tuple per eigenvalue
    Real ground_energy = 0;
};

/// H = sum_k omega_k (N_k + 1/2) assembled from the embedded number operators.
/// H is diagonal in the product basis; the check that it is, is part of the
/// computation.
template <typename Real>
MultiModeSpectrumT<Real> multimode_free_h(const MultiModeT<Real>& mm) {
    const Eigen::Index d = mm.dim();
    SparseCMatrix<Real> h(d, d);
    Real zero_point = 0;
    for (std::size_t k = 0; k < mm.modes().size(); ++k) {
        h += mm.modes()[k].omega * mm.number(k);
        zero_point += mm.modes()[k].omega / 2;
    }
    std::vector<std::pair<Real, Eigen::Index>> diag;
    diag.reserve(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i) diag.emplace_back(zero_point, i);
    for (int c = 0; c < h.outerSize(); ++c)
        for (typename SparseCMatrix<Real>::InnerIterator it(h, c); it; ++it) {
            if (it.row() != it.col() && it.value() != std::complex<Real>(0))
                throw ContractViolation("multimode_free_h: Hamiltonian is not diagonal in the occupation basis");
            if (it.row() == it.col()) diag[static_cast<std::size_t>(it.row())].first += it.value().real();
        }
    std::stable_sort(diag.begin(), diag.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    MultiModeSpectrumT<Real> out;
    for (const auto& [e, i] : diag) {
        out.eigenvalues.push_back(e);
        out.occupations.push_back(mm.occupations(i));
    }
    out.ground_energy = out.eigenvalues.front();
    return out;
}

template <typename Real>
struct TwoBosonStateT {
    CVector<Real> state;  ///< sum f(k1, k2) a_k1^dagger a_k2^dagger |0>
    CMatrix<Real> psi;    ///< psi(k1, k2) = <0| a_k1 a_k2 |state>
    Real defect = 0;      ///< max |psi(k1, k2) - psi(k2, k1)|
};

/// Builds the two-particle state from arbitrary coefficients f on a register
/// of f.rows() modes (three states each) and reads the wave function back.
template <typename Real>
TwoBosonStateT<Real> two_boson_symmetry(const CMatrix<Real>& f) {
    if (f.rows() != f.cols() || f.rows() < 1) throw std::invalid_argument("two_boson_symmetry: f must be square");
    const std::size_t K = static_cast<std::size_t>(f.rows());
    std::vector<ModeSpecT<Real>> modes;
    for (std::size_t k = 0; k < K; ++k) modes.push_back({"k" + std::to_string(k + 1), Real(1), 3});
    const MultiModeT<Real> reg(std::move(modes));

    std::vector<SparseCMatrix<Real>> a, ad;
    for (std::size_t k = 0; k < K; ++k) {
        a.push_back(reg.annihilator(k));
        ad.push_back(SparseCMatrix<Real>(a.back().adjoint()));
    }
    CVector<Real> vac = CVector<Real>::Zero(reg.dim());
    vac(0) = 1;

    TwoBosonStateT<Real> out;
    out.state = CVector<Real>::Zero(reg.dim());
    for (std::size_t k1 = 0; k1 < K; ++k1)
        for (std::size_t k2 = 0; k2 < K; ++k2) {
            const auto c = f(static_cast<Eigen::Index>(k1), static_cast<Eigen::Index>(k2));
            if (c != std::complex<Real>(0)) out.state += c * (ad[k1] * (ad[k2] * vac));
        }
    out.psi = CMatrix<Real>::Zero(f.rows(), f.cols());
    for (std::size_t k1 = 0; k1 < K; ++k1)
        for (std::size_t k2 = 0; k2 < K; ++k2)
            out.psi(static_cast<Eigen::Index>(k1), static_cast<Eigen::Index>(k2)) =
                vac.dot(a[k1] * (a[k2] * out.state));
    out.defect = (out.psi - out.psi.transpose()).cwiseAbs().maxCoeff();
    return out;
}

// ---------------------------------------------------------------------------
// Fermions
// ---------------------------------------------------------------------------

/// Jordan–Wigner register: a_k = Z x ... x Z x s x 1 x ... x 1 with
/// s = |0><1| in the k-th factor and mode 1 as the leftmost (slowest) factor.
template <typename Real>
struct FermionRegisterT {
    int n_modes = 0;
    std::vector<SparseCMatrix<Real>> a;
    std::vector<SparseCMatrix<Real>> a_dag;

    Eigen::Index dim() const noexcept { return Eigen::Index(1) << n_modes; }
};

template <typename Real = double>
FermionRegisterT<Real> fermion_register(int n_modes) {
    if (n_modes < 1) throw std::invalid_argument("fermion_register: need at least one mode");
    if (n_modes > kMaxFermionModes)
        throw ResourceError("fermion_register: more than " + std::to_string(kMaxFermionModes) + " modes");
    SparseCMatrix<Real> z(2, 2), s(2, 2), id(2, 2);
    z.insert(0, 0) = 1;
    z.insert(1, 1) = -1;
    s.insert(0, 1) = 1;
    id.setIdentity();

    FermionRegisterT<Real> out;
    out.n_modes = n_modes;
    for (int k = 0; k < n_modes; ++k) {
        SparseCMatrix<Real> op(1, 1);
        op.insert(0, 0) = 1;
        for (int j = 0; j < n_modes; ++j) {
            const SparseCMatrix<Real>& f = j < k ? z : (j == k ? s : id);
            op = Eigen::kroneckerProduct(op, f).eval();
        }
        op.makeCompressed();
        out.a_dag.push_back(SparseCMatrix<Real>(op.adjoint()));
        out.a.push_back(std::move(op));
    }
    return out;
}

using FockSpace = FockSpaceT<double>;
using Polynomial = PolynomialT<double>;
using GeneralSpectrum = GeneralSpectrumT<double>;
using ModeSpec = ModeSpecT<double>;
using MultiMode = MultiModeT<double>;
using MultiModeSpectrum = MultiModeSpectrumT<double>;
using TwoBosonState = TwoBosonStateT<double>;
using FermionRegister = FermionRegisterT<double>;

}  // namespace qfl
