#pragma once

// Finite-dimensional state engine: Pauli algebra, Born-rule measurement with
// Lüders collapse, sequential measurement chains, two-particle EPR/Hardy
// states, von Neumann premeasurement and the trace obstruction to a
// finite-dimensional time operator.
//
// Everything is templated on the real scalar type; the `double` aliases at the
// bottom are what the rest of the library uses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qfl/errors.hpp"
#include "qfl/parallel.hpp"
#include "qfl/random.hpp"

namespace qfl {

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

/// Tolerance for identities that are exact up to rounding.
inline constexpr double kExactTol = 1e-12;
/// Tolerance for identities that pass through an iterative eigensolver.
inline constexpr double kSolverTol = 1e-10;
/// Branches whose Born probability falls below this are treated as impossible.
inline constexpr double kImpossibleProbability = 1e-20;

// ---------------------------------------------------------------------------
// Value types
// ---------------------------------------------------------------------------

/// Unit vector in C^d.
template <typename Real>
class StateVectorT {
public:
    using Scalar = std::complex<Real>;
    using Vector = CVector<Real>;

    /// Takes amplitudes that are already unit norm (within 1e-12).
    explicit StateVectorT(Vector amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.size() == 0) throw std::invalid_argument("StateVector: empty amplitude list");
        if (!amps_.allFinite()) throw std::invalid_argument("StateVector: non-finite amplitude");
        const Real n2 = amps_.squaredNorm();
        if (std::abs(n2 - Real(1)) > Real(kExactTol))
            throw std::invalid_argument("StateVector: amplitudes are not unit norm (|psi|^2 = " +
                                        std::to_string(static_cast<double>(n2)) + ")");
    }

    StateVectorT(std::initializer_list<Scalar> amplitudes)
        : StateVectorT(from_list(amplitudes)) {}

    /// Rescales an arbitrary nonzero vector to unit norm.
    static StateVectorT normalized(const Vector& v) {
        const Real n = v.norm();
        if (!(n > Real(0)) || !std::isfinite(static_cast<double>(n)))
            throw std::invalid_argument("StateVector: cannot normalize a zero or non-finite vector");
        return StateVectorT(Vector(v / n));
    }

    /// Basis vector e_index of C^dim.
    static StateVectorT basis(Eigen::Index dim, Eigen::Index index) {
        if (index < 0 || index >= dim) throw std::invalid_argument("StateVector: basis index out of range");
        Vector v = Vector::Zero(dim);
        v(index) = Scalar(1);
        return StateVectorT(std::move(v));
    }

    const Vector& amplitudes() const noexcept { return amps_; }
    Eigen::Index dim() const noexcept { return amps_.size(); }
    Scalar operator[](Eigen::Index i) const { return amps_(i); }

    /// <this|other>
    Scalar inner(const StateVectorT& other) const {
        if (other.dim() != dim()) throw std::invalid_argument("StateVector::inner: dimension mismatch");
        return amps_.dot(other.amps_);
    }

    friend bool operator==(const StateVectorT& a, const StateVectorT& b) { return a.amps_ == b.amps_; }

private:
    static Vector from_list(std::initializer_list<Scalar> list) {
        Vector v(static_cast<Eigen::Index>(list.size()));
        Eigen::Index i = 0;
        for (const auto& z : list) v(i++) = z;
        return v;
    }

    Vector amps_;
};

/// Square complex matrix with a verified hermiticity flag.
template <typename Real>
class OperatorT {
public:
    using Scalar = std::complex<Real>;
    using Matrix = CMatrix<Real>;

    explicit OperatorT(Matrix entries) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw std::invalid_argument("OperatorMatrix: entries must be a non-empty square array");
        hermitian_ = (m_ - m_.adjoint()).cwiseAbs().maxCoeff() < Real(kExactTol);
    }

    static OperatorT identity(Eigen::Index dim) { return OperatorT(Matrix::Identity(dim, dim)); }
    static OperatorT zero(Eigen::Index dim) { return OperatorT(Matrix::Zero(dim, dim)); }

    const Matrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    bool is_hermitian() const noexcept { return hermitian_; }
    Scalar operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    OperatorT adjoint() const { return OperatorT(m_.adjoint()); }

    /// max |A_ij|
    Real max_abs() const { return m_.cwiseAbs().maxCoeff(); }

    friend OperatorT operator+(const OperatorT& a, const OperatorT& b) { return OperatorT(a.checked(b).m_ + b.m_); }
    friend OperatorT operator-(const OperatorT& a, const OperatorT& b) { return OperatorT(a.checked(b).m_ - b.m_); }
    friend OperatorT operator*(const OperatorT& a, const OperatorT& b) { return OperatorT(a.checked(b).m_ * b.m_); }
    friend OperatorT operator*(Scalar s, const OperatorT& a) { return OperatorT(s * a.m_); }
    friend bool operator==(const OperatorT& a, const OperatorT& b) { return a.m_ == b.m_; }

    /// Unnormalized A|psi>.
    CVector<Real> apply(const StateVectorT<Real>& psi) const {
        if (psi.dim() != dim()) throw std::invalid_argument("OperatorMatrix::apply: dimension mismatch");
        return m_ * psi.amplitudes();
    }

private:
    const OperatorT& checked(const OperatorT& other) const {
        if (other.dim() != dim()) throw std::invalid_argument("OperatorMatrix: dimension mismatch");
        return *this;
    }

    Matrix m_;
    bool hermitian_ = false;
};

template <typename Real>
struct EigenpairT {
    Real value;
    StateVectorT<Real> vector;
};

/// Distinct eigenvalues (descending) with orthogonal projectors onto their
/// eigenspaces.
template <typename Real>
struct SpectralDecompositionT {
    std::vector<Real> values;
    std::vector<CMatrix<Real>> projectors;

    std::size_t size() const noexcept { return values.size(); }
};

template <typename Real>
struct OutcomeProbabilityT {
    Real eigenvalue;
    Real probability;
};

template <typename Real>
struct MeasurementStepT {
    OperatorT<Real> observable;
    Real eigenvalue;
};

template <typename Real>
struct MeasurementOutcomeT {
    Real eigenvalue;
    StateVectorT<Real> post_state;
};

/// One realization of a sequence of projective measurements.
template <typename Real>
struct MeasurementRecordT {
    std::vector<MeasurementOutcomeT<Real>> outcomes;
    Real probability = 1;  ///< product of per-step Born probabilities
    std::uint64_t seed = 0;
    std::uint64_t run = 0;

    std::vector<Real> eigenvalues() const {
        std::vector<Real> out;
        out.reserve(outcomes.size());
        for (const auto& o : outcomes) out.push_back(o.eigenvalue);
        return out;
    }
};

template <typename Real>
struct HardyWitnessT {
    std::complex<Real> amplitude;
    Real probability;
};

template <typename Real>
struct TraceObstructionT {
    std::complex<Real> trace_lhs;  ///< tr([T, H])
    std::complex<Real> trace_rhs;  ///< tr(-i hbar 1) = -i hbar d

    /// True when the two traces differ, i.e. [T, H] = -i hbar 1 has no
    /// solution in this dimension.
    bool certifies() const { return std::abs(trace_lhs - trace_rhs) > Real(kSolverTol); }
};

// ---------------------------------------------------------------------------
// Pauli algebra
// ---------------------------------------------------------------------------

/// Pauli matrix sigma_i, i in {1, 2, 3}.
template <typename Real = double>
OperatorT<Real> pauli(int i) {
    using C = std::complex<Real>;
    CMatrix<Real> m(2, 2);
    switch (i) {
        case 1: m << C(0), C(1), C(1), C(0); break;
        case 2: m << C(0), C(0, -1), C(0, 1), C(0); break;
        case 3: m << C(1), C(0), C(0), C(-1); break;
        default: throw std::invalid_argument("pauli: index must be 1, 2 or 3, got " + std::to_string(i));
    }
    return OperatorT<Real>(std::move(m));
}

template <typename Real>
OperatorT<Real> commutator(const OperatorT<Real>& a, const OperatorT<Real>& b) {
    return a * b - b * a;
}

template <typename Real>
OperatorT<Real> anticommutator(const OperatorT<Real>& a, const OperatorT<Real>& b) {
    return a * b + b * a;
}

/// Kronecker product; the left factor is the slow index.
template <typename Real>
OperatorT<Real> tensor(const OperatorT<Real>& a, const OperatorT<Real>& b) {
    return OperatorT<Real>(Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval());
}

template <typename Real>
StateVectorT<Real> tensor(const StateVectorT<Real>& a, const StateVectorT<Real>& b) {
    return StateVectorT<Real>::normalized(Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval());
}

// ---------------------------------------------------------------------------
// Spectral machinery
// ---------------------------------------------------------------------------

namespace detail {

template <typename Real>
void fix_phase(CVector<Real>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const Real mag = std::abs(v(i));
        if (mag > Real(kSolverTol)) {
            v *= std::conj(v(i)) / mag;
            v(i) = std::complex<Real>(v(i).real(), Real(0));
            return;
        }
    }
}

template <typename Real>
void require_hermitian(const OperatorT<Real>& a, const char* who) {
    if (!a.is_hermitian()) throw ContractViolation(std::string(who) + ": observable is not hermitian");
}

// Closed-form 2x2 hermitian eigensystem. Keeps the Pauli spectra exactly
// {+1, -1} and the eigenvectors free of solver noise.
template <typename Real>
std::vector<EigenpairT<Real>> eigen2(const CMatrix<Real>& m) {
    using C = std::complex<Real>;
    const Real a = m(0, 0).real();
    const Real d = m(1, 1).real();
    const C b = m(0, 1);
    const Real mean = (a + d) / 2;
    const Real half = (a - d) / 2;
    const Real r = std::hypot(half, std::abs(b));
    const Real hi = mean + r;
    const Real lo = mean - r;

    CVector<Real> vh(2), vl(2);
    if (r == Real(0)) {
        vh << C(1), C(0);
        vl << C(0), C(1);
    } else {
        // pick the cancellation-free column of (A - lambda) for each root
        if (half >= 0) {
            vh << C(hi - d), std::conj(b);
            vl << b, C(lo - a);
        } else {
            vh << b, C(hi - a);
            vl << C(lo - d), std::conj(b);
        }
        vh /= vh.norm();
        vl /= vl.norm();
    }
    fix_phase(vh);
    fix_phase(vl);
    std::vector<EigenpairT<Real>> out;
    out.push_back({hi, StateVectorT<Real>::normalized(vh)});
    out.push_back({lo, StateVectorT<Real>::normalized(vl)});
    return out;
}

template <typename Real>
Real grouping_tol(const std::vector<Real>& values) {
    Real scale = 1;
    for (Real v : values) scale = std::max(scale, std::abs(v));
    return Real(kSolverTol) * scale;
}

}  // namespace detail

/// Orthonormal eigenvectors with eigenvalues sorted descending. Phase
/// convention: the first nonzero component of each eigenvector is real
/// positive.
template <typename Real>
std::vector<EigenpairT<Real>> eigenbasis(const OperatorT<Real>& a) {
    detail::require_hermitian(a, "eigenbasis");
    if (a.dim() == 2) return detail::eigen2<Real>(a.matrix());

    // Hermitian part only, so the solver sees an exactly self-adjoint input.
    const CMatrix<Real> h = (a.matrix() + a.matrix().adjoint()) / Real(2);
    Eigen::SelfAdjointEigenSolver<CMatrix<Real>> solver(h);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigenbasis: eigensolver failed");
    std::vector<EigenpairT<Real>> out;
    out.reserve(static_cast<std::size_t>(a.dim()));
    for (Eigen::Index i = a.dim() - 1; i >= 0; --i) {
        CVector<Real> v = solver.eigenvectors().col(i);
        detail::fix_phase(v);
        out.push_back({solver.eigenvalues()(i), StateVectorT<Real>::normalized(v)});
    }
    return out;
}

template <typename Real>
std::vector<Real> eigenvalues(const OperatorT<Real>& a) {
    std::vector<Real> out;
    for (const auto& p : eigenbasis(a)) out.push_back(p.value);
    return out;
}

/// Groups degenerate eigenvalues (Lüders rule) and builds the eigenspace
/// projectors. With two distinct eigenvalues the projectors come from the
/// closed form P(+) = (A - l_-)/(l_+ - l_-), which is exact for Pauli-type
/// observables.
template <typename Real>
SpectralDecompositionT<Real> spectral_decomposition(const OperatorT<Real>& a) {
    const auto pairs = eigenbasis(a);
    std::vector<Real> raw;
    for (const auto& p : pairs) raw.push_back(p.value);
    const Real tol = detail::grouping_tol(raw);

    // group consecutive (descending) eigenvalues
    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (groups.empty() || std::abs(pairs[groups.back().front()].value - pairs[i].value) > tol)
            groups.push_back({i});
        else
            groups.back().push_back(i);
    }

    SpectralDecompositionT<Real> out;
    for (const auto& g : groups) {
        Real mean = 0;
        for (auto i : g) mean += pairs[i].value;
        out.values.push_back(mean / static_cast<Real>(g.size()));
    }

    const Eigen::Index d = a.dim();
    if (groups.size() == 1) {
        out.projectors.push_back(CMatrix<Real>::Identity(d, d));
    } else if (groups.size() == 2) {
        const Real hi = out.values[0], lo = out.values[1];
        const CMatrix<Real> id = CMatrix<Real>::Identity(d, d);
        out.projectors.push_back((a.matrix() - lo * id) / (hi - lo));
        out.projectors.push_back((hi * id - a.matrix()) / (hi - lo));
    } else {
        for (const auto& g : groups) {
            CMatrix<Real> p = CMatrix<Real>::Zero(d, d);
            for (auto i : g) {
                const auto& v = pairs[i].vector.amplitudes();
                p += v * v.adjoint();
            }
            out.projectors.push_back(std::move(p));
        }
    }
    return out;
}

/// <psi|A|psi>
template <typename Real>
Real expectation(const StateVectorT<Real>& psi, const OperatorT<Real>& a) {
    detail::require_hermitian(a, "expectation");
    if (psi.dim() != a.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    return psi.amplitudes().dot(a.matrix() * psi.amplitudes()).real() / psi.amplitudes().squaredNorm();
}

namespace detail {

// <psi|P|psi> / <psi|psi>; dividing by the computed norm keeps e.g. the
// sigma_3 probabilities of (1,1)/sqrt(2) at exactly 1/2.
template <typename Real>
Real branch_probability(const CVector<Real>& psi, const CMatrix<Real>& projector) {
    const Real p = psi.dot(projector * psi).real() / psi.squaredNorm();
    return std::clamp(p, Real(0), Real(1));
}

template <typename Real>
std::size_t find_outcome(const SpectralDecompositionT<Real>& sd, Real eigenvalue) {
    const Real tol = grouping_tol(sd.values);
    for (std::size_t i = 0; i < sd.size(); ++i)
        if (std::abs(sd.values[i] - eigenvalue) <= tol) return i;
    throw std::invalid_argument("eigenvalue " + std::to_string(static_cast<double>(eigenvalue)) +
                                " is not in the spectrum of the observable");
}

template <typename Real>
StateVectorT<Real> project(const CVector<Real>& psi, const CMatrix<Real>& projector) {
    return StateVectorT<Real>::normalized(projector * psi);
}

}  // namespace detail

template <typename Real>
std::vector<OutcomeProbabilityT<Real>> born_probabilities(const StateVectorT<Real>& psi,
                                                          const SpectralDecompositionT<Real>& sd) {
    std::vector<OutcomeProbabilityT<Real>> out;
    for (std::size_t i = 0; i < sd.size(); ++i) {
        if (sd.projectors[i].rows() != psi.dim()) throw std::invalid_argument("born_probabilities: dimension mismatch");
        out.push_back({sd.values[i], detail::branch_probability(psi.amplitudes(), sd.projectors[i])});
    }
    return out;
}

/// Outcome probabilities |<phi_a|psi>|^2 summed over each eigenspace,
/// eigenvalues descending.
template <typename Real>
std::vector<OutcomeProbabilityT<Real>> born_probabilities(const StateVectorT<Real>& psi, const OperatorT<Real>& a) {
    return born_probabilities(psi, spectral_decomposition(a));
}

template <typename Real>
StateVectorT<Real> collapse(const StateVectorT<Real>& psi, const SpectralDecompositionT<Real>& sd, Real eigenvalue) {
    const std::size_t k = detail::find_outcome(sd, eigenvalue);
    if (sd.projectors[k].rows() != psi.dim()) throw std::invalid_argument("collapse: dimension mismatch");
    if (detail::branch_probability(psi.amplitudes(), sd.projectors[k]) < Real(kImpossibleProbability))
        throw ImpossibleOutcome("collapse: outcome " + std::to_string(static_cast<double>(eigenvalue)) +
                                " has zero probability in this state");
    return detail::project(psi.amplitudes(), sd.projectors[k]);
}

/// Renormalized projection of psi onto the eigenspace of `eigenvalue`.
template <typename Real>
StateVectorT<Real> collapse(const StateVectorT<Real>& psi, const OperatorT<Real>& a, Real eigenvalue) {
    return collapse(psi, spectral_decomposition(a), eigenvalue);
}

/// Probability of observing the listed outcomes in order, collapsing after
/// each step. An impossible intermediate outcome yields 0.
template <typename Real>
Real chain_probability(const StateVectorT<Real>& psi0, std::span<const MeasurementStepT<Real>> steps) {
    CVector<Real> psi = psi0.amplitudes();
    Real total = 1;
    for (const auto& step : steps) {
        const auto sd = spectral_decomposition(step.observable);
        const std::size_t k = detail::find_outcome(sd, step.eigenvalue);
        if (sd.projectors[k].rows() != psi.size()) throw std::invalid_argument("chain_probability: dimension mismatch");
        const Real p = detail::branch_probability(psi, sd.projectors[k]);
        if (p < Real(kImpossibleProbability)) return 0;
        total *= p;
        psi = detail::project(psi, sd.projectors[k]).amplitudes();
    }
    return total;
}

template <typename Real>
Real chain_probability(const StateVectorT<Real>& psi0, const std::vector<MeasurementStepT<Real>>& steps) {
    return chain_probability(psi0, std::span<const MeasurementStepT<Real>>(steps));
}

// ---------------------------------------------------------------------------
// Monte Carlo realization of measurement chains
// ---------------------------------------------------------------------------

namespace detail {

template <typename Real>
MeasurementRecordT<Real> sample_chain(const StateVectorT<Real>& psi0,
                                      std::span<const SpectralDecompositionT<Real>> sds, std::uint64_t seed,
                                      std::uint64_t run) {
    StreamRng rng(seed, run);
    MeasurementRecordT<Real> rec;
    rec.seed = seed;
    rec.run = run;
    StateVectorT<Real> psi = psi0;
    for (const auto& sd : sds) {
        const auto probs = born_probabilities(psi, sd);
        const Real u = static_cast<Real>(rng.uniform());
        Real cumulative = 0;
        std::size_t pick = probs.size();
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (probs[i].probability < Real(kImpossibleProbability)) continue;
            pick = i;
            cumulative += probs[i].probability;
            if (u < cumulative) break;
        }
        rec.probability *= probs[pick].probability;
        psi = detail::project(psi.amplitudes(), sd.projectors[pick]);
        rec.outcomes.push_back({sd.values[pick], psi});
    }
    return rec;
}

}  // namespace detail

/// One seeded realization of measuring `ops` in sequence. Run `run` of seed
/// `seed` is reproducible on its own; distinct runs use independent
/// substreams.
template <typename Real>
MeasurementRecordT<Real> simulate_sequence(const StateVectorT<Real>& psi0, const std::vector<OperatorT<Real>>& ops,
                                           std::uint64_t seed, std::uint64_t run = 0) {
    std::vector<SpectralDecompositionT<Real>> sds;
    for (const auto& op : ops) {
        if (op.dim() != psi0.dim()) throw std::invalid_argument("simulate_sequence: dimension mismatch");
        sds.push_back(spectral_decomposition(op));
    }
    return detail::sample_chain<Real>(psi0, sds, seed, run);
}

/// Counts of each outcome chain over `runs` seeded realizations. The result
/// does not depend on `threads`.
template <typename Real>
std::map<std::vector<Real>, std::size_t> tally_sequences(const StateVectorT<Real>& psi0,
                                                         const std::vector<OperatorT<Real>>& ops, std::uint64_t seed,
                                                         std::size_t runs, unsigned threads = 1) {
    std::vector<SpectralDecompositionT<Real>> sds;
    for (const auto& op : ops) {
        if (op.dim() != psi0.dim()) throw std::invalid_argument("tally_sequences: dimension mismatch");
        sds.push_back(spectral_decomposition(op));
    }
    std::vector<std::vector<Real>> chains(runs);
    parallel_for(runs, threads, [&](std::size_t r) {
        chains[r] = detail::sample_chain<Real>(psi0, sds, seed, r).eigenvalues();
    });
    std::map<std::vector<Real>, std::size_t> counts;
    for (const auto& c : chains) ++counts[c];
    return counts;
}

// ---------------------------------------------------------------------------
// Named states
// ---------------------------------------------------------------------------

template <typename Real = double>
StateVectorT<Real> spin_up() { return StateVectorT<Real>::basis(2, 0); }
template <typename Real = double>
StateVectorT<Real> spin_down() { return StateVectorT<Real>::basis(2, 1); }

/// sigma_1 eigenstates (|up> +- |down>)/sqrt(2).
template <typename Real = double>
StateVectorT<Real> spin_up_1() { return eigenbasis(pauli<Real>(1))[0].vector; }
template <typename Real = double>
StateVectorT<Real> spin_down_1() { return eigenbasis(pauli<Real>(1))[1].vector; }

/// sigma_2 eigenstates (|up> +- i|down>)/sqrt(2).
template <typename Real = double>
StateVectorT<Real> spin_up_2() { return eigenbasis(pauli<Real>(2))[0].vector; }
template <typename Real = double>
StateVectorT<Real> spin_down_2() { return eigenbasis(pauli<Real>(2))[1].vector; }

/// (|up,down> + |down,up>)/sqrt(2), basis order (uu, ud, du, dd).
template <typename Real = double>
StateVectorT<Real> epr_state() {
    CVector<Real> v = CVector<Real>::Zero(4);
    v(1) = v(2) = 1;
    return StateVectorT<Real>::normalized(v);
}

/// (|down,down> + |up,down> + |down,up>)/sqrt(3).
template <typename Real = double>
StateVectorT<Real> hardy_state() {
    CVector<Real> v = CVector<Real>::Zero(4);
    v(1) = v(2) = v(3) = 1;
    return StateVectorT<Real>::normalized(v);
}

/// Amplitude for both particles to be found in |down_1>, and its square.
template <typename Real = double>
HardyWitnessT<Real> hardy_witness() {
    const auto both_down1 = tensor(spin_down_1<Real>(), spin_down_1<Real>());
    const auto amp = both_down1.inner(hardy_state<Real>());
    return {amp, std::norm(amp)};
}

// ---------------------------------------------------------------------------
// Measurement apparatus and the time-operator obstruction
// ---------------------------------------------------------------------------

/// Entangles psi with a pointer: sum_a c_a |psi_a>|phi_a>, where |psi_a> are
/// normalized eigenspace projections of psi for observable A (eigenvalues
/// descending) and |phi_a> is pointer basis vector a. The pointer register
/// needs at least one state per distinct eigenvalue.
template <typename Real>
StateVectorT<Real> premeasurement(const StateVectorT<Real>& psi, const OperatorT<Real>& a,
                                  Eigen::Index pointer_dim) {
    if (psi.dim() != a.dim()) throw std::invalid_argument("premeasurement: dimension mismatch");
    const auto sd = spectral_decomposition(a);
    if (pointer_dim < static_cast<Eigen::Index>(sd.size()))
        throw std::invalid_argument("premeasurement: pointer_dim " + std::to_string(pointer_dim) +
                                    " is smaller than the number of distinct outcomes " +
                                    std::to_string(sd.size()));
    CVector<Real> total = CVector<Real>::Zero(psi.dim() * pointer_dim);
    for (std::size_t k = 0; k < sd.size(); ++k) {
        CVector<Real> pointer = CVector<Real>::Zero(pointer_dim);
        pointer(static_cast<Eigen::Index>(k)) = 1;
        const CVector<Real> branch = sd.projectors[k] * psi.amplitudes();
        total += Eigen::kroneckerProduct(branch, pointer).eval();
    }
    return StateVectorT<Real>::normalized(total);
}

/// Traces of both sides of [T, H] = -i hbar 1 in dimension d.
template <typename Real>
TraceObstructionT<Real> pauli_theorem_obstruction(const OperatorT<Real>& t, const OperatorT<Real>& h, Real hbar) {
    if (t.dim() != h.dim()) throw std::invalid_argument("pauli_theorem_obstruction: dimension mismatch");
    const std::complex<Real> lhs = commutator(t, h).matrix().trace();
    const std::complex<Real> rhs(Real(0), -hbar * static_cast<Real>(t.dim()));
    return {lhs, rhs};
}

// ---------------------------------------------------------------------------

using StateVector = StateVectorT<double>;
using OperatorMatrix = OperatorT<double>;
using Eigenpair = EigenpairT<double>;
using SpectralDecomposition = SpectralDecompositionT<double>;
using OutcomeProbability = OutcomeProbabilityT<double>;
using MeasurementStep = MeasurementStepT<double>;
using MeasurementOutcome = MeasurementOutcomeT<double>;
using MeasurementRecord = MeasurementRecordT<double>;
using HardyWitness = HardyWitnessT<double>;
using TraceObstruction = TraceObstructionT<double>;

}  // namespace qfl
