#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "qfl/spin.hpp"

using namespace qfl;
using C = std::complex<double>;

namespace {

const C I(0, 1);

OperatorMatrix op2(C a, C b, C c, C d) {
    CMatrix<double> m(2, 2);
    m << a, b, c, d;
    return OperatorMatrix(m);
}

CMatrix<double> random_complex(std::mt19937_64& rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    CMatrix<double> m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = C(g(rng), g(rng));
    return m;
}

OperatorMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index d) {
    const CMatrix<double> m = random_complex(rng, d);
    return OperatorMatrix((m + m.adjoint()) / 2.0);
}

CMatrix<double> random_unitary(std::mt19937_64& rng, Eigen::Index d) {
    Eigen::HouseholderQR<CMatrix<double>> qr(random_complex(rng, d));
    return qr.householderQ() * CMatrix<double>::Identity(d, d);
}

StateVector random_state(std::mt19937_64& rng, Eigen::Index d) {
    std::normal_distribution<double> g;
    CVector<double> v(d);
    for (Eigen::Index i = 0; i < d; ++i) v(i) = C(g(rng), g(rng));
    return StateVector::normalized(v);
}

int levi_civita(int i, int j, int k) {
    return (i - j) * (j - k) * (k - i) / 2;
}

}  // namespace

TEST_CASE("pauli matrices") {
    CHECK(pauli(3) == op2(1, 0, 0, -1));
    CHECK(pauli(1).is_hermitian());
    CHECK(pauli(2).is_hermitian());
    CHECK(pauli(2) * pauli(2) == OperatorMatrix::identity(2));
    for (int i = 1; i <= 3; ++i) {
        CHECK(pauli(i) * pauli(i) == OperatorMatrix::identity(2));
        const auto ev = eigenvalues(pauli(i));
        CHECK(ev[0] == 1.0);
        CHECK(ev[1] == -1.0);
    }
    CHECK_THROWS_AS(pauli(0), std::invalid_argument);
    CHECK_THROWS_AS(pauli(4), std::invalid_argument);
}

TEST_CASE("pauli algebra holds without rounding") {
    for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) {
            CMatrix<double> expected_comm = CMatrix<double>::Zero(2, 2);
            for (int k = 1; k <= 3; ++k) expected_comm += 2.0 * I * double(levi_civita(i, j, k)) * pauli(k).matrix();
            CHECK(commutator(pauli(i), pauli(j)).matrix() == expected_comm);

            const CMatrix<double> expected_anti =
                (i == j ? 2.0 : 0.0) * CMatrix<double>::Identity(2, 2);
            CHECK(anticommutator(pauli(i), pauli(j)).matrix() == expected_anti);
        }
    }
}

TEST_CASE("commutator examples") {
    CHECK(commutator(pauli(1), pauli(2)) == 2.0 * I * pauli(3));
    const auto a = op2(1, C(2, 1), C(2, -1), -3);
    CHECK(commutator(a, a) == OperatorMatrix::zero(2));
    // direct multiplication: s1 s2 = [[i,0],[0,-i]], s2 s1 = [[-i,0],[0,i]]
    const auto s1s2 = op2(I, 0, 0, -I);
    const auto s2s1 = op2(-I, 0, 0, I);
    CHECK(pauli(1) * pauli(2) == s1s2);
    CHECK(pauli(2) * pauli(1) == s2s1);
    CHECK(anticommutator(pauli(1), pauli(2)) == OperatorMatrix::zero(2));
    CHECK_THROWS_AS(commutator(pauli(1), OperatorMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("eigenbasis follows the phase convention") {
    const double r = 1.0 / std::sqrt(2.0);
    auto s1 = eigenbasis(pauli(1));
    REQUIRE(s1.size() == 2);
    CHECK(s1[0].value == 1.0);
    CHECK(std::abs(s1[0].vector[0] - C(r)) < 1e-15);
    CHECK(std::abs(s1[0].vector[1] - C(r)) < 1e-15);
    CHECK(s1[1].value == -1.0);
    CHECK(std::abs(s1[1].vector[1] + C(r)) < 1e-15);

    auto s2 = eigenbasis(pauli(2));
    CHECK(std::abs(s2[0].vector[0] - C(r)) < 1e-15);
    CHECK(std::abs(s2[0].vector[1] - I * r) < 1e-15);
    CHECK(std::abs(s2[1].vector[1] + I * r) < 1e-15);

    auto id = eigenbasis(OperatorMatrix::identity(2));
    CHECK(id[0].value == 1.0);
    CHECK(id[1].value == 1.0);

    CHECK_THROWS_AS(eigenbasis(op2(0, 1, 0, 0)), ContractViolation);
}

TEST_CASE("eigenbasis of larger hermitian matrices is orthonormal and sorted") {
    std::mt19937_64 rng(7);
    for (int d : {3, 5, 8}) {
        const auto a = random_hermitian(rng, d);
        const auto pairs = eigenbasis(a);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (i > 0) CHECK(pairs[i - 1].value >= pairs[i].value);
            const auto& v = pairs[i].vector.amplitudes();
            CHECK((a.matrix() * v - pairs[i].value * v).norm() < 1e-10);
            for (std::size_t j = 0; j < pairs.size(); ++j) {
                const C ip = pairs[i].vector.inner(pairs[j].vector);
                CHECK(std::abs(ip - C(i == j ? 1.0 : 0.0)) < 1e-10);
            }
            // first nonzero component real positive
            for (Eigen::Index k = 0; k < v.size(); ++k) {
                if (std::abs(v(k)) > 1e-10) {
                    CHECK(v(k).real() > 0);
                    CHECK(std::abs(v(k).imag()) < 1e-15);
                    break;
                }
            }
        }
    }
}

TEST_CASE("expectation values") {
    CHECK(expectation(spin_up(), pauli(3)) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(expectation(spin_up_1(), pauli(3))) < 1e-15);
    // quadratic form of (1,0) against [[0,1],[1,0]] is the (0,0) entry
    CHECK(expectation(spin_up(), pauli(1)) == 0.0);
    CHECK_THROWS_AS(expectation(spin_up(), OperatorMatrix::identity(3)), std::invalid_argument);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto a = random_hermitian(rng, 4);
        const auto psi = random_state(rng, 4);
        const auto ev = eigenvalues(a);
        const double e = expectation(psi, a);
        CHECK(e <= ev.front() + 1e-10);
        CHECK(e >= ev.back() - 1e-10);
    }
}

TEST_CASE("born probabilities") {
    auto p = born_probabilities(spin_up_1(), pauli(3));
    REQUIRE(p.size() == 2);
    CHECK(p[0].eigenvalue == 1.0);
    CHECK(p[0].probability == 0.5);
    CHECK(p[1].probability == 0.5);

    p = born_probabilities(spin_up_1(), pauli(1));
    CHECK(p[0].probability == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p[1].probability < 1e-15);

    p = born_probabilities(spin_up(), pauli(3));
    CHECK(p[0].probability == 1.0);
    CHECK(p[1].probability == 0.0);
}

TEST_CASE("born probabilities merge degenerate eigenvalues") {
    const auto zz = tensor(pauli(3), pauli(3));
    const auto p = born_probabilities(epr_state(), zz);
    REQUIRE(p.size() == 2);
    CHECK(p[0].eigenvalue == doctest::Approx(1.0));
    CHECK(p[0].probability < 1e-15);
    CHECK(p[1].eigenvalue == doctest::Approx(-1.0));
    CHECK(p[1].probability == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("born probabilities are a distribution") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const int d = 2 + t % 6;
        const auto probs = born_probabilities(random_state(rng, d), random_hermitian(rng, d));
        double sum = 0;
        for (const auto& o : probs) {
            CHECK(o.probability >= 0.0);
            CHECK(o.probability <= 1.0);
            sum += o.probability;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("unitary invariance of spectra and probabilities") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 40; ++t) {
        const int d = 2 + t % 5;
        const auto a = random_hermitian(rng, d);
        const auto psi = random_state(rng, d);
        const CMatrix<double> u = random_unitary(rng, d);
        const OperatorMatrix ua(u * a.matrix() * u.adjoint());
        const auto upsi = StateVector::normalized(u * psi.amplitudes());

        const auto ev = eigenvalues(a);
        const auto uev = eigenvalues(ua);
        for (std::size_t i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] - uev[i]) < 1e-10);

        const auto p = born_probabilities(psi, a);
        const auto up = born_probabilities(upsi, ua);
        REQUIRE(p.size() == up.size());
        for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(p[i].probability - up[i].probability) < 1e-10);
    }
}

TEST_CASE("collapse") {
    CHECK(collapse(spin_up_1(), pauli(3), 1.0) == spin_up());
    const auto once = collapse(spin_up(), pauli(3), 1.0);
    CHECK(once == spin_up());
    CHECK(collapse(once, pauli(3), 1.0) == once);
    CHECK_THROWS_AS(collapse(spin_up(), pauli(3), -1.0), ImpossibleOutcome);
    CHECK_THROWS_AS(collapse(spin_up(), pauli(3), 0.5), std::invalid_argument);
}

TEST_CASE("collapse is idempotent") {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 30; ++t) {
        const auto a = random_hermitian(rng, 4);
        const auto psi = random_state(rng, 4);
        const double lambda = eigenvalues(a)[t % 4];
        const auto once = collapse(psi, a, lambda);
        const auto twice = collapse(once, a, lambda);
        CHECK((once.amplitudes() - twice.amplitudes()).norm() < 1e-10);
    }
}

TEST_CASE("measurement on the EPR state") {
    const auto z1 = tensor(pauli(3), OperatorMatrix::identity(2));
    const auto post = collapse(epr_state(), z1, 1.0);
    // remaining state is |up>|down>, so particle two is down
    CHECK(std::abs(post.inner(tensor(spin_up(), spin_down())) - 1.0) < 1e-15);
    const auto z2 = tensor(OperatorMatrix::identity(2), pauli(3));
    CHECK(born_probabilities(post, z2)[1].probability == doctest::Approx(1.0));
}

TEST_CASE("chain probability") {
    const std::vector<MeasurementStep> contextual{{pauli(3), 1.0}, {pauli(1), -1.0}};
    CHECK(chain_probability(spin_up_1(), contextual) == 0.25);

    CHECK(chain_probability(spin_up(), std::vector<MeasurementStep>{{pauli(3), 1.0}}) == 1.0);

    // enumerated tree from |up>: sigma_1 gives +-1 with 1/2 each, then sigma_3
    // on |up_1> gives +-1 with 1/2 each
    double tree[2][2];
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) tree[a][b] = 0.5 * 0.5;
    CHECK(chain_probability(spin_up(), std::vector<MeasurementStep>{{pauli(1), 1.0}, {pauli(3), -1.0}}) ==
          doctest::Approx(tree[0][1]).epsilon(1e-15));

    // impossible intermediate outcome
    CHECK(chain_probability(spin_up(), std::vector<MeasurementStep>{{pauli(3), -1.0}, {pauli(1), 1.0}}) == 0.0);
}

TEST_CASE("chain probability factorizes along the collapse chain") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 40; ++t) {
        const auto psi = random_state(rng, 3);
        std::vector<MeasurementStep> steps;
        for (int s = 0; s < 4; ++s) {
            auto a = random_hermitian(rng, 3);
            const double lambda = eigenvalues(a)[(t + s) % 3];
            steps.push_back({std::move(a), lambda});
        }
        const std::vector<MeasurementStep> head(steps.begin(), steps.begin() + 2);
        const std::vector<MeasurementStep> tail(steps.begin() + 2, steps.end());
        StateVector mid = psi;
        for (const auto& s : head) mid = collapse(mid, s.observable, s.eigenvalue);
        const double whole = chain_probability(psi, steps);
        CHECK(std::abs(whole - chain_probability(psi, head) * chain_probability(mid, tail)) < 1e-12);
    }
}

TEST_CASE("simulate_sequence") {
    const std::vector<OperatorMatrix> ops{pauli(3), pauli(1)};
    const auto a = simulate_sequence(spin_up_1(), ops, 42, 3);
    const auto b = simulate_sequence(spin_up_1(), ops, 42, 3);
    REQUIRE(a.outcomes.size() == 2);
    CHECK(a.eigenvalues() == b.eigenvalues());
    CHECK(a.outcomes[1].post_state == b.outcomes[1].post_state);
    CHECK(a.probability == b.probability);
    CHECK(a.probability == 0.25);

    for (std::uint64_t r = 0; r < 20; ++r) {
        const auto rec = simulate_sequence(spin_up(), std::vector<OperatorMatrix>{pauli(3)}, 9, r);
        CHECK(rec.outcomes[0].eigenvalue == 1.0);
        CHECK(rec.probability == 1.0);
    }
}

TEST_CASE("Monte Carlo chain frequency converges to the Born product") {
    const std::vector<OperatorMatrix> ops{pauli(3), pauli(1)};
    const std::size_t runs = 100000;
    const auto counts = tally_sequences(spin_up_1(), ops, 2024, runs);
    const double freq = double(counts.at({1.0, -1.0})) / double(runs);
    const double sigma = std::sqrt(0.25 * 0.75 / double(runs));
    CHECK(std::abs(freq - 0.25) < 3 * sigma);

    std::size_t total = 0;
    for (const auto& [k, n] : counts) total += n;
    CHECK(total == runs);

    // worker count does not change the realization
    CHECK(tally_sequences(spin_up_1(), ops, 2024, 5000, 1) == tally_sequences(spin_up_1(), ops, 2024, 5000, 3));
}

TEST_CASE("tensor products") {
    const auto ud = tensor(spin_up(), spin_down());
    CHECK(ud.amplitudes() == (CVector<double>(4) << 0, 1, 0, 0).finished());

    const auto id = OperatorMatrix::identity(2);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            CHECK(commutator(tensor(pauli(i), id), tensor(id, pauli(j))) == OperatorMatrix::zero(4));

    // sigma_3 x sigma_3 = diag(1, -1, -1, 1)
    const auto zz = tensor(pauli(3), pauli(3));
    CMatrix<double> diag = CMatrix<double>::Zero(4, 4);
    diag.diagonal() << 1, -1, -1, 1;
    CHECK(zz.matrix() == diag);
    const auto ev = eigenvalues(zz);
    CHECK(ev == std::vector<double>{1, 1, -1, -1});
}

TEST_CASE("EPR and Hardy states") {
    CHECK(std::abs(epr_state().amplitudes().squaredNorm() - 1.0) < 1e-15);
    const auto h = hardy_state();
    CHECK(std::abs(h.inner(h) - 1.0) < 1e-15);

    // second form: (sqrt(2)|down>|up_1> + |up>|down>)/sqrt(3)
    CHECK(std::abs(tensor(spin_down(), spin_up_1()).inner(h) - std::sqrt(2.0 / 3.0)) < 1e-15);
    CHECK(std::abs(tensor(spin_up(), spin_down()).inner(h) - 1.0 / std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(tensor(spin_down(), spin_down_1()).inner(h)) < 1e-15);
    CHECK(std::abs(tensor(spin_up(), spin_up()).inner(h)) < 1e-15);
    // third form: (sqrt(2)|up_1>|down> + |down>|up>)/sqrt(3)
    CHECK(std::abs(tensor(spin_up_1(), spin_down()).inner(h) - std::sqrt(2.0 / 3.0)) < 1e-15);
    CHECK(std::abs(tensor(spin_down(), spin_up()).inner(h) - 1.0 / std::sqrt(3.0)) < 1e-15);
    CHECK(std::abs(tensor(spin_down_1(), spin_down()).inner(h)) < 1e-15);
}

TEST_CASE("Hardy claims as zero amplitudes") {
    const auto h = hardy_state();
    // (i) never both up
    CHECK(std::abs(tensor(spin_up(), spin_up()).inner(h)) == 0.0);
    // (ii) first down => second up_1
    const auto first_down = collapse(h, tensor(pauli(3), OperatorMatrix::identity(2)), -1.0);
    CHECK(std::abs(tensor(spin_down(), spin_down_1()).inner(first_down)) < 1e-15);
    // (iii) second down => first up_1
    const auto second_down = collapse(h, tensor(OperatorMatrix::identity(2), pauli(3)), -1.0);
    CHECK(std::abs(tensor(spin_down_1(), spin_down()).inner(second_down)) < 1e-15);
    // <down_1|up_1> = 0
    CHECK(std::abs(spin_down_1().inner(spin_up_1())) == 0.0);
}

TEST_CASE("Hardy witness") {
    const auto w = hardy_witness();
    CHECK(std::abs(w.amplitude - C(-1.0 / (2.0 * std::sqrt(3.0)))) < 1e-12);
    CHECK(std::abs(w.probability - 1.0 / 12.0) < 1e-12);
}

TEST_CASE("premeasurement") {
    const auto psi = spin_up_1();
    const auto total = premeasurement(psi, pauli(3), 2);
    CVector<double> expected = CVector<double>::Zero(4);
    expected(0) = expected(3) = 1.0 / std::sqrt(2.0);  // |up>|phi_1> + |down>|phi_2>
    CHECK((total.amplitudes() - expected).norm() < 1e-15);

    // product state when only one branch is present
    const auto single = premeasurement(spin_up(), pauli(3), 3);
    CHECK(std::abs(single.inner(tensor(spin_up(), StateVector::basis(3, 0))) - 1.0) < 1e-15);

    // pointer marginal by partial trace over the system factor
    const auto pointer_marginal = [](const StateVector& s, Eigen::Index dsys, Eigen::Index dptr) {
        std::vector<double> p(static_cast<std::size_t>(dptr), 0.0);
        for (Eigen::Index a = 0; a < dsys; ++a)
            for (Eigen::Index b = 0; b < dptr; ++b) p[static_cast<std::size_t>(b)] += std::norm(s[a * dptr + b]);
        return p;
    };
    const auto marg = pointer_marginal(total, 2, 2);
    CHECK(marg[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(marg[1] == doctest::Approx(0.5).epsilon(1e-15));

    std::mt19937_64 rng(23);
    const auto a = random_hermitian(rng, 3);
    const auto phi = random_state(rng, 3);
    const auto probs = born_probabilities(phi, a);
    const auto m = pointer_marginal(premeasurement(phi, a, 5), 3, 5);
    for (std::size_t k = 0; k < probs.size(); ++k) CHECK(std::abs(m[k] - probs[k].probability) < 1e-10);

    CHECK_THROWS_AS(premeasurement(psi, pauli(3), 1), std::invalid_argument);
}

TEST_CASE("trace obstruction to a time operator") {
    const auto ob = pauli_theorem_obstruction(pauli(1), pauli(3), 1.0);
    CHECK(ob.trace_lhs == C(0, 0));
    CHECK(ob.trace_rhs == C(0, -2));
    CHECK(ob.certifies());

    std::mt19937_64 rng(29);
    const auto t = random_hermitian(rng, 8);
    const auto h = random_hermitian(rng, 8);
    const auto ob8 = pauli_theorem_obstruction(t, h, 0.7);
    CHECK(std::abs(ob8.trace_lhs) < 1e-10);
    CHECK(std::abs(ob8.trace_rhs - C(0, -8 * 0.7)) < 1e-15);
}

TEST_CASE("no 2x2 hermitian T solves [T, sigma_3] = -i") {
    // brute force over T = t0 + t1 s1 + t2 s2 + t3 s3
    const auto h = pauli(3);
    const CMatrix<double> target = C(0, 1) * CMatrix<double>::Identity(2, 2);
    double best = 1e300;
    const int n = 9;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    const auto x = [&](int k) { return -2.0 + 4.0 * k / (n - 1); };
                    const CMatrix<double> t = x(a) * CMatrix<double>::Identity(2, 2) + x(b) * pauli(1).matrix() +
                                              x(c) * pauli(2).matrix() + x(d) * pauli(3).matrix();
                    const CMatrix<double> comm = t * h.matrix() - h.matrix() * t;
                    best = std::min(best, (comm + target).norm());
                }
    CHECK(best > 0.0);
    // a traceless commutator stays at least |tr(i 1)|/sqrt(d) = sqrt(2) away
    CHECK(best >= std::sqrt(2.0) - 1e-12);
}
