#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qfl/bohmian.hpp"

using namespace qfl;
using C = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

Eigen::VectorXd harmonic(const Grid1D& g, double omega = 1, double m = 1) {
    return (0.5 * m * omega * omega * g.points().array().square()).matrix();
}

double spread(const WaveField& psi) {
    const Eigen::VectorXd rho = psi.density();
    const Eigen::VectorXd x = psi.grid.points();
    const double n = rho.sum();
    const double mean = rho.dot(x) / n;
    return std::sqrt(rho.dot((x.array() - mean).square().matrix()) / n);
}

// Analytic value and derivative of the unnormalized packet pair used by
// two_packet_superposition.
C packet(double x, double x0, double s, double k) {
    return std::exp(C(-(x - x0) * (x - x0) / (4 * s * s), k * x));
}
C packet_dx(double x, double x0, double s, double k) {
    return C(-(x - x0) / (2 * s * s), k) * packet(x, x0, s, k);
}

double sup_relative_error(const Eigen::VectorXd& got, const Eigen::VectorXd& want, const Mask& where) {
    double err = 0, scale = 0;
    for (Eigen::Index i = 0; i < got.size(); ++i) {
        if (!where(i)) continue;
        err = std::max(err, std::abs(got(i) - want(i)));
        scale = std::max(scale, std::abs(want(i)));
    }
    return err / scale;
}

}  // namespace

TEST_CASE("grid geometry") {
    const Grid1D p(0, 1, 16, Boundary::periodic);
    const Grid1D h(0, 1, 16, Boundary::hard_wall);
    CHECK(p.dx() == doctest::Approx(1.0 / 16));
    CHECK(h.dx() == doctest::Approx(1.0 / 15));
    CHECK(h.x(15) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Grid1D(0, 1, 15, Boundary::periodic), std::invalid_argument);
    CHECK_THROWS_AS(Grid1D(1, 0, 64, Boundary::periodic), std::invalid_argument);
}

TEST_CASE("norm is conserved over ten thousand steps") {
    const Grid1D g(-20, 20, 1024, Boundary::hard_wall);
    const auto psi = gaussian_packet(g, -2, 1, 1);
    const auto out = evolve(psi, Eigen::VectorXd::Zero(g.size()), 1e-3, 10000);
    CHECK(std::abs(out.norm() - 1.0) < 1e-8);
    CHECK(out.t == doctest::Approx(10.0));

    const Grid1D ring(-10, 10, 512, Boundary::periodic);
    const auto moving = evolve(gaussian_packet(ring, 0, 1, 3), harmonic(ring, 0.3), 2e-3, 5000);
    CHECK(std::abs(moving.norm() - 1.0) < 1e-8);
}

TEST_CASE("zero steps is the identity") {
    const Grid1D g(-5, 5, 64, Boundary::hard_wall);
    const auto psi = gaussian_packet(g, 0, 1, 0.5);
    const auto out = evolve(psi, harmonic(g), 0.01, 0);
    CHECK(out.values == psi.values);
    CHECK(out.t == psi.t);
}

TEST_CASE("evolve validates its inputs") {
    const Grid1D g(-5, 5, 64, Boundary::hard_wall);
    const auto psi = gaussian_packet(g, 0, 1, 0);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(64);
    v(3) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(evolve(psi, v, 0.01, 3), std::invalid_argument);
    CHECK_THROWS_AS(evolve(psi, Eigen::VectorXd::Zero(64), -0.01, 3), std::invalid_argument);
    CHECK(exceeds_step_hint(g, 1.0, 1, 1));
    CHECK_FALSE(exceeds_step_hint(g, 1e-3, 1, 1));
}

TEST_CASE("harmonic ground state returns after one period") {
    const Grid1D g(-10, 10, 512, Boundary::hard_wall);
    const auto psi = gaussian_packet(g, 0, std::sqrt(0.5), 0);
    const int steps = 4000;
    const auto out = evolve(psi, harmonic(g), 2 * pi / steps, steps);
    const double diff = (out.values.cwiseAbs() - psi.values.cwiseAbs()).cwiseAbs().maxCoeff();
    CHECK(diff < 1e-3);
}

TEST_CASE("free packet width follows the spreading law") {
    const Grid1D g(-40, 40, 2048, Boundary::hard_wall);
    const double sigma = 1, t = 4;
    const auto out = evolve(gaussian_packet(g, 0, sigma, 1), Eigen::VectorXd::Zero(g.size()), 1e-3, 4000);
    const double expected = sigma * std::sqrt(1 + std::pow(t / (2 * sigma * sigma), 2));
    CHECK(std::abs(spread(out) / expected - 1) < 0.01);
}

TEST_CASE("spacetime norm grows linearly with the window") {
    const Grid1D g(-20, 20, 256, Boundary::hard_wall);
    const auto hist = evolve_history(gaussian_packet(g, 0, 1, 1), Eigen::VectorXd::Zero(g.size()), 0.01, 300);
    for (std::size_t w : {100u, 200u, 300u}) {
        const double integral = spacetime_norm(std::span(hist).first(w + 1));
        CHECK(integral == doctest::Approx(0.01 * static_cast<double>(w)).epsilon(1e-8));
    }
}

TEST_CASE("madelung of a plane wave") {
    const Grid1D g(-pi, pi, 128, Boundary::periodic);
    const double p = 3;
    const auto pair = madelung(plane_wave(g, p));
    CHECK(pair.defined.all());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        CHECK(pair.rho(i) == doctest::Approx(1 / g.length()).epsilon(1e-12));
        CHECK(pair.S(i) - pair.S(0) == doctest::Approx(p * (g.x(i) - g.x(0))).epsilon(1e-10));
    }
}

TEST_CASE("madelung and synthesize round trip") {
    const Grid1D g(-15, 15, 1024, Boundary::hard_wall);
    const auto psi = evolve(two_packet_superposition(g, 6, 0.8, 3), Eigen::VectorXd::Zero(g.size()), 2e-3, 500);
    const auto pair = madelung(psi);
    const auto back = synthesize(pair, g, psi.mass, psi.hbar, psi.t);
    double err = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (pair.defined(i)) err = std::max(err, std::abs(back.values(i) - psi.values(i)));
    CHECK(err < 1e-10);
    CHECK(back.t == psi.t);

    Eigen::VectorXd bump = (-(g.points().array().square()) * 20).exp().matrix();
    const auto real = synthesize(bump, Eigen::VectorXd::Zero(g.size()), g, 1, 1);
    CHECK(real.values.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK(real.values.real().minCoeff() >= 0.0);

    bump(5) = -1e-3;
    CHECK_THROWS_AS(synthesize(bump, Eigen::VectorXd::Zero(g.size()), g, 1, 1), std::invalid_argument);
}

TEST_CASE("quantum potential of a gaussian") {
    const Grid1D g(-10, 10, 1024, Boundary::hard_wall);
    for (double sigma : {0.7, 1.0, 1.5}) {
        const auto q = quantum_potential(gaussian_packet(g, 0, sigma, 2));
        Eigen::VectorXd exact(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const double x = g.x(i);
            exact(i) = 0.5 * (1 / (2 * sigma * sigma) - x * x / (4 * std::pow(sigma, 4)));
        }
        CHECK(sup_relative_error(q.Q, exact, q.defined) < 1e-3);
        CHECK_FALSE(q.defined(0));
        CHECK_FALSE(q.defined(g.size() - 1));
        for (Eigen::Index i = 0; i < g.size(); ++i)
            if (!q.defined(i)) CHECK(std::isnan(q.Q(i)));
    }
}

TEST_CASE("quantum potential of a plane wave vanishes") {
    const Grid1D g(0, 10, 256, Boundary::periodic);
    const auto q = quantum_potential(plane_wave(g, 2 * pi * 4 / g.length()));
    CHECK(q.defined.all());
    CHECK(q.Q.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("quantum potential is blind to density scale and scales as hbar squared") {
    const Grid1D g(-8, 8, 512, Boundary::hard_wall);
    const auto psi = two_packet_superposition(g, 4, 1, 0);
    const auto q = quantum_potential(psi);

    WaveField scaled = psi;
    scaled.values *= 3.0;
    const auto qs = quantum_potential(scaled);
    CHECK((qs.defined == q.defined).all());
    for (Eigen::Index i = 0; i < g.size(); ++i)
        if (q.defined(i)) CHECK(qs.Q(i) == doctest::Approx(q.Q(i)).epsilon(1e-12));

    for (double h : {0.1, 0.01}) {
        WaveField small = psi;
        small.hbar = h;
        const auto qh = quantum_potential(small);
        for (Eigen::Index i = 0; i < g.size(); ++i)
            if (q.defined(i)) CHECK(qh.Q(i) == doctest::Approx(h * h * q.Q(i)).epsilon(1e-12));
    }
}

TEST_CASE("velocity of plane waves and real fields") {
    const Grid1D g(-pi, pi, 512, Boundary::periodic);
    CHECK_THROWS_AS(plane_wave(g, 1.5), std::invalid_argument);
    for (double p : {-2.0, 1.0, 4.0}) {
        const auto v = velocity_field(plane_wave(g, p, 2.0));
        CHECK((v.v.array() - p / 2.0).abs().maxCoeff() < 1e-10);
        CHECK_FALSE(v.clamped.any());
    }
    const Grid1D h(-10, 10, 256, Boundary::hard_wall);
    const auto real = velocity_field(gaussian_packet(h, 1, 1.2, 0));
    CHECK(real.v.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("velocity matches the analytic phase gradient") {
    const Grid1D g(-15, 15, 1500, Boundary::hard_wall);
    const double d = 6, s = 0.8, k = 2;
    const auto psi = two_packet_superposition(g, d, s, k);
    const auto v = velocity_field(psi);
    const Eigen::VectorXd rho = psi.density();
    double err = 0, scale = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (rho(i) <= 1e-6) continue;
        const double x = g.x(i);
        const C f = packet(x, -d / 2, s, k) + packet(x, d / 2, s, -k);
        const C df = packet_dx(x, -d / 2, s, k) + packet_dx(x, d / 2, s, -k);
        const double exact = std::imag(std::conj(f) * df) / std::norm(f);
        err = std::max(err, std::abs(v.v(i) - exact));
        scale = std::max(scale, std::abs(exact));
    }
    CHECK(err / scale < 1e-6);
}

TEST_CASE("velocity is clamped at nodes") {
    const Grid1D g(-10, 10, 256, Boundary::hard_wall);
    Eigen::VectorXcd vals(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        vals(i) = std::exp(C(-x * x, 40 * x));
    }
    WaveField psi(vals, g, 1, 1);
    psi.normalize();
    const auto v = velocity_field(psi);
    CHECK(v.clamped.any());
    CHECK(v.v_max == doctest::Approx(10 / g.dx()));
    CHECK(v.v.cwiseAbs().maxCoeff() <= v.v_max);
}

TEST_CASE("plane wave trajectories move uniformly") {
    const Grid1D g(-pi, pi, 256, Boundary::periodic);
    const double p = 2;
    const auto psi = plane_wave(g, p);
    const auto hist = evolve_history(psi, Eigen::VectorXd::Zero(g.size()), 0.01, 100, 5);
    const std::vector<double> x0{0.0};
    const auto tr = propagate_trajectories(hist, x0);
    REQUIRE(tr.size() == 1);
    CHECK_FALSE(tr[0].truncated);
    REQUIRE(tr[0].x.size() == hist.size());
    for (std::size_t k = 0; k < hist.size(); ++k) CHECK(std::abs(tr[0].x[k] - p * tr[0].t[k]) < 1e-6);
}

TEST_CASE("stationary real state holds trajectories still") {
    const Grid1D g(-8, 8, 256, Boundary::hard_wall);
    const auto ground = gaussian_packet(g, 0, std::sqrt(0.5), 0);
    std::vector<WaveField> hist;
    for (int k = 0; k <= 20; ++k) {
        WaveField w = ground;
        w.t = 0.1 * k;
        w.values *= std::exp(C(0, -0.5 * w.t));
        hist.push_back(w);
    }
    const std::vector<double> x0{-1.0, 0.0, 0.3, 1.7};
    const auto tr = propagate_trajectories(hist, x0, 4);
    for (std::size_t j = 0; j < x0.size(); ++j)
        for (double x : tr[j].x) CHECK(std::abs(x - x0[j]) < 1e-12);

    const std::vector<double> outside{9.0};
    CHECK_THROWS_AS(propagate_trajectories(hist, outside), std::invalid_argument);
}

TEST_CASE("trajectories leaving a hard wall are truncated") {
    const Grid1D g(-5, 5, 256, Boundary::hard_wall);
    Eigen::VectorXcd wave(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) wave(i) = std::exp(C(0, 5 * g.x(i)));
    std::vector<WaveField> hist;
    for (int k = 0; k <= 10; ++k) hist.emplace_back(wave, g, 1, 1, 0.05 * k);
    const std::vector<double> x0{3.0, -4.0};
    const auto tr = propagate_trajectories(hist, x0);
    CHECK(tr[0].truncated);
    CHECK_FALSE(tr[1].truncated);
    for (double x : tr[0].x) CHECK(std::abs(x) <= 5.0);
    CHECK(tr[0].x.size() < hist.size());
    CHECK(positions_at(tr, 10).size() == 1);
}

TEST_CASE("interference ensemble stays ordered and equivariant") {
    const Grid1D g(-20, 20, 1024, Boundary::hard_wall);
    const auto psi = two_packet_superposition(g, 6, 0.7, 3);
    const auto hist = evolve_history(psi, Eigen::VectorXd::Zero(g.size()), 2e-3, 1000, 2);
    auto x0 = sample_positions(psi, 2000, 7);
    std::sort(x0.begin(), x0.end());
    CHECK(equivariance_test(x0, psi) < 0.04);

    const auto tr = propagate_trajectories(hist, x0, 1, 4);
    for (const auto& t : tr) REQUIRE_FALSE(t.truncated);
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const auto xs = positions_at(tr, k);
        CHECK(std::is_sorted(xs.begin(), xs.end()));
    }
    CHECK(equivariance_test(positions_at(tr, hist.size() - 1), hist.back()) < 0.05);
}

TEST_CASE("ensembles are reproducible and thread-count independent") {
    const Grid1D g(-10, 10, 256, Boundary::hard_wall);
    const auto psi = gaussian_packet(g, 0, 1, 1);
    CHECK(sample_positions(psi, 100, 3) == sample_positions(psi, 100, 3));
    CHECK(sample_positions(psi, 100, 3) != sample_positions(psi, 100, 4));
    const auto hist = evolve_history(psi, Eigen::VectorXd::Zero(g.size()), 0.01, 50, 5);
    const auto x0 = sample_positions(psi, 64, 3);
    const auto a = propagate_trajectories(hist, x0, 2, 1);
    const auto b = propagate_trajectories(hist, x0, 2, 8);
    for (std::size_t j = 0; j < a.size(); ++j) CHECK(a[j].x == b[j].x);
}

TEST_CASE("equivariance test edge cases") {
    const Grid1D g(-10, 10, 256, Boundary::hard_wall);
    const auto psi = gaussian_packet(g, 0, 1, 0);
    const std::vector<double> one{0.0};
    const double d = equivariance_test(one, psi);
    CHECK(d == doctest::Approx(0.5).epsilon(1e-3));
    const std::vector<double> far{-9.99};
    CHECK(equivariance_test(far, psi) <= 1.0);
    CHECK_THROWS_AS(equivariance_test(std::vector<double>{}, psi), std::invalid_argument);
}

TEST_CASE("classical ensemble satisfies both residual routes") {
    const Grid1D g(-5, 5, 10001, Boundary::hard_wall);
    const double p = 1, m = 1, hbar = 1, sigma = 0.7, dt = 1e-3, t = 0.5;
    auto slice = [&](double time) {
        Eigen::VectorXd rho(g.size()), S(g.size());
        for (Eigen::Index i = 0; i < g.size(); ++i) {
            const double x = g.x(i) - p / m * time;
            rho(i) = std::exp(-x * x / (2 * sigma * sigma)) / std::sqrt(2 * pi * sigma * sigma);
            S(i) = p * g.x(i) - p * p / (2 * m) * time;
        }
        return std::pair{rho, S};
    };
    const Eigen::VectorXd V = Eigen::VectorXd::Zero(g.size());
    std::vector<MadelungPair> pairs;
    std::vector<WaveField> waves;
    for (double time : {t - dt, t, t + dt}) {
        const auto [rho, S] = slice(time);
        waves.push_back(synthesize(rho, S, g, m, hbar, time));
        pairs.push_back(madelung(waves.back()));
    }
    const auto direct = classical_residual(pairs[0], pairs[1], pairs[2], V, g, dt, hbar, m);
    const auto viaw = wave_equation_residual(waves[0], waves[1], waves[2], V);
    double hj = 0, cont = 0, hj_gap = 0, cont_gap = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (!direct.defined(i) || !viaw.defined(i)) continue;
        hj = std::max(hj, std::abs(direct.hamilton_jacobi(i)));
        cont = std::max(cont, std::abs(direct.continuity(i)));
        hj_gap = std::max(hj_gap, std::abs(direct.hamilton_jacobi(i) - viaw.hamilton_jacobi(i)));
        cont_gap = std::max(cont_gap, std::abs(direct.continuity(i) - viaw.continuity(i)));
    }
    CHECK(hj < 1e-6);
    CHECK(cont < 1e-6);
    CHECK(hj_gap < 1e-6);
    CHECK(cont_gap < 1e-6);
}

TEST_CASE("static solution has zero residual") {
    const Grid1D g(0, 1, 64, Boundary::periodic);
    const double E = 2.5, dt = 0.01;
    const Eigen::VectorXd rho = Eigen::VectorXd::Ones(g.size());
    const Eigen::VectorXd V = Eigen::VectorXd::Constant(g.size(), E);
    std::vector<MadelungPair> pairs;
    for (int k = 0; k < 3; ++k)
        pairs.push_back({rho, Eigen::VectorXd::Constant(g.size(), -E * dt * k), Mask::Constant(g.size(), true)});
    const auto r = classical_residual(pairs[0], pairs[1], pairs[2], V, g, dt, 1, 1);
    CHECK(r.defined.all());
    CHECK(r.hamilton_jacobi.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(r.continuity.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("quantum evolution leaves minus Q in the classical equation") {
    const Grid1D g(-10, 10, 4096, Boundary::hard_wall);
    const double dt = 1e-3;
    const auto V = harmonic(g, 0.5);
    const auto hist = evolve_history(gaussian_packet(g, -1, 0.8, 1), V, dt, 502);
    const auto& before = hist[500];
    const auto& at = hist[501];
    const auto& after = hist[502];
    const auto r = classical_residual(madelung(before), madelung(at), madelung(after), V, g, dt, 1, 1);
    const auto q = quantum_potential(at);
    const Eigen::VectorXd rho = at.density();
    double err = 0;
    int used = 0;
    for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (rho(i) < 1e-3 * rho.maxCoeff() || !r.defined(i)) continue;
        err = std::max(err, std::abs(r.hamilton_jacobi(i) + q.Q(i)));
        ++used;
    }
    CHECK(used > 100);
    CHECK(err < 1e-4);
}

TEST_CASE("quantum Newton residual") {
    SUBCASE("free plane wave") {
        const Grid1D g(-pi, pi, 256, Boundary::periodic);
        const auto hist = evolve_history(plane_wave(g, 2), Eigen::VectorXd::Zero(g.size()), 0.01, 50);
        const std::vector<double> x0{0.2};
        const auto tr = propagate_trajectories(hist, x0);
        std::vector<Eigen::VectorXd> qs;
        for (const auto& w : hist) qs.push_back(quantum_potential(w).Q);
        CHECK(quantum_newton_residual(tr[0], qs, Eigen::VectorXd::Zero(g.size()), g, 1) < 1e-8);
    }
    SUBCASE("stationary force balance") {
        const Grid1D g(-8, 8, 512, Boundary::hard_wall);
        const auto V = harmonic(g);
        const auto hist = evolve_history(gaussian_packet(g, 0, std::sqrt(0.5), 0), V, 0.01, 100, 10);
        const std::vector<double> x0{-1.0, 0.5, 1.5};
        const auto tr = propagate_trajectories(hist, x0, 4);
        std::vector<Eigen::VectorXd> qs;
        for (const auto& w : hist) qs.push_back(quantum_potential(w).Q);
        for (const auto& t : tr) CHECK(quantum_newton_residual(t, qs, V, g, 1) < 1e-3);
    }
    SUBCASE("refinement shrinks the residual") {
        auto residual = [](Eigen::Index n, double dt) {
            const Grid1D g(-12, 12, n, Boundary::hard_wall);
            const auto V = harmonic(g, 0.5);
            const int steps = static_cast<int>(std::lround(1.0 / dt));
            const auto hist = evolve_history(gaussian_packet(g, 0, 1, 1), V, dt, steps);
            const std::vector<double> x0{0.4};
            const auto tr = propagate_trajectories(hist, x0);
            std::vector<Eigen::VectorXd> qs;
            for (const auto& w : hist) qs.push_back(quantum_potential(w).Q);
            return quantum_newton_residual(tr[0], qs, V, g, 1);
        };
        const double coarse = residual(256, 0.02);
        const double fine = residual(512, 0.01);
        const double finer = residual(1024, 0.005);
        // second order: the stepper, stencils and interpolation all are
        CHECK(coarse / fine > 3.5);
        CHECK(fine / finer > 3.5);
    }
}

TEST_CASE("two-particle quantum potential") {
    const Grid1D g(-8, 8, 128, Boundary::hard_wall);
    const auto a = gaussian_packet(g, -2, 1, 0);
    const auto b = gaussian_packet(g, 2, 1, 0);

    const auto prod = quantum_potential_2(product_state(a, b));
    CHECK(prod.separability_defect < 1e-8);

    const auto ent = quantum_potential_2(symmetrized_state(a, b));
    CHECK(ent.separability_defect > 0.1);

    const Grid1D ring(0, 1, 64, Boundary::periodic);
    const auto flat = quantum_potential_2(product_state(plane_wave(ring, 0), plane_wave(ring, 0)));
    CHECK(flat.defined.all());
    CHECK(flat.Q.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(flat.separability_defect < 1e-10);
}

TEST_CASE("two-particle Q of a product is the sum of one-particle Q") {
    const Grid1D g(-8, 8, 96, Boundary::hard_wall);
    const auto a = gaussian_packet(g, -1, 0.9, 0);
    const auto b = gaussian_packet(g, 1.5, 1.3, 0);
    const auto q2 = quantum_potential_2(product_state(a, b));
    const auto qa = quantum_potential(a);
    const auto qb = quantum_potential(b);
    for (Eigen::Index i = 20; i < 76; i += 5)
        for (Eigen::Index j = 20; j < 76; j += 5)
            if (q2.defined(i, j)) CHECK(q2.Q(i, j) == doctest::Approx(qa.Q(i) + qb.Q(j)).epsilon(1e-9));
}

TEST_CASE("two-particle fields are validated") {
    const Grid1D big(0, 1, 300, Boundary::periodic);
    CHECK_THROWS_AS(TwoParticleField(Eigen::MatrixXcd::Ones(300, 300), big, 1, 1), std::invalid_argument);
    const Grid1D g(0, 1, 32, Boundary::periodic);
    CHECK_THROWS_AS(TwoParticleField(Eigen::MatrixXcd::Ones(32, 32) * 2.0, g, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(TwoParticleField(Eigen::MatrixXcd::Ones(32, 31), g, 1, 1), std::invalid_argument);
}
