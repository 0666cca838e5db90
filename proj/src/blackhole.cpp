#include "qfl/blackhole.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qfl/errors.hpp"

namespace qfl {

namespace {

constexpr double kPi = std::numbers::pi;

void check_consistency(const BlackHoleParams& p, const SchwarzschildDerived& d) {
    const double s_closed = 4 * kPi * p.G * p.M * p.M;
    if (std::abs(d.S - s_closed) > 1e-12 * s_closed || std::abs(d.T * d.S - p.M / 2) > 1e-12 * p.M)
        throw ContractViolation("schwarzschild: derived quantities are inconsistent");
}

}  // namespace

SchwarzschildDerived schwarzschild(const BlackHoleParams& p) {
    if (!(p.M > 0) || !std::isfinite(p.M)) throw std::invalid_argument("schwarzschild: M must be positive");
    if (!(p.G > 0) || !std::isfinite(p.G)) throw std::invalid_argument("schwarzschild: G must be positive");
    if (p.J != 0 || p.Q != 0 || p.Omega != 0 || p.Phi != 0)
        throw Unsupported("schwarzschild: rotating or charged holes are out of scope (J, Q, Omega, Phi must be 0)");

    SchwarzschildDerived d;
    d.r_h = 2 * p.G * p.M;
    d.A = 4 * kPi * d.r_h * d.r_h;
    d.kappa = 1 / (4 * p.G * p.M);
    d.T = d.kappa / (2 * kPi);
    d.S = d.A / (4 * p.G);
    check_consistency(p, d);
    return d;
}

FirstLaw first_law_check(const BlackHoleParams& p, double dM) {
    if (!(dM > 0)) throw std::invalid_argument("first_law_check: dM must be positive");
    const auto before = schwarzschild(p);
    BlackHoleParams q = p;
    q.M += dM;
    const auto after = schwarzschild(q);

    FirstLaw out;
    out.dS_geometric = after.S - before.S;
    out.dM_over_T = dM / before.T;
    out.residual = std::abs(out.dS_geometric - out.dM_over_T);
    out.dS_dM = out.dS_geometric / dM;
    out.large_step = dM / p.M > 0.01;
    return out;
}

AreaTheorem area_theorem_check(double M1, double M2, double G) {
    const auto a1 = schwarzschild({M1, G});
    const auto a2 = schwarzschild({M2, G});
    const auto merged = schwarzschild({M1 + M2, G});
    AreaTheorem out;
    out.A_merged = merged.A;
    out.A_sum = a1.A + a2.A;
    out.ok = out.A_merged >= out.A_sum;
    return out;
}

}  // namespace qfl
