#pragma once

// Schwarzschild black-hole geometry and thermodynamics in natural units
// (hbar = c = k_B = 1, G explicit).

namespace qfl {

/// Every symbol of dM = T dS + Omega dJ + Phi dQ has a field; only the
/// nonrotating, uncharged case is implemented, so J, Q, Omega and Phi must be 0.
struct BlackHoleParams {
    double M = 1;
    double G = 1;
    double J = 0;
    double Q = 0;
    double Omega = 0;
    double Phi = 0;
};

struct SchwarzschildDerived {
    double r_h = 0;    ///< 2 G M
    double A = 0;      ///< 16 pi G^2 M^2
    double kappa = 0;  ///< 1 / (4 G M) = 2 pi T
    double T = 0;      ///< 1 / (8 pi G M)
    double S = 0;      ///< A / (4 G)
};

/// Throws std::invalid_argument for M <= 0 or G <= 0 and Unsupported for any
/// nonzero J, Q, Omega or Phi.
SchwarzschildDerived schwarzschild(const BlackHoleParams& p);

struct FirstLaw {
    double dS_geometric = 0;  ///< S(M + dM) - S(M)
    double dM_over_T = 0;     ///< dM / T(M)
    double residual = 0;      ///< |dS_geometric - dM_over_T| = 4 pi G dM^2
    double dS_dM = 0;         ///< dS_geometric / dM
    bool large_step = false;  ///< dM / M > 0.01
};

/// dS = dM / T with dM / T evaluated at the left end of the step, so the
/// residual is second order in dM.
FirstLaw first_law_check(const BlackHoleParams& p, double dM);

struct AreaTheorem {
    double A_merged = 0;
    double A_sum = 0;
    bool ok = false;  ///< A_merged >= A_sum
};

/// Merger of two holes into one of mass M1 + M2 (nothing radiated).
AreaTheorem area_theorem_check(double M1, double M2, double G);

}  // namespace qfl
