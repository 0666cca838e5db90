#pragma once

// Bogoliubov maps between Klein–Gordon mode bases, particle creation by a
// sudden mass quench, and the Unruh and Hawking thermal spectra.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfl/relativistic.hpp"

namespace qfl {

/// Positive-frequency modes f_k of one box, labelled by integers.
struct ModeBasis {
    std::string name;
    double L = 0;
    std::vector<int> labels;
    std::vector<KGField> modes;

    std::size_t size() const noexcept { return modes.size(); }
};

/// Plane-wave basis c_k u_{+,n_k} of mass m. `phases` (unit or not) multiply
/// the modes; empty means all ones.
ModeBasis plane_wave_basis(std::string name, double L, double m, std::vector<int> ns,
                           std::vector<std::complex<double>> phases = {});

/// Throws ContractViolation naming the first pair that breaks
/// (f_i, f_j) = delta_ij, (f_i*, f_j*) = -delta_ij or (f_i, f_j*) = 0 at time t.
void check_orthonormal(const ModeBasis& basis, double t = 0, double tol = 1e-10);

/// alpha(l, k) = (fbar_l, f_k) and conj(beta(l, k)) = (fbar_l, f_k*) with fbar
/// the out basis, so that abar_l = sum_k alpha_lk a_k + beta*_lk a_k^dagger.
/// Inner products are taken at time t, the moment of the basis change.
struct BogoliubovMap {
    Eigen::MatrixXcd alpha;
    Eigen::MatrixXcd beta;
    ModeBasis in_basis;
    ModeBasis out_basis;

    /// max |sum_k (alpha_lk alpha*_l'k - beta*_lk beta_l'k) - delta_ll'|
    double normalization_residual() const;
    /// In-modes in terms of out-modes: (f, f*) = T (fbar, fbar*).
    Eigen::MatrixXcd transfer_matrix() const;
};

BogoliubovMap bogoliubov_from_bases(const ModeBasis& in, const ModeBasis& out, double t = 0, unsigned threads = 1);

/// <0| Nbar_l |0> = sum_k |beta_lk|^2.
double vacuum_occupation(const BogoliubovMap& map, std::size_t l);

/// Transformed number operator abar^dagger abar for a single mode,
/// abar = alpha a + beta* a^dagger, on a Fock space of `truncation` states;
/// returns its vacuum expectation.
double operator_vacuum_occupation(std::complex<double> alpha, std::complex<double> beta, int truncation = 64);

/// Instantaneous change of mass from m_in to m_out at t = 0 in a box of
/// length L. Modes n and -n are both kept for every listed n.
struct QuenchModel {
    double m_in = 1;
    double m_out = 2;
    double L = 1;
    std::vector<int> ns{0};
};

struct QuenchMode {
    int n = 0;
    double omega_in = 0;
    double omega_out = 0;
    std::complex<double> alpha;  ///< alpha_{n, n}
    std::complex<double> beta;   ///< beta_{-n, n}, the only nonzero entry of column n
    double n_created = 0;        ///< <0_in| Nbar_n |0_in>
};

struct QuenchResult {
    BogoliubovMap map;
    std::vector<QuenchMode> modes;  ///< one per listed n, in the given order
};

QuenchResult sudden_quench(const QuenchModel& q, unsigned threads = 1);

// ---------------------------------------------------------------------------
// Thermal spectra (hbar = c = k_B = 1)
// ---------------------------------------------------------------------------

struct ThermalSpectrumPoint {
    double omega = 0;
    double occupation = 0;
    double temperature = 0;
};

/// 1 / (e^{omega/T} - 1).
double bose_einstein(double omega, double T);

/// T = a / 2 pi.
double unruh_temperature(double a);
/// 1 / (e^{2 pi omega / a} - 1), evaluated as bose_einstein(omega, a / 2 pi).
double unruh_spectrum(double omega, double a);

/// T = 1 / (8 pi G M).
double hawking_temperature(double M, double G);
/// 1 / (e^{8 pi G M omega} - 1), evaluated as bose_einstein at the Hawking temperature.
double hawking_spectrum(double omega, double M, double G);

std::vector<ThermalSpectrumPoint> unruh_table(double a, const std::vector<double>& omegas);
std::vector<ThermalSpectrumPoint> hawking_table(double M, double G, const std::vector<double>& omegas);

/// Least-squares line through (omega, log(1 + 1/occupation)). For a thermal
/// spectrum the slope is 1/T and the intercept 0.
struct ThermalFit {
    double slope = 0;
    double intercept = 0;
    double temperature = 0;
    double residual = 0;  ///< max |fit - data|
};

ThermalFit thermality_fit(const std::vector<ThermalSpectrumPoint>& points);

}  // namespace qfl
