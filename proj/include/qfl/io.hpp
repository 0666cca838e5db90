#pragma once

// File formats: the Klein–Gordon field spec (JSON), CSV tables for snapshots,
// trajectories, current scans and thermal spectra, and JSON reports.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qfl/blackhole.hpp"
#include "qfl/bogoliubov.hpp"
#include "qfl/bohmian.hpp"
#include "qfl/relativistic.hpp"

namespace qfl {

using Json = nlohmann::json;

/// {L, m, terms: [{n, sign, re, im}]} with sign "+"/"-" or +1/-1.
KGField kg_field_from_json(const Json& j);
Json kg_field_to_json(const KGField& field);
KGField read_kg_field(const std::filesystem::path& path);

struct CsvTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Shortest decimal form that reads back to the same double.
std::string format_number(double v);

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// Pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const Json& j);

/// t, x, re_psi, im_psi, rho, S, Q, v for every snapshot.
CsvTable snapshot_table(std::span<const WaveField> snapshots);
/// traj_id, t, x for every `stride`-th trajectory.
CsvTable trajectory_table(std::span<const Trajectory> trajectories, std::size_t stride = 1);
/// t, x, j0, j1.
CsvTable current_table(std::span<const CurrentSample> samples);
/// omega, occupation, temperature.
CsvTable spectrum_table(std::span<const ThermalSpectrumPoint> points);

Json complex_json(std::complex<double> z);
/// {dim, omega, potential, eigenvalues[], n_commutator_norm}
Json spectrum_report(Eigen::Index dim, double omega, const std::string& potential, const std::vector<double>& eigenvalues,
                     double n_commutator_norm);
/// {m_in, m_out, L, modes: [{n, omega_in, omega_out, alpha, beta, n_created}]}
Json quench_report(const QuenchModel& q, const QuenchResult& r);
/// {M, G, r_h, A, kappa, T, S, first_law_residual}
Json blackhole_report(const BlackHoleParams& p, const SchwarzschildDerived& d, double first_law_residual);

}  // namespace qfl
