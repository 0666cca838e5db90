#include "qfl/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <numbers>

#include "qfl/blackhole.hpp"
#include "qfl/bogoliubov.hpp"
#include "qfl/bohmian.hpp"
#include "qfl/errors.hpp"
#include "qfl/fock.hpp"
#include "qfl/parallel.hpp"
#include "qfl/random.hpp"
#include "qfl/relativistic.hpp"
#include "qfl/spin.hpp"

namespace qfl {

namespace {

using cd = std::complex<double>;
constexpr double kPi = std::numbers::pi;

using K = ParamKind;

const std::vector<ScenarioInfo> kScenarios = {
    {"hardy", "Hardy-state amplitude for both particles in the sigma_1 down state", {}},
    {"sequential",
     "sigma_3 then sigma_1 on the sigma_1 up state: exact chain probability and seeded Monte Carlo",
     {{"runs", K::count, "100000", "Monte Carlo realizations"}}},
    {"epr",
     "sigma_3 on each particle of (|ud> + |du>)/sqrt(2): perfect anticorrelation",
     {{"runs", K::count, "10000", "Monte Carlo realizations"}}},
    {"pauli-obstruction",
     "Pauli algebra and the trace obstruction to [T, H] = -i hbar in finite dimensions",
     {{"pairs", K::count, "100", "random hermitian (T, H) pairs"},
      {"dim_min", K::count, "2", "smallest dimension"},
      {"dim_max", K::count, "16", "largest dimension"},
      {"hbar", K::positive, "1", "Planck constant"}}},
    {"double-slit",
     "two-packet interference: Crank-Nicolson evolution and a Bohmian ensemble",
     {{"points", K::count, "1024", "grid points"},
      {"x_min", K::real, "-20", "left wall"},
      {"x_max", K::real, "20", "right wall"},
      {"separation", K::positive, "6", "packet separation"},
      {"sigma", K::positive, "0.7", "packet width"},
      {"k0", K::real, "3", "packet wavenumber"},
      {"mass", K::positive, "1", "particle mass"},
      {"hbar", K::positive, "1", "Planck constant"},
      {"dt", K::positive, "0.002", "time step"},
      {"steps", K::count, "1000", "time steps"},
      {"stride", K::count, "2", "steps between stored snapshots"},
      {"trajectories", K::count, "2000", "ensemble size"},
      {"substeps", K::count, "1", "minimum integration steps per snapshot interval"},
      {"csv_every", K::count, "20", "write every n-th trajectory to CSV"},
      {"norm_steps", K::count, "10000", "steps of the long norm-drift run"},
      {"norm_dt", K::positive, "0.001", "time step of the norm-drift run"}}},
    {"quantum-potential",
     "Q for a Gaussian density against its closed form, and for a plane wave",
     {{"points", K::count, "1024", "grid points for the Gaussian"},
      {"half_width", K::positive, "10", "Gaussian grid spans [-half_width, half_width]"},
      {"sigma", K::positive, "1", "Gaussian width"},
      {"k0", K::real, "2", "Gaussian wavenumber"},
      {"mass", K::positive, "1", "particle mass"},
      {"hbar", K::positive, "1", "Planck constant"},
      {"plane_points", K::count, "256", "periodic grid points for the plane wave"},
      {"plane_length", K::positive, "10", "periodic box length"},
      {"plane_mode", K::count, "4", "plane-wave lattice index, p = 2 pi hbar n / L"}}},
    {"nonlocal-q",
     "two-particle Q: additive for a product state, not for a symmetrized one",
     {{"points", K::count, "128", "grid points per particle"},
      {"half_width", K::positive, "8", "grid spans [-half_width, half_width]"},
      {"offset", K::positive, "2", "packets centred at -offset and +offset"},
      {"sigma", K::positive, "1", "packet width"}}},
    {"kg-negativity",
     "Klein-Gordon current of two positive-frequency modes: negative j0, positive charge",
     {{"L", K::positive, "6.283185307179586", "box length"},
      {"m", K::positive, "1", "mass"},
      {"n1", K::real, "1", "first mode index"},
      {"n2", K::real, "3", "second mode index"},
      {"field", K::text, "", "optional JSON field spec replacing n1, n2, L, m"},
      {"t_max", K::text, "auto", "scan window [0, t_max]; auto is one beat period"},
      {"nt", K::count, "128", "scan points in t"},
      {"nx", K::count, "128", "scan points in x"}}},
    {"dirac-check",
     "Clifford algebra of the Dirac matrices and j0 >= 0 for random spinors",
     {{"spinors", K::count, "10000", "random spinors"}}},
    {"fock-spectrum",
     "truncated Fock-space spectra: harmonic, and a general polynomial potential",
     {{"omega", K::positive, "2", "oscillator frequency of the basis"},
      {"mass", K::positive, "1", "mass"},
      {"harmonic_dim", K::count, "64", "dimension for the harmonic spectrum"},
      {"dim", K::count, "128", "dimension for the general potential (doubled for the stability check)"},
      {"potential", K::text, "2*x^2 + 0.1*x^4", "polynomial V(x)"}}},
    {"quench",
     "sudden mass quench: Bogoliubov coefficients and created particles",
     {{"m_in", K::real, "1", "mass before the quench"},
      {"m_out", K::real, "2", "mass after the quench"},
      {"L", K::positive, "6.283185307179586", "box length"},
      {"n_max", K::real, "8", "modes 0..n_max (and their negatives)"},
      {"truncation", K::count, "64", "Fock truncation for the operator-level check"}}},
    {"unruh",
     "Unruh spectrum at T = a / 2 pi",
     {{"a", K::positive, "1", "proper acceleration"},
      {"omega_min", K::positive, "0.05", "lowest frequency"},
      {"omega_max", K::positive, "2", "highest frequency"},
      {"count", K::count, "20", "number of frequencies"}}},
    {"hawking",
     "Hawking spectrum at T = 1 / 8 pi G M",
     {{"M", K::positive, "1", "black-hole mass"},
      {"G", K::positive, "1", "Newton constant"},
      {"omega_min", K::positive, "0.005", "lowest frequency"},
      {"omega_max", K::positive, "0.2", "highest frequency"},
      {"count", K::count, "20", "number of frequencies"}}},
    {"blackhole",
     "Schwarzschild thermodynamics: derived quantities, first law, area theorem",
     {{"M", K::positive, "1", "black-hole mass"},
      {"G", K::positive, "1", "Newton constant"},
      {"dM", K::positive, "0.0001", "first-law mass step"},
      {"mergers", K::count, "1000", "random mergers for the area theorem"}}},
};

std::string num(double v) { return format_number(v); }

template <typename T>
bool parse_exact(const std::string& s, T& out) {
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc() && ptr == end;
}

void check_kind(const std::string& scenario, const ParamSpec& spec, const std::string& value) {
    auto fail = [&](const char* want) {
        throw UsageError("parameter '" + spec.key + "' of scenario '" + scenario + "' must be " + want + ", got '" +
                         value + "'");
    };
    switch (spec.kind) {
        case K::count: {
            std::int64_t v = 0;
            if (!parse_exact(value, v) || v < 1) fail("an integer >= 1");
            break;
        }
        case K::positive: {
            double v = 0;
            if (!parse_exact(value, v) || !std::isfinite(v) || !(v > 0)) fail("a positive number");
            break;
        }
        case K::real: {
            double v = 0;
            if (!parse_exact(value, v) || !std::isfinite(v)) fail("a finite number");
            break;
        }
        case K::text:
            break;
    }
}

int to_int(std::int64_t v, const char* what) {
    if (v > 100'000'000) throw UsageError(std::string(what) + " is too large");
    return static_cast<int>(v);
}

class Checker {
public:
    explicit Checker(RunReport& r) : r_(r) {}

    void below(std::string name, double v, double bound) {
        add(std::move(name), v < bound, num(v) + " < " + num(bound));
    }
    void above(std::string name, double v, double bound) {
        add(std::move(name), v > bound, num(v) + " > " + num(bound));
    }
    void equals(std::string name, double v, double expected) {
        add(std::move(name), v == expected, num(v) + " == " + num(expected));
    }
    void near(std::string name, double v, double expected, double tol) {
        add(std::move(name), std::abs(v - expected) <= tol,
            "|" + num(v) + " - " + num(expected) + "| <= " + num(tol));
    }
    void holds(std::string name, bool ok, std::string detail) { add(std::move(name), ok, std::move(detail)); }

private:
    void add(std::string name, bool ok, std::string detail) {
        r_.checks.push_back({std::move(name), ok, std::move(detail)});
    }
    RunReport& r_;
};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

// ---------------------------------------------------------------------------

void run_hardy(const ScenarioParams&, std::uint64_t, unsigned, RunReport& r) {
    const auto w = hardy_witness();
    const double expected = -1 / (2 * std::sqrt(3.0));
    r.values["amplitude"] = complex_json(w.amplitude);
    r.values["probability"] = w.probability;
    r.values["expected_amplitude"] = expected;
    r.values["expected_probability"] = 1.0 / 12;

    Checker c(r);
    c.near("amplitude", std::abs(w.amplitude - expected), 0, 1e-12);
    c.near("probability", w.probability, 1.0 / 12, 1e-12);
}

void run_sequential(const ScenarioParams& p, std::uint64_t seed, unsigned threads, RunReport& r) {
    const auto runs = static_cast<std::size_t>(p.integer("runs"));
    const auto psi = spin_up_1();
    const std::vector<MeasurementStep> chain{{pauli(3), 1.0}, {pauli(1), -1.0}};
    const double exact = chain_probability(psi, chain);

    const auto tally = tally_sequences(psi, {pauli(3), pauli(1)}, seed, runs, threads);
    std::size_t hits = 0;
    CsvTable counts{"outcomes", {"sigma3", "sigma1", "count"}, {}};
    for (const auto& [outcome, n] : tally) {
        counts.rows.push_back({outcome[0], outcome[1], static_cast<double>(n)});
        if (outcome[0] == 1.0 && outcome[1] == -1.0) hits = n;
    }
    const double freq = static_cast<double>(hits) / static_cast<double>(runs);
    const double sigma = std::sqrt(0.25 * 0.75 / static_cast<double>(runs));

    r.values["chain_probability"] = exact;
    r.values["monte_carlo_frequency"] = freq;
    r.values["monte_carlo_sigma"] = sigma;
    r.tables.push_back(std::move(counts));

    Checker c(r);
    c.equals("chain_probability", exact, 0.25);
    c.near("monte_carlo_within_3_sigma", freq, 0.25, 3 * sigma);
}

void run_epr(const ScenarioParams& p, std::uint64_t seed, unsigned threads, RunReport& r) {
    const auto runs = static_cast<std::size_t>(p.integer("runs"));
    const auto id = OperatorMatrix::identity(2);
    const auto tally = tally_sequences(epr_state(), {tensor(pauli(3), id), tensor(id, pauli(3))}, seed, runs, threads);

    std::size_t same = 0, up_down = 0;
    CsvTable counts{"outcomes", {"particle1", "particle2", "count"}, {}};
    for (const auto& [outcome, n] : tally) {
        counts.rows.push_back({outcome[0], outcome[1], static_cast<double>(n)});
        if (outcome[0] == outcome[1]) same += n;
        if (outcome[0] == 1.0 && outcome[1] == -1.0) up_down += n;
    }
    const double freq = static_cast<double>(up_down) / static_cast<double>(runs);
    const double sigma = std::sqrt(0.25 / static_cast<double>(runs));

    r.values["equal_outcomes"] = same;
    r.values["up_down_frequency"] = freq;
    r.values["correlation"] = -1.0 + 2.0 * static_cast<double>(same) / static_cast<double>(runs);
    r.tables.push_back(std::move(counts));

    Checker c(r);
    c.equals("no_equal_outcomes", static_cast<double>(same), 0);
    c.near("up_down_within_3_sigma", freq, 0.5, 3 * sigma);
}

void run_pauli_obstruction(const ScenarioParams& p, std::uint64_t seed, unsigned threads, RunReport& r) {
    Checker c(r);

    int commutators_ok = 0, anticommutators_ok = 0;
    const auto id = OperatorMatrix::identity(2);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            auto expected = OperatorMatrix::zero(2);
            if (i != j) {
                const int k = 6 - i - j;
                const double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
                expected = cd(0, 2 * eps) * pauli(k);
            }
            if (commutator(pauli(i), pauli(j)) == expected) ++commutators_ok;
            if (j >= i && anticommutator(pauli(i), pauli(j)) == cd(i == j ? 2.0 : 0.0) * id) ++anticommutators_ok;
        }
    r.values["exact_commutators"] = commutators_ok;
    r.values["exact_anticommutators"] = anticommutators_ok;
    c.equals("pauli_commutators_exact", commutators_ok, 9);
    c.equals("pauli_anticommutators_exact", anticommutators_ok, 6);

    const auto pairs = static_cast<std::size_t>(p.integer("pairs"));
    const auto dmin = p.integer("dim_min"), dmax = p.integer("dim_max");
    if (dmax < dmin) throw UsageError("pauli-obstruction: dim_max < dim_min");
    const double hbar = p.real("hbar");

    struct Row {
        Eigen::Index dim;
        double lhs, rhs;
        bool certifies;
    };
    std::vector<Row> rows(pairs);
    parallel_for(pairs, threads, [&](std::size_t k) {
        StreamRng rng(seed, k);
        const auto d = static_cast<Eigen::Index>(
            dmin + static_cast<std::int64_t>(rng.uniform() * static_cast<double>(dmax - dmin + 1)));
        auto draw = [&] {
            CMatrix<double> m(d, d);
            for (Eigen::Index a = 0; a < d; ++a)
                for (Eigen::Index b = 0; b < d; ++b) {
                    const double re = 2 * rng.uniform() - 1;
                    m(a, b) = cd(re, 2 * rng.uniform() - 1);
                }
            return OperatorMatrix((m + m.adjoint()) / 2.0);
        };
        const auto t = draw();
        const auto h = draw();
        const auto ob = pauli_theorem_obstruction(t, h, hbar);
        rows[k] = {d, std::abs(ob.trace_lhs), std::abs(ob.trace_rhs), ob.certifies()};
    });

    CsvTable table{"pairs", {"pair", "dim", "abs_trace_commutator", "abs_trace_rhs"}, {}};
    double max_lhs = 0;
    std::size_t rhs_exact = 0, certified = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const auto& row = rows[k];
        table.rows.push_back({static_cast<double>(k), static_cast<double>(row.dim), row.lhs, row.rhs});
        max_lhs = std::max(max_lhs, row.lhs);
        if (row.rhs == hbar * static_cast<double>(row.dim)) ++rhs_exact;
        if (row.certifies) ++certified;
    }
    r.values["max_abs_trace_commutator"] = max_lhs;
    r.values["certified_pairs"] = certified;
    r.tables.push_back(std::move(table));

    c.below("trace_commutator_vanishes", max_lhs, 1e-10);
    c.equals("trace_rhs_equals_hbar_dim", static_cast<double>(rhs_exact), static_cast<double>(pairs));
    c.equals("all_pairs_certified", static_cast<double>(certified), static_cast<double>(pairs));
}

void run_double_slit(const ScenarioParams& p, std::uint64_t seed, unsigned threads, RunReport& r) {
    const Grid1D grid(p.real("x_min"), p.real("x_max"), p.integer("points"), Boundary::hard_wall);
    const double mass = p.real("mass"), hbar = p.real("hbar"), dt = p.real("dt");
    const int steps = to_int(p.integer("steps"), "steps");
    const int stride = to_int(p.integer("stride"), "stride");
    const auto psi0 =
        two_packet_superposition(grid, p.real("separation"), p.real("sigma"), p.real("k0"), mass, hbar);
    const Eigen::VectorXd V = Eigen::VectorXd::Zero(grid.size());
    if (exceeds_step_hint(grid, dt, mass, hbar))
        r.notes.push_back("dt " + num(dt) + " exceeds the accuracy hint m dx^2 / hbar = " +
                          num(mass * grid.dx() * grid.dx() / hbar) + "; CN stays unitary");

    const auto hist = evolve_history(psi0, V, dt, steps, stride);
    auto x0 = sample_positions(psi0, static_cast<std::size_t>(p.integer("trajectories")), seed);
    std::sort(x0.begin(), x0.end());
    const double ks_initial = equivariance_test(x0, psi0);
    const auto trajs = propagate_trajectories(hist, x0, to_int(p.integer("substeps"), "substeps"), threads);

    const auto truncated =
        static_cast<double>(std::count_if(trajs.begin(), trajs.end(), [](const Trajectory& t) { return t.truncated; }));
    std::size_t inversions = 0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const auto xs = positions_at(trajs, k);
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (xs[i] < xs[i - 1]) ++inversions;
    }
    const double ks_final = equivariance_test(positions_at(trajs, hist.size() - 1), hist.back());

    const double n0 = psi0.norm();
    const double drift =
        std::abs(evolve(psi0, V, p.real("norm_dt"), to_int(p.integer("norm_steps"), "norm_steps")).norm() - n0);

    r.values["final_time"] = hist.back().t;
    r.values["snapshots"] = hist.size();
    r.values["ks_initial"] = ks_initial;
    r.values["ks_final"] = ks_final;
    r.values["order_inversions"] = inversions;
    r.values["truncated_trajectories"] = truncated;
    r.values["norm_initial"] = n0;
    r.values["norm_final"] = hist.back().norm();
    r.values["norm_drift_long_run"] = drift;

    const std::vector<WaveField> ends{hist.front(), hist.back()};
    r.tables.push_back(snapshot_table(ends));
    r.tables.back().name = "snapshots";
    r.tables.push_back(trajectory_table(trajs, static_cast<std::size_t>(p.integer("csv_every"))));
    r.tables.back().name = "trajectories";

    Checker c(r);
    c.below("norm_drift", drift, 1e-8);
    c.below("equivariance_ks_final", ks_final, 0.05);
    c.equals("no_crossings", static_cast<double>(inversions), 0);
    c.equals("no_truncated_trajectories", truncated, 0);
}

void run_quantum_potential(const ScenarioParams& p, std::uint64_t, unsigned, RunReport& r) {
    const double hw = p.real("half_width"), sigma = p.real("sigma"), mass = p.real("mass"), hbar = p.real("hbar");
    const Grid1D grid(-hw, hw, p.integer("points"), Boundary::hard_wall);
    const auto psi = gaussian_packet(grid, 0, sigma, p.real("k0"), mass, hbar);
    const auto q = quantum_potential(psi);

    double err = 0, scale = 0;
    CsvTable table{"gaussian_q", {"x", "Q", "Q_exact"}, {}};
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        const double exact = hbar * hbar / (2 * mass) * (1 / (2 * sigma * sigma) - x * x / (4 * std::pow(sigma, 4)));
        table.rows.push_back({x, q.Q(i), exact});
        if (!q.defined(i)) continue;
        err = std::max(err, std::abs(q.Q(i) - exact));
        scale = std::max(scale, std::abs(exact));
    }
    const double rel = err / scale;

    const Grid1D ring(0, p.real("plane_length"), p.integer("plane_points"), Boundary::periodic);
    const double momentum = 2 * kPi * hbar * static_cast<double>(p.integer("plane_mode")) / ring.length();
    const auto pq = quantum_potential(plane_wave(ring, momentum, mass, hbar));
    double plane_max = 0;
    for (Eigen::Index i = 0; i < ring.size(); ++i)
        if (pq.defined(i)) plane_max = std::max(plane_max, std::abs(pq.Q(i)));

    r.values["gaussian_sup_relative_error"] = rel;
    r.values["gaussian_defined_points"] = q.defined.count();
    r.values["plane_wave_max_abs_q"] = plane_max;
    r.values["plane_wave_momentum"] = momentum;
    r.tables.push_back(std::move(table));
    r.tables.push_back(snapshot_table(std::vector<WaveField>{psi}));
    r.tables.back().name = "gaussian_snapshot";

    Checker c(r);
    c.below("gaussian_q_closed_form", rel, 1e-3);
    c.below("plane_wave_q_zero", plane_max, 1e-10);
}

void run_nonlocal_q(const ScenarioParams& p, std::uint64_t, unsigned, RunReport& r) {
    const double hw = p.real("half_width"), off = p.real("offset"), sigma = p.real("sigma");
    const Grid1D grid(-hw, hw, p.integer("points"), Boundary::hard_wall);
    const auto a = gaussian_packet(grid, -off, sigma, 0);
    const auto b = gaussian_packet(grid, off, sigma, 0);
    const auto qp = quantum_potential_2(product_state(a, b));
    const auto qs = quantum_potential_2(symmetrized_state(a, b));

    CsvTable table{"q2", {"x1", "x2", "Q_product", "Q_symmetrized"}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < grid.size(); ++i)
        for (Eigen::Index j = 0; j < grid.size(); ++j)
            table.rows.push_back({grid.x(i), grid.x(j), qp.defined(i, j) ? qp.Q(i, j) : nan,
                                  qs.defined(i, j) ? qs.Q(i, j) : nan});

    r.values["product_defect"] = qp.separability_defect;
    r.values["symmetrized_defect"] = qs.separability_defect;
    r.tables.push_back(std::move(table));

    Checker c(r);
    c.below("product_state_separable", qp.separability_defect, 1e-8);
    c.above("symmetrized_state_nonlocal", qs.separability_defect, 0.1);
}

void run_kg_negativity(const ScenarioParams& p, std::uint64_t, unsigned threads, RunReport& r) {
    const bool custom = !p.text("field").empty();
    KGField field(p.real("L"), p.real("m"));
    if (custom) {
        field = read_kg_field(p.text("field"));
    } else {
        const double n1 = p.real("n1"), n2 = p.real("n2");
        if (n1 != std::floor(n1) || n2 != std::floor(n2) || n1 == n2)
            throw UsageError("kg-negativity: n1 and n2 must be distinct integers");
        field.add(static_cast<int>(n1), Frequency::positive, 1).add(static_cast<int>(n2), Frequency::positive, 1);
    }
    const double L = field.L();

    double t_max = 1;
    if (p.text("t_max") == "auto") {
        double lo = INFINITY, hi = 0;
        for (const auto& term : field.terms()) {
            lo = std::min(lo, term.mode.omega);
            hi = std::max(hi, term.mode.omega);
        }
        if (hi > lo) t_max = 2 * kPi / (hi - lo);
    } else {
        t_max = p.real("t_max");
    }
    const int nt = to_int(p.integer("nt"), "nt"), nx = to_int(p.integer("nx"), "nx");

    const auto scan = negativity_scan(field, 0, t_max, nt, nx, 1e-8, threads);
    const double charge = kg_charge(field);

    const std::vector<double> times{0.0, 0.7, 1.9, 3.3, 10.0};
    const cd ref = kg_inner(field, field, times[0]);
    double spread = 0;
    for (double t : times) spread = std::max(spread, std::abs(kg_inner(field, field, t) - ref));

    KGField unit(L, field.mass());
    unit.add(field.terms().front().mode.n, Frequency::positive, 1);
    const cd neg = kg_inner(unit.conjugate(), unit.conjugate(), 0.0);

    r.values["field"] = kg_field_to_json(field);
    r.values["t_max"] = t_max;
    r.values["min_j0"] = scan.min_j0;
    r.values["min_at"] = {{"t", scan.t}, {"x", scan.x}};
    r.values["grid_min_j0"] = scan.grid_min_j0;
    r.values["charge"] = charge;
    r.values["inner_time_spread"] = spread;
    r.values["negative_mode_norm"] = complex_json(neg);
    r.tables.push_back(current_table(sample_current(field, 0, t_max, nt, nx)));
    r.tables.back().name = "current";

    Checker c(r);
    c.below("inner_product_conserved", spread, 1e-10);
    c.near("negative_frequency_norm", std::abs(neg - cd(-1, 0)), 0, 1e-12);
    c.below("min_j0_negative", scan.min_j0, 0);
    c.above("charge_positive", charge, 0);
    if (!custom) {
        const auto& t = field.terms();
        const double w1 = t[0].mode.omega, w2 = t[1].mode.omega;
        const double exact = (2 - (w1 + w2) / std::sqrt(w1 * w2)) / L;
        r.values["min_j0_closed_form"] = exact;
        c.near("min_j0_closed_form", scan.min_j0, exact, 1e-9 * std::abs(exact));
    } else {
        r.notes.push_back("custom field: closed-form minimum not applicable");
    }
}

void run_dirac_check(const ScenarioParams& p, std::uint64_t seed, unsigned threads, RunReport& r) {
    const auto g = dirac_gammas();
    const Eigen::Matrix4cd id = Eigen::Matrix4cd::Identity();
    int exact = 0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = mu; nu < 4; ++nu)
            if (g[mu] * g[nu] + g[nu] * g[mu] == 2 * minkowski(mu, nu) * id) ++exact;

    const auto n = static_cast<std::size_t>(p.integer("spinors"));
    std::vector<std::array<double, 4>> currents(n);
    std::vector<double> bar_diff(n);
    parallel_for(n, threads, [&](std::size_t k) {
        StreamRng rng(seed, k);
        Spinor s;
        for (int a = 0; a < 4; ++a) {
            const double re = 2 * rng.uniform() - 1;
            s(a) = cd(re, 2 * rng.uniform() - 1);
        }
        currents[k] = dirac_current(s, g);
        const cd bar0 = (s.adjoint() * g[0] * g[0] * s).value();
        bar_diff[k] = std::abs(bar0 - currents[k][0]) / currents[k][0];
    });
    std::size_t negative = 0, spacelike = 0;
    double min_j0 = INFINITY, max_bar = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& j = currents[k];
        if (j[0] < 0) ++negative;
        const double flux = std::sqrt(j[1] * j[1] + j[2] * j[2] + j[3] * j[3]);
        if (flux > j[0] * (1 + 1e-12)) ++spacelike;
        min_j0 = std::min(min_j0, j[0]);
        max_bar = std::max(max_bar, bar_diff[k]);
    }

    r.values["exact_anticommutators"] = exact;
    r.values["min_j0"] = min_j0;
    r.values["negative_j0"] = negative;
    r.values["spacelike_currents"] = spacelike;
    r.values["max_relative_psibar_difference"] = max_bar;

    Checker c(r);
    c.equals("clifford_anticommutators_exact", exact, 10);
    c.equals("j0_nonnegative", static_cast<double>(negative), 0);
    c.equals("current_not_spacelike", static_cast<double>(spacelike), 0);
    c.below("j0_matches_psibar_gamma0_psi", max_bar, 1e-12);
}

void run_fock_spectrum(const ScenarioParams& p, std::uint64_t, unsigned, RunReport& r) {
    const double w = p.real("omega"), mass = p.real("mass");
    const auto hdim = p.integer("harmonic_dim");
    const auto dim = p.integer("dim");
    if (hdim < 2 || dim < 2) throw UsageError("fock-spectrum: dimensions must be at least 2");

    Checker c(r);

    const auto harmonic = harmonic_h(ladder(hdim), w);
    std::size_t unequal = 0;
    for (std::size_t i = 1; i < harmonic.size(); ++i)
        if (harmonic[i] - harmonic[i - 1] != w) ++unequal;
    const Polynomial oscillator{{0, 0, mass * w * w / 2}};
    const auto h_general = general_h(ladder(hdim), w, oscillator, mass);
    r.values["harmonic"] = spectrum_report(hdim, w, "harmonic", harmonic, h_general.n_commutator_norm);
    c.equals("harmonic_gaps_equal_omega", static_cast<double>(unequal), 0);
    c.equals("harmonic_commutes_with_N", h_general.n_commutator_norm, 0);

    const auto V = parse_potential(p.text("potential"));
    const auto s1 = general_h(ladder(dim), w, V, mass);
    const auto s2 = general_h(ladder(2 * dim), w, V, mass);
    const auto low = s1.low_third();
    double change = 0;
    std::size_t non_increasing = 0;
    for (std::size_t i = 0; i < low.size(); ++i) {
        change = std::max(change, std::abs(low[i] - s2.eigenvalues[i]));
        if (i >= 2 && !(low[i] - low[i - 1] > low[i - 1] - low[i - 2])) ++non_increasing;
    }
    const bool is_harmonic = V.degree() <= 2 && V.coefficient(1) == 0 && V.coefficient(2) == mass * w * w / 2;

    r.values["general"] = spectrum_report(dim, w, p.text("potential"), s1.eigenvalues, s1.n_commutator_norm);
    r.values["general"]["doubled_dim"] = 2 * dim;
    r.values["general"]["low_third_change"] = change;
    r.values["general"]["is_harmonic"] = is_harmonic;

    CsvTable table{"spectrum", {"n", "harmonic", "general", "general_doubled"}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 0; i < s1.eigenvalues.size(); ++i)
        table.rows.push_back({static_cast<double>(i), i < harmonic.size() ? harmonic[i] : nan, s1.eigenvalues[i],
                              s2.eigenvalues[i]});
    r.tables.push_back(std::move(table));

    c.below("truncation_doubling_stable", change, 1e-6);
    if (is_harmonic) {
        c.equals("commutator_vanishes_iff_harmonic", s1.n_commutator_norm, 0);
    } else {
        c.above("commutator_vanishes_iff_harmonic", s1.n_commutator_norm, 0);
        if (V.degree() == 4 && V.coefficient(4) > 0 && V.coefficient(1) == 0 && V.coefficient(3) == 0)
            c.equals("quartic_gaps_strictly_increasing", static_cast<double>(non_increasing), 0);
    }
}

// Independent value-and-derivative matching of one in-mode to the out-modes.
std::pair<cd, cd> matching_solve(double w_in, double w_out, double L) {
    const cd I(0, 1);
    Eigen::Matrix2cd A;
    const double n_out = 1 / std::sqrt(2 * w_out * L), n_in = 1 / std::sqrt(2 * w_in * L);
    A << n_out, n_out, -I * w_out * n_out, I * w_out * n_out;
    const Eigen::Vector2cd rhs(n_in, -I * w_in * n_in);
    const Eigen::Vector2cd x = A.fullPivLu().solve(rhs);
    return {x(0), x(1)};
}

void run_quench(const ScenarioParams& p, std::uint64_t, unsigned threads, RunReport& r) {
    const double n_max = p.real("n_max");
    if (n_max < 0 || n_max != std::floor(n_max) || n_max > 10000)
        throw UsageError("quench: n_max must be an integer in [0, 10000]");
    QuenchModel q{p.real("m_in"), p.real("m_out"), p.real("L"), {}};
    for (int n = 0; n <= static_cast<int>(n_max); ++n) q.ns.push_back(n);
    const auto res = sudden_quench(q, threads);
    const int trunc = to_int(p.integer("truncation"), "truncation");

    double oracle_err = 0, unit_err = 0, op_err = 0;
    CsvTable table{"modes", {"n", "omega_in", "omega_out", "abs_alpha2", "abs_beta2", "n_created"}, {}};
    for (const auto& m : res.modes) {
        const auto [a, b] = matching_solve(m.omega_in, m.omega_out, q.L);
        oracle_err = std::max({oracle_err, std::abs(std::norm(m.beta) - std::norm(b)),
                               std::abs(std::norm(m.alpha) - std::norm(a))});
        unit_err = std::max(unit_err, std::abs(std::norm(m.alpha) - std::norm(m.beta) - 1));
        op_err = std::max(op_err, std::abs(operator_vacuum_occupation(m.alpha, m.beta, trunc) - m.n_created));
        table.rows.push_back(
            {static_cast<double>(m.n), m.omega_in, m.omega_out, std::norm(m.alpha), std::norm(m.beta), m.n_created});
    }
    const double residual = res.map.normalization_residual();

    r.values["report"] = quench_report(q, res);
    r.values["matching_solve_max_error"] = oracle_err;
    r.values["unitarity_max_error"] = unit_err;
    r.values["operator_level_max_error"] = op_err;
    r.values["normalization_residual"] = residual;
    r.tables.push_back(std::move(table));

    Checker c(r);
    c.below("matches_matching_solve", oracle_err, 1e-10);
    c.below("alpha2_minus_beta2_is_one", unit_err, 1e-12);
    c.below("normalization_residual", residual, 1e-10);
    c.below("operator_level_occupation", op_err, 1e-6);
    if (q.m_in == q.m_out) {
        double max_beta = 0;
        for (const auto& m : res.modes) max_beta = std::max(max_beta, std::abs(m.beta));
        c.equals("no_quench_no_particles", max_beta, 0);
    }
    if (q.m_in == 1 && q.m_out == 2)
        c.near("zero_mode_one_eighth", res.modes.front().n_created, 0.125, 1e-10);
}

void thermal_checks(const std::vector<ThermalSpectrumPoint>& pts, const std::vector<double>& direct, double T,
                    RunReport& r) {
    double identity = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        identity = std::max(identity, std::abs(direct[i] - bose_einstein(pts[i].omega, T)));
    const auto fit = thermality_fit(pts);

    r.values["temperature"] = T;
    r.values["identity_max_error"] = identity;
    r.values["fit"] = {{"slope", fit.slope},
                       {"intercept", fit.intercept},
                       {"temperature", fit.temperature},
                       {"residual", fit.residual}};
    r.tables.push_back(spectrum_table(pts));
    r.tables.back().name = "spectrum";

    Checker c(r);
    c.below("bose_einstein_identity", identity, 1e-12);
    c.below("log_linear_fit_residual", fit.residual, 1e-10);
    c.near("fit_slope_is_inverse_temperature", fit.slope * T, 1, 1e-10);
}

void run_unruh(const ScenarioParams& p, std::uint64_t, unsigned, RunReport& r) {
    const double a = p.real("a");
    const auto omegas = linspace(p.real("omega_min"), p.real("omega_max"), to_int(p.integer("count"), "count"));
    const auto pts = unruh_table(a, omegas);
    std::vector<double> direct;
    for (double w : omegas) direct.push_back(unruh_spectrum(w, a));
    thermal_checks(pts, direct, a / (2 * kPi), r);
}

void run_hawking(const ScenarioParams& p, std::uint64_t, unsigned, RunReport& r) {
    const double M = p.real("M"), G = p.real("G");
    const auto omegas = linspace(p.real("omega_min"), p.real("omega_max"), to_int(p.integer("count"), "count"));
    const auto pts = hawking_table(M, G, omegas);
    std::vector<double> direct;
    for (double w : omegas) direct.push_back(hawking_spectrum(w, M, G));
    const double T = schwarzschild({M, G}).T;
    thermal_checks(pts, direct, T, r);
    Checker(r).near("hawking_temperature_matches_geometry", hawking_temperature(M, G), T, 1e-12 * T);
}

void run_blackhole(const ScenarioParams& p, std::uint64_t seed, unsigned, RunReport& r) {
    const BlackHoleParams bh{p.real("M"), p.real("G")};
    const double M = bh.M, G = bh.G, dM = p.real("dM");
    const auto d = schwarzschild(bh);
    const auto fl = first_law_check(bh, dM);
    const auto half = first_law_check(bh, dM / 2);
    const double ratio = fl.residual / half.residual;
    if (fl.large_step) r.notes.push_back("dM / M > 0.01: first-law step is not small");

    const auto mergers = static_cast<std::size_t>(p.integer("mergers"));
    std::size_t strict = 0;
    double min_gap = INFINITY;
    for (std::size_t k = 0; k < mergers; ++k) {
        StreamRng rng(seed, k);
        const double m1 = M * (1e-3 + 2 * rng.uniform());
        const double m2 = M * (1e-3 + 2 * rng.uniform());
        const auto at = area_theorem_check(m1, m2, G);
        if (at.ok && at.A_merged > at.A_sum) ++strict;
        min_gap = std::min(min_gap, (at.A_merged - at.A_sum) / at.A_sum);
    }

    r.values["report"] = blackhole_report(bh, d, fl.residual);
    r.values["first_law"] = {{"dM", dM},
                             {"dS_geometric", fl.dS_geometric},
                             {"dM_over_T", fl.dM_over_T},
                             {"residual", fl.residual},
                             {"residual_half_step", half.residual},
                             {"refinement_ratio", ratio},
                             {"dS_dM", fl.dS_dM}};
    r.values["mergers"] = {{"count", mergers}, {"strict", strict}, {"min_relative_gain", min_gap}};

    const double tol = 1e-12;
    Checker c(r);
    c.near("r_h", d.r_h, 2 * G * M, tol * 2 * G * M);
    c.near("area", d.A, 16 * kPi * G * G * M * M, tol * 16 * kPi * G * G * M * M);
    c.near("entropy", d.S, 4 * kPi * G * M * M, tol * 4 * kPi * G * M * M);
    c.near("temperature", d.T, 1 / (8 * kPi * G * M), tol / (8 * kPi * G * M));
    c.near("kappa_is_2_pi_T", d.kappa, 2 * kPi * d.T, tol * d.kappa);
    c.near("smarr", 2 * d.T * d.S, M, tol * M);
    c.below("first_law_residual", fl.residual, 1e-6);
    c.near("first_law_second_order", ratio, 4, 0.8);
    c.near("dS_dM_is_inverse_T", fl.dS_dM * d.T, 1, 1e-3);
    c.equals("area_theorem_strict", static_cast<double>(strict), static_cast<double>(mergers));
}

using Runner = void (*)(const ScenarioParams&, std::uint64_t, unsigned, RunReport&);

Runner runner_for(std::string_view name) {
    static const std::map<std::string_view, Runner> table = {
        {"hardy", run_hardy},
        {"sequential", run_sequential},
        {"epr", run_epr},
        {"pauli-obstruction", run_pauli_obstruction},
        {"double-slit", run_double_slit},
        {"quantum-potential", run_quantum_potential},
        {"nonlocal-q", run_nonlocal_q},
        {"kg-negativity", run_kg_negativity},
        {"dirac-check", run_dirac_check},
        {"fock-spectrum", run_fock_spectrum},
        {"quench", run_quench},
        {"unruh", run_unruh},
        {"hawking", run_hawking},
        {"blackhole", run_blackhole},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw UsageError("unknown scenario '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> selected(const std::string& scenario) {
    if (scenario == "all") {
        std::vector<std::string> out;
        for (const auto& s : kScenarios) out.push_back(s.name);
        return out;
    }
    if (!find_scenario(scenario)) throw UsageError("unknown scenario '" + scenario + "'");
    return {scenario};
}

// Overrides addressed to one scenario: plain keys (single runs only) and
// `scenario.key`.
std::map<std::string, std::string> overrides_for(const ScenarioConfig& cfg, const std::string& name) {
    std::map<std::string, std::string> out;
    for (const auto& [key, value] : cfg.params) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) {
            if (cfg.scenario == "all")
                throw UsageError("parameter '" + key + "' must be written as scenario.key when running all");
            out[key] = value;
            continue;
        }
        const std::string target = key.substr(0, dot);
        if (!find_scenario(target)) throw UsageError("parameter '" + key + "' names unknown scenario '" + target + "'");
        if (cfg.scenario != "all" && target != cfg.scenario)
            throw UsageError("parameter '" + key + "' does not belong to scenario '" + cfg.scenario + "'");
        if (target == name) out[key.substr(dot + 1)] = value;
    }
    return out;
}

void validate_semantics(const std::string& name, const ScenarioParams& p) {
    try {
        if (name == "fock-spectrum") parse_potential(p.text("potential"));
        if (name == "kg-negativity" && !p.text("field").empty()) read_kg_field(p.text("field"));
        if (name == "kg-negativity" && p.text("t_max") != "auto") {
            double t = 0;
            if (!parse_exact(p.text("t_max"), t) || !(t > 0) || !std::isfinite(t))
                throw UsageError("kg-negativity: t_max must be 'auto' or a positive number");
        }
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(name + ": " + e.what());
    }
}

}  // namespace

OutputFormat parse_format(std::string_view s) {
    if (s == "json") return OutputFormat::json;
    if (s == "csv") return OutputFormat::csv;
    if (s == "both") return OutputFormat::both;
    throw UsageError("format must be json, csv or both, got '" + std::string(s) + "'");
}

const std::vector<ScenarioInfo>& scenarios() { return kScenarios; }

const ScenarioInfo* find_scenario(std::string_view name) {
    for (const auto& s : kScenarios)
        if (s.name == name) return &s;
    return nullptr;
}

ScenarioParams::ScenarioParams(const ScenarioInfo& info, const std::map<std::string, std::string>& overrides)
    : scenario_(info.name) {
    for (const auto& spec : info.params) {
        defaults_[spec.key] = spec.default_value;
        values_[spec.key] = spec.default_value;
    }
    for (const auto& [key, value] : overrides) {
        const auto it = std::find_if(info.params.begin(), info.params.end(),
                                     [&](const ParamSpec& s) { return s.key == key; });
        if (it == info.params.end()) throw UsageError("scenario '" + info.name + "' has no parameter '" + key + "'");
        check_kind(info.name, *it, value);
        values_[key] = value;
    }
}

const std::string& ScenarioParams::raw(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("scenario '" + scenario_ + "' has no parameter '" + key + "'");
    return it->second;
}

double ScenarioParams::real(const std::string& key) const {
    double v = 0;
    if (!parse_exact(raw(key), v)) throw UsageError("parameter '" + key + "' is not a number");
    return v;
}

std::int64_t ScenarioParams::integer(const std::string& key) const {
    std::int64_t v = 0;
    if (!parse_exact(raw(key), v)) throw UsageError("parameter '" + key + "' is not an integer");
    return v;
}

const std::string& ScenarioParams::text(const std::string& key) const { return raw(key); }

bool ScenarioParams::is_default(const std::string& key) const { return raw(key) == defaults_.at(key); }

Json ScenarioParams::to_json() const {
    Json j = Json::object();
    for (const auto& [key, value] : values_) j[key] = value;
    return j;
}

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

Json RunReport::to_json() const {
    Json j;
    j["scenario"] = scenario;
    j["seed"] = seed;
    j["inputs"] = inputs;
    j["values"] = values;
    j["checks"] = Json::array();
    for (const auto& c : checks) j["checks"].push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    j["passed"] = passed();
    j["notes"] = notes;
    j["tables"] = Json::array();
    for (const auto& t : tables) j["tables"].push_back(t.name + ".csv");
    return j;
}

void validate(const ScenarioConfig& cfg) {
    if (cfg.threads < 1) throw UsageError("threads must be at least 1");
    for (const auto& name : selected(cfg.scenario)) {
        const ScenarioParams params(*find_scenario(name), overrides_for(cfg, name));
        validate_semantics(name, params);
    }
}

RunReport run_scenario(const std::string& name, const ScenarioParams& params, std::uint64_t seed, unsigned threads) {
    const Runner fn = runner_for(name);
    RunReport r;
    r.scenario = name;
    r.seed = seed;
    r.inputs = params.to_json();
    const auto start = std::chrono::steady_clock::now();
    fn(params, seed, std::max(1u, threads), r);
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

std::vector<RunReport> run(const ScenarioConfig& cfg) {
    validate(cfg);
    const auto names = selected(cfg.scenario);
    std::vector<ScenarioParams> params;
    for (const auto& name : names) params.emplace_back(*find_scenario(name), overrides_for(cfg, name));

    std::vector<RunReport> reports(names.size());
    std::vector<std::exception_ptr> errors(names.size());
    const auto workers = cfg.parallel ? static_cast<unsigned>(names.size()) : 1u;
    parallel_for(names.size(), workers, [&](std::size_t i) {
        try {
            reports[i] = run_scenario(names[i], params[i], cfg.seed, cfg.threads);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    });
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return reports;
}

void write_report(const RunReport& report, const std::filesystem::path& dir, OutputFormat format) {
    const auto out = dir / report.scenario;
    std::filesystem::create_directories(out);
    if (format != OutputFormat::csv) write_json(out / "report.json", report.to_json());
    if (format != OutputFormat::json)
        for (const auto& t : report.tables) write_csv(out / (t.name + ".csv"), t);
}

}  // namespace qfl
