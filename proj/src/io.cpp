#include "qfl/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace qfl {

namespace {

template <typename T>
T field_of(const Json& j, const char* key) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("field spec: missing '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument(std::string("field spec: '") + key + "' has the wrong type");
    }
}

Frequency parse_sign(const Json& s) {
    if (s.is_string()) {
        const auto v = s.get<std::string>();
        if (v == "+" || v == "positive" || v == "+1") return Frequency::positive;
        if (v == "-" || v == "negative" || v == "-1") return Frequency::negative;
    } else if (s.is_number_integer()) {
        if (s.get<int>() == 1) return Frequency::positive;
        if (s.get<int>() == -1) return Frequency::negative;
    }
    throw std::invalid_argument("field spec: sign must be \"+\", \"-\", 1 or -1");
}

}  // namespace

KGField kg_field_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("field spec: expected a JSON object");
    KGField field(field_of<double>(j, "L"), field_of<double>(j, "m"));
    if (!j.contains("terms") || !j.at("terms").is_array())
        throw std::invalid_argument("field spec: 'terms' must be an array");
    for (const auto& t : j.at("terms")) {
        if (!t.contains("sign")) throw std::invalid_argument("field spec: term without 'sign'");
        const double re = t.contains("re") ? field_of<double>(t, "re") : 0.0;
        const double im = t.contains("im") ? field_of<double>(t, "im") : 0.0;
        field.add(field_of<int>(t, "n"), parse_sign(t.at("sign")), {re, im});
    }
    return field;
}

Json kg_field_to_json(const KGField& field) {
    Json terms = Json::array();
    for (const auto& t : field.terms())
        terms.push_back({{"n", t.mode.n},
                         {"sign", t.mode.sign == Frequency::positive ? "+" : "-"},
                         {"re", t.c.real()},
                         {"im", t.c.imag()}});
    return {{"L", field.L()}, {"m", field.mass()}, {"terms", terms}};
}

KGField read_kg_field(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open field spec " + path.string());
    try {
        return kg_field_from_json(Json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("field spec " + path.string() + ": " + e.what());
    }
}

std::string format_number(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw std::logic_error("CSV table '" + table.name + "': row width differs from header");
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

CsvTable snapshot_table(std::span<const WaveField> snapshots) {
    CsvTable t{"snapshots", {"t", "x", "re_psi", "im_psi", "rho", "S", "Q", "v"}, {}};
    for (const auto& psi : snapshots) {
        const auto mp = madelung(psi);
        const auto q = quantum_potential(psi);
        const auto v = velocity_field(psi);
        for (Eigen::Index i = 0; i < psi.grid.size(); ++i)
            t.rows.push_back({psi.t, psi.grid.x(i), psi.values(i).real(), psi.values(i).imag(), mp.rho(i), mp.S(i),
                              q.Q(i), v.v(i)});
    }
    return t;
}

CsvTable trajectory_table(std::span<const Trajectory> trajectories, std::size_t stride) {
    CsvTable t{"trajectories", {"traj_id", "t", "x"}, {}};
    stride = std::max<std::size_t>(stride, 1);
    for (std::size_t j = 0; j < trajectories.size(); j += stride)
        for (std::size_t k = 0; k < trajectories[j].t.size(); ++k)
            t.rows.push_back({static_cast<double>(j), trajectories[j].t[k], trajectories[j].x[k]});
    return t;
}

CsvTable current_table(std::span<const CurrentSample> samples) {
    CsvTable t{"current", {"t", "x", "j0", "j1"}, {}};
    for (const auto& s : samples) t.rows.push_back({s.t, s.x, s.j0, s.j1});
    return t;
}

CsvTable spectrum_table(std::span<const ThermalSpectrumPoint> points) {
    CsvTable t{"spectrum", {"omega", "occupation", "temperature"}, {}};
    for (const auto& p : points) t.rows.push_back({p.omega, p.occupation, p.temperature});
    return t;
}

Json complex_json(std::complex<double> z) { return {{"re", z.real()}, {"im", z.imag()}}; }

Json spectrum_report(Eigen::Index dim, double omega, const std::string& potential, const std::vector<double>& eigenvalues,
                     double n_commutator_norm) {
    return {{"dim", dim},
            {"omega", omega},
            {"potential", potential},
            {"eigenvalues", eigenvalues},
            {"n_commutator_norm", n_commutator_norm}};
}

Json quench_report(const QuenchModel& q, const QuenchResult& r) {
    Json modes = Json::array();
    for (const auto& m : r.modes)
        modes.push_back({{"n", m.n},
                         {"omega_in", m.omega_in},
                         {"omega_out", m.omega_out},
                         {"alpha", complex_json(m.alpha)},
                         {"beta", complex_json(m.beta)},
                         {"n_created", m.n_created}});
    return {{"m_in", q.m_in}, {"m_out", q.m_out}, {"L", q.L}, {"modes", modes}};
}

Json blackhole_report(const BlackHoleParams& p, const SchwarzschildDerived& d, double first_law_residual) {
    return {{"M", p.M},     {"G", p.G}, {"r_h", d.r_h}, {"A", d.A},
            {"kappa", d.kappa}, {"T", d.T}, {"S", d.S},     {"first_law_residual", first_law_residual}};
}

}  // namespace qfl
