#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "qfl/scenarios.hpp"

using namespace qfl;
namespace fs = std::filesystem;

namespace {

RunReport run_one(const std::string& name, std::map<std::string, std::string> params = {},
                  std::uint64_t seed = 1, unsigned threads = 1) {
    ScenarioConfig cfg;
    cfg.scenario = name;
    cfg.params = std::move(params);
    cfg.seed = seed;
    cfg.threads = threads;
    auto reports = run(cfg);
    REQUIRE(reports.size() == 1);
    return reports.front();
}

const CheckResult& check_named(const RunReport& r, const std::string& name) {
    for (const auto& c : r.checks)
        if (c.name == name) return c;
    FAIL("no check " << name);
    throw;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("qfl_test_scenarios_" + name);
    fs::remove_all(dir);
    return dir;
}

// Small double-slit so the unit suite stays quick.
const std::map<std::string, std::string> kSmallSlit{{"points", "512"},     {"steps", "300"},
                                                    {"trajectories", "400"}, {"norm_steps", "200"},
                                                    {"x_min", "-15"},      {"x_max", "15"}};

}  // namespace

TEST_CASE("fourteen scenarios with documented defaults") {
    CHECK(scenarios().size() == 14);
    for (const auto& s : scenarios()) {
        CHECK(find_scenario(s.name) == &s);
        for (const auto& p : s.params) CHECK_FALSE(p.doc.empty());
    }
    CHECK(find_scenario("all") == nullptr);
}

TEST_CASE("every scenario passes at its defaults") {
    for (const auto& s : scenarios()) {
        CAPTURE(s.name);
        const auto r = s.name == "double-slit" ? run_one(s.name, kSmallSlit) : run_one(s.name);
        CHECK(r.scenario == s.name);
        CHECK_FALSE(r.checks.empty());
        for (const auto& c : r.checks) {
            CAPTURE(c.name);
            CAPTURE(c.detail);
            CHECK(c.passed);
        }
        CHECK(r.passed());
    }
}

TEST_CASE("hardy report carries the witness amplitude and probability") {
    const auto j = run_one("hardy").to_json();
    CHECK(j["values"]["amplitude"]["re"].get<double>() == doctest::Approx(-1 / (2 * std::sqrt(3.0))).epsilon(1e-14));
    CHECK(std::abs(j["values"]["amplitude"]["im"].get<double>()) < 1e-15);
    CHECK(j["values"]["probability"].get<double>() == doctest::Approx(1.0 / 12).epsilon(1e-14));
    CHECK(j["passed"].get<bool>());
}

TEST_CASE("blackhole report at M = G = 1") {
    const auto j = run_one("blackhole").to_json();
    CHECK(j["values"]["report"]["S"].get<double>() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-15));
    CHECK(j["values"]["report"]["r_h"].get<double>() == 2.0);
    CHECK(j["inputs"]["M"] == "1");
}

TEST_CASE("reports are deterministic and independent of thread count") {
    for (const std::string name : {"sequential", "epr", "pauli-obstruction", "kg-negativity", "dirac-check", "quench"}) {
        CAPTURE(name);
        const auto a = run_one(name, {}, 5, 1).to_json().dump();
        const auto b = run_one(name, {}, 5, 4).to_json().dump();
        CHECK(a == b);
    }
    CHECK(run_one("sequential", {}, 5).to_json() != run_one("sequential", {}, 6).to_json());
    CHECK(run_one("double-slit", kSmallSlit, 3, 1).to_json() == run_one("double-slit", kSmallSlit, 3, 3).to_json());
}

TEST_CASE("wall time stays out of the JSON") {
    const auto r = run_one("hardy");
    const auto j = r.to_json();
    CHECK_FALSE(j.contains("wall_seconds"));
    CHECK(j.dump().find("wall") == std::string::npos);
}

TEST_CASE("configuration errors are usage errors") {
    ScenarioConfig cfg;
    cfg.scenario = "nope";
    CHECK_THROWS_AS(validate(cfg), UsageError);

    cfg.scenario = "hardy";
    cfg.params = {{"runs", "5"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);

    cfg.scenario = "sequential";
    for (const std::string bad : {"0", "-3", "1.5", "ten", ""}) {
        cfg.params = {{"runs", bad}};
        CHECK_THROWS_AS(validate(cfg), UsageError);
    }
    cfg.params = {{"runs", "10"}};
    CHECK_NOTHROW(validate(cfg));
    cfg.params = {{"sequential.runs", "10"}};
    CHECK_NOTHROW(validate(cfg));
    cfg.params = {{"epr.runs", "10"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);

    cfg.scenario = "all";
    cfg.params = {{"runs", "10"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);
    cfg.params = {{"epr.runs", "10"}, {"sequential.runs", "20"}};
    CHECK_NOTHROW(validate(cfg));
    cfg.params = {{"warp.runs", "10"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);

    cfg.scenario = "fock-spectrum";
    cfg.params = {{"potential", "sin(x)"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);
    cfg.params = {{"potential", "0.5*x^2 + x^4"}};
    CHECK_NOTHROW(validate(cfg));

    cfg.scenario = "kg-negativity";
    cfg.params = {{"field", "/nonexistent/field.json"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);
    cfg.params = {{"t_max", "-1"}};
    CHECK_THROWS_AS(validate(cfg), UsageError);

    CHECK_THROWS_AS(parse_format("xml"), UsageError);
    CHECK(parse_format("csv") == OutputFormat::csv);
}

TEST_CASE("parameters reach the scenario under all") {
    ScenarioConfig cfg;
    cfg.scenario = "all";
    cfg.params = {{"sequential.runs", "1000"}, {"blackhole.M", "2"}};
    CHECK_NOTHROW(validate(cfg));
    const ScenarioParams p(*find_scenario("sequential"), {{"runs", "1000"}});
    CHECK(p.integer("runs") == 1000);
    CHECK_FALSE(p.is_default("runs"));
    CHECK(ScenarioParams(*find_scenario("sequential"), {}).is_default("runs"));
}

TEST_CASE("failing invariants are reported, not hidden") {
    const auto r = run_one("blackhole", {{"dM", "0.1"}});
    CHECK_FALSE(r.passed());
    CHECK_FALSE(check_named(r, "first_law_residual").passed);
    CHECK(check_named(r, "smarr").passed);
    CHECK_FALSE(r.notes.empty());

    const auto harmonic = run_one("fock-spectrum", {{"potential", "2*x^2"}});
    CHECK(check_named(harmonic, "commutator_vanishes_iff_harmonic").passed);
    CHECK(harmonic.to_json()["values"]["general"]["n_commutator_norm"].get<double>() == 0.0);
}

TEST_CASE("custom Klein-Gordon field from JSON") {
    const auto dir = scratch("kg");
    fs::create_directories(dir);
    const auto path = dir / "field.json";
    write_json(path, Json{{"L", 6.283185307179586},
                          {"m", 1.0},
                          {"terms", {{{"n", 1}, {"sign", "+"}, {"re", 1.0}}, {{"n", -2}, {"sign", 1}, {"re", 0.6}, {"im", 0.8}}}}});
    const auto r = run_one("kg-negativity", {{"field", path.string()}});
    CHECK(r.passed());
    CHECK(r.values["charge"].get<double>() == doctest::Approx(2.0));
    CHECK_FALSE(r.notes.empty());
    fs::remove_all(dir);
}

TEST_CASE("write_report lays out one directory per scenario") {
    const auto dir = scratch("write");
    const auto r = run_one("unruh");
    write_report(r, dir, OutputFormat::both);
    CHECK(fs::exists(dir / "unruh" / "report.json"));
    REQUIRE(fs::exists(dir / "unruh" / "spectrum.csv"));
    const auto csv = slurp(dir / "unruh" / "spectrum.csv");
    CHECK(csv.rfind("omega,occupation,temperature\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);

    const auto parsed = Json::parse(slurp(dir / "unruh" / "report.json"));
    CHECK(parsed == r.to_json());

    const auto json_only = scratch("json_only");
    write_report(r, json_only, OutputFormat::json);
    CHECK(fs::exists(json_only / "unruh" / "report.json"));
    CHECK_FALSE(fs::exists(json_only / "unruh" / "spectrum.csv"));

    const auto csv_only = scratch("csv_only");
    write_report(r, csv_only, OutputFormat::csv);
    CHECK_FALSE(fs::exists(csv_only / "unruh" / "report.json"));
    CHECK(fs::exists(csv_only / "unruh" / "spectrum.csv"));

    for (const auto& d : {dir, json_only, csv_only}) fs::remove_all(d);
}

TEST_CASE("numbers round-trip through the JSON report") {
    const auto r = run_one("quench");
    const auto text = r.to_json().dump(2);
    const auto back = Json::parse(text);
    const auto& modes = back["values"]["report"]["modes"];
    const auto& orig = r.values["report"]["modes"];
    REQUIRE(modes.size() == orig.size());
    for (std::size_t i = 0; i < modes.size(); ++i) {
        CHECK(modes[i]["beta"]["re"].get<double>() == orig[i]["beta"]["re"].get<double>());
        CHECK(modes[i]["n_created"].get<double>() == orig[i]["n_created"].get<double>());
    }
}
