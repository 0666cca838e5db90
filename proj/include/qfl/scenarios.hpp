#pragma once

// Named demonstrations binding all modules. Each scenario computes a set of
// values, checks them against their invariants and emits a JSON report plus
// CSV tables.

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qfl/io.hpp"

namespace qfl {

/// Invalid configuration: unknown scenario, unknown parameter, malformed value.
class UsageError : public std::invalid_argument {
public:
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

enum class OutputFormat { json, csv, both };

OutputFormat parse_format(std::string_view s);

/// count: integer >= 1; positive: finite real > 0; real: finite real.
enum class ParamKind { count, positive, real, text };

struct ParamSpec {
    std::string key;
    ParamKind kind = ParamKind::real;
    std::string default_value;
    std::string doc;
};

struct ScenarioInfo {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
};

/// The fourteen scenarios in run order (`all` is not listed).
const std::vector<ScenarioInfo>& scenarios();
const ScenarioInfo* find_scenario(std::string_view name);

/// Parameter values with defaults applied. Unknown keys and malformed values
/// throw UsageError.
class ScenarioParams {
public:
    ScenarioParams(const ScenarioInfo& info, const std::map<std::string, std::string>& overrides);

    double real(const std::string& key) const;
    std::int64_t integer(const std::string& key) const;
    const std::string& text(const std::string& key) const;
    bool is_default(const std::string& key) const;
    Json to_json() const;

private:
    const std::string& raw(const std::string& key) const;

    std::string scenario_;
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> defaults_;
};

struct ScenarioConfig {
    std::string scenario;
    std::uint64_t seed = 1;
    /// `key=value` overrides; `scenario.key` addresses one scenario under `all`.
    std::map<std::string, std::string> params;
    std::filesystem::path output_dir = "qfl_out";
    OutputFormat format = OutputFormat::both;
    bool parallel = false;
    unsigned threads = 1;
};

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct RunReport {
    std::string scenario;
    std::uint64_t seed = 0;
    Json inputs = Json::object();
    Json values = Json::object();
    std::vector<CheckResult> checks;
    std::vector<CsvTable> tables;
    std::vector<std::string> notes;
    double wall_seconds = 0;  ///< not part of to_json()

    bool passed() const;
    Json to_json() const;
};

/// Throws UsageError for anything run() would reject, before any computation.
void validate(const ScenarioConfig& cfg);

RunReport run_scenario(const std::string& name, const ScenarioParams& params, std::uint64_t seed,
                       unsigned threads = 1);

/// Runs one scenario or, for `all`, every scenario (concurrently with
/// cfg.parallel). Reports come back in scenario order.
std::vector<RunReport> run(const ScenarioConfig& cfg);

/// Writes dir/<scenario>/report.json and dir/<scenario>/<table>.csv.
void write_report(const RunReport& report, const std::filesystem::path& dir, OutputFormat format);

}  // namespace qfl
