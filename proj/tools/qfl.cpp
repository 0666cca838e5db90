// qfl <scenario> [--seed N] [--param key=value]... [--out DIR] [--format json|csv|both] [--parallel]
//
// Exit status: 0 when every check passes, 1 when a check fails (or a run
// aborts), 2 for usage errors. Nothing is written for an invalid invocation.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qfl/scenarios.hpp"

namespace {

std::string scenario_list() {
    std::string out = "scenarios:\n";
    for (const auto& s : qfl::scenarios()) {
        out += "  " + s.name + "  " + s.summary + "\n";
        for (const auto& p : s.params)
            out += "      " + p.key + " = " + (p.default_value.empty() ? "\"\"" : p.default_value) + "  " + p.doc +
                   "\n";
    }
    out += "  all  every scenario above; parameters are written scenario.key\n";
    return out;
}

int usage_error(const std::string& what) {
    std::cerr << "qfl: " << what << "\nRun 'qfl --help' for usage.\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario runner for the quantum foundations library", "qfl"};
    app.footer(scenario_list());

    qfl::ScenarioConfig cfg;
    std::vector<std::string> params;
    std::string out_dir;
    std::string format = "both";
    unsigned threads = 0;
    bool list = false;

    app.add_option("scenario", cfg.scenario, "scenario name or 'all'");
    app.add_option("--seed", cfg.seed, "64-bit seed for every random stream")->default_val(1);
    app.add_option("--param", params, "key=value override (repeatable)")->allow_extra_args(false);
    app.add_option("--out", out_dir, "output directory (default: $QFL_OUT, then ./qfl_out)");
    app.add_option("--format", format, "json, csv or both")->default_val("both");
    app.add_flag("--parallel", cfg.parallel, "run the scenarios of 'all' concurrently");
    app.add_option("--threads", threads, "worker threads inside a scenario (default 1, or all cores with --parallel)");
    app.add_flag("--list", list, "list scenarios and parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (list) {
        std::cout << scenario_list();
        return 0;
    }
    if (cfg.scenario.empty()) return usage_error("missing scenario name");

    for (const auto& kv : params) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) return usage_error("--param expects key=value, got '" + kv + "'");
        cfg.params[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    if (!out_dir.empty())
        cfg.output_dir = out_dir;
    else if (const char* env = std::getenv("QFL_OUT"); env && *env)
        cfg.output_dir = env;
    cfg.threads = threads ? threads : (cfg.parallel ? std::max(1u, std::thread::hardware_concurrency()) : 1u);

    std::vector<qfl::RunReport> reports;
    qfl::OutputFormat fmt{};
    try {
        fmt = qfl::parse_format(format);
        qfl::validate(cfg);
        reports = qfl::run(cfg);
    } catch (const std::invalid_argument& e) {
        return usage_error(e.what());
    } catch (const std::exception& e) {
        std::cerr << "qfl: run aborted: " << e.what() << "\n";
        return 1;
    }

    std::vector<std::string> failed;
    double total = 0;
    try {
        for (const auto& r : reports) {
            qfl::write_report(r, cfg.output_dir, fmt);
            total += r.wall_seconds;
            std::printf("%-18s %s  %.3f s\n", r.scenario.c_str(), r.passed() ? "PASS" : "FAIL", r.wall_seconds);
            for (const auto& c : r.checks) {
                std::printf("    %s %s: %s\n", c.passed ? "ok  " : "FAIL", c.name.c_str(), c.detail.c_str());
                if (!c.passed) failed.push_back(r.scenario + "/" + c.name);
            }
            for (const auto& n : r.notes) std::printf("    note: %s\n", n.c_str());
        }
        if (cfg.scenario == "all" && fmt != qfl::OutputFormat::csv) {
            qfl::Json summary{{"passed", failed.empty()}, {"scenarios", qfl::Json::object()}};
            for (const auto& r : reports) summary["scenarios"][r.scenario] = r.passed();
            qfl::write_json(cfg.output_dir / "summary.json", summary);
        }
    } catch (const std::exception& e) {
        std::cerr << "qfl: cannot write output: " << e.what() << "\n";
        return 1;
    }

    std::printf("output: %s\n", cfg.output_dir.string().c_str());
    if (cfg.scenario == "all") std::printf("total wall time: %.3f s\n", total);
    if (!failed.empty()) {
        for (const auto& f : failed) std::cerr << "qfl: check failed: " << f << "\n";
        return 1;
    }
    return 0;
}
