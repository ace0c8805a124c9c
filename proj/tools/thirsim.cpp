// thirsim - batch experiment runner for the thir library.
//
//   thirsim sweep <scenario|file> [--set key=value ...] [--out csv] [--svg svg]
//   thirsim verify [--scale quick|full] [--seed N] [--out report]
//   thirsim scenarios list | show <name>
//
// Exit codes: 0 success, 1 verification failure, 2 scenario parse error,
// 3 infeasible plan.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "thir/thir.hpp"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitParseError = 2;
constexpr int kExitInfeasible = 3;

bool write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    out << data;
    return static_cast<bool>(out);
}

int cmd_sweep(const std::string& scenario, const std::vector<std::string>& overrides,
              std::string out_path, std::string svg_path, int threads) {
    std::string text;
    std::string origin = scenario;
    if (const std::string* builtin = thir::find_builtin_scenario(scenario)) {
        text = *builtin;
    } else {
        std::ifstream in(scenario, std::ios::binary);
        if (!in) {
            std::cerr << "thirsim: no built-in scenario or readable file named '" << scenario
                      << "'\n";
            return kExitParseError;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    thir::ExperimentSpec spec;
    try {
        spec = thir::parse_experiment_spec(text, overrides);
        spec.validate();
    } catch (const thir::ParseError& e) {
        std::cerr << origin << ":" << e.line << ":" << e.col << ": " << e.what() << "\n";
        return kExitParseError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "thirsim: infeasible plan: " << e.what() << "\n";
        return kExitInfeasible;
    }
    if (!out_path.empty()) spec.csv_path = out_path;
    if (!svg_path.empty()) spec.svg_path = svg_path;
    if (spec.csv_path.empty()) spec.csv_path = spec.name + ".csv";

    thir::ExperimentResult result;
    try {
        result = thir::run_experiment(spec, threads);
    } catch (const std::invalid_argument& e) {
        std::cerr << "thirsim: infeasible plan: " << e.what() << "\n";
        return kExitInfeasible;
    }

    const std::string csv = thir::render_csv(result);
    if (!write_file(spec.csv_path, csv)) {
        std::cerr << "thirsim: cannot write " << spec.csv_path << "\n";
        return kExitInfeasible;
    }
    std::cout << csv;
    if (!spec.svg_path.empty()) {
        if (!write_file(spec.svg_path, thir::render_svg(result))) {
            std::cerr << "thirsim: cannot write " << spec.svg_path << "\n";
            return kExitInfeasible;
        }
        std::cerr << "wrote " << spec.svg_path << "\n";
    }
    std::cerr << "wrote " << spec.csv_path << "\n";
    return 0;
}

int cmd_verify(const std::string& scale_name, std::uint64_t seed,
               const std::string& out_path) {
    thir::VerifyScale scale =
        scale_name == "quick" ? thir::VerifyScale::Quick : thir::VerifyScale::Full;
    thir::VerifySuiteResult result = thir::run_verification_suite(scale, seed);
    const std::string report = thir::render_verification_report(result);
    std::cout << report;
    if (!out_path.empty() && !write_file(out_path, report)) {
        std::cerr << "thirsim: cannot write " << out_path << "\n";
        return kExitVerifyFailed;
    }
    if (!result.all_pass) {
        std::cerr << "verification FAILED:";
        for (const auto& r : result.reports)
            if (!thir::detail::report_tree_passes(r)) std::cerr << " " << r.check_name;
        std::cerr << "\n";
        return kExitVerifyFailed;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"link-level simulator for hybrid time-hopping / random-CDMA systems"};
    app.require_subcommand(1);

    // sweep
    std::string scenario;
    std::vector<std::string> overrides;
    std::string out_path, svg_path;
    int threads = thir::default_thread_count();
    CLI::App* sweep = app.add_subcommand("sweep", "run a scenario sweep, emit CSV (+SVG)");
    sweep->add_option("scenario", scenario, "built-in scenario name or spec file path")
        ->required();
    sweep->add_option("--set", overrides, "override a scenario key, e.g. --set seed=7");
    sweep->add_option("--out", out_path, "CSV output path (default <name>.csv)");
    sweep->add_option("--svg", svg_path, "also write an SVG plot");
    sweep->add_option("--threads", threads, "worker threads (default: THIR_THREADS or cores)");

    // verify
    std::string scale_name = "full";
    std::uint64_t seed = 42;
    std::string report_path;
    CLI::App* verify = app.add_subcommand("verify", "run the statistical verification suite");
    verify->add_option("--scale", scale_name, "quick or full")
        ->check(CLI::IsMember({"quick", "full"}));
    verify->add_option("--seed", seed, "suite seed (default 42)");
    verify->add_option("--out", report_path, "also write the report to a file");

    // scenarios
    CLI::App* scen = app.add_subcommand("scenarios", "inspect built-in scenarios");
    scen->require_subcommand(1);
    CLI::App* list = scen->add_subcommand("list", "list built-in scenario names");
    std::string show_name;
    CLI::App* show = scen->add_subcommand("show", "print a built-in scenario file");
    show->add_option("name", show_name, "scenario name")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) return cmd_sweep(scenario, overrides, out_path, svg_path, threads);
        if (verify->parsed()) return cmd_verify(scale_name, seed, report_path);
        if (list->parsed()) {
            for (const auto& [name, text] : thir::builtin_scenarios()) {
                std::string first_comment;
                std::istringstream ss(text);
                std::getline(ss, first_comment);
                if (!first_comment.empty() && first_comment[0] == '#')
                    first_comment = first_comment.substr(1);
                std::printf("%-10s %s\n", name.c_str(), thir::detail::trim(first_comment).c_str());
            }
            return 0;
        }
        if (show->parsed()) {
            const std::string* text = thir::find_builtin_scenario(show_name);
            if (!text) {
                std::cerr << "thirsim: unknown scenario '" << show_name << "'\n";
                return kExitParseError;
            }
            std::cout << *text;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "thirsim: " << e.what() << "\n";
        return kExitVerifyFailed;
    }
    return 0;
}
