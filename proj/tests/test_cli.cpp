// End-to-end tests of the thirsim binary (path via THIRSIM_BIN) and of the
// scenario parser / CSV / SVG layers used by it.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "thir/experiment.hpp"
#include "thir/scenario.hpp"

using namespace thir;

namespace {

std::string tool_path() {
    const char* env = std::getenv("THIRSIM_BIN");
    return env ? env : "";
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_tool(const std::string& args) {
    RunResult r;
    const std::string out_file = "cli_stdout.tmp";
    const std::string cmd = tool_path() + " " + args + " > " + out_file + " 2> cli_stderr.tmp";
    int status = std::system(cmd.c_str());
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

const char* kTinyScenario =
    "name = tiny\n"
    "coding = coded\n"
    "total_gain = 16\n"
    "pulse_rate = 4\n"
    "num_users = 2\n"
    "noise_sigma = 1.0\n"
    "snr_db = 4\n"
    "detectors = mf zf mmse ml\n"
    "axis = pulse_rate\n"
    "values = 1 4 16\n"
    "trials = 2000\n"
    "seed = 11\n"
    "analytic = on\n"
    "max_errors = 0\n";

}  // namespace

TEST_CASE("scenario parsing and overrides", "[cli]") {
    ExperimentSpec spec = parse_experiment_spec(kTinyScenario);
    spec.validate();
    REQUIRE(spec.name == "tiny");
    REQUIRE(spec.detectors.size() == 4);
    REQUIRE(spec.values == std::vector<double>{1, 4, 16});
    REQUIRE(spec.max_errors == 0);

    ExperimentSpec over = parse_experiment_spec(kTinyScenario, {"coding=uncoded",
                                                                "trials=500"});
    REQUIRE(over.coding == Coding::Uncoded);
    REQUIRE(over.trials == 500);

    // parse errors carry line/column
    try {
        parse_experiment_spec("name = x\nbogus_key = 3\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(e.line == 2);
    }
    REQUIRE_THROWS_AS(parse_experiment_spec("name = x\nname = y\n"), ParseError);
    REQUIRE_THROWS_AS(parse_experiment_spec("no equals sign here\n"), ParseError);

    // all built-ins parse and validate
    for (const auto& [name, text] : builtin_scenarios()) {
        ExperimentSpec s = parse_experiment_spec(text);
        s.validate();
        REQUIRE(s.name == name);
    }
}

TEST_CASE("experiment runner emits the pinned CSV schema", "[cli]") {
    ExperimentSpec spec = parse_experiment_spec(kTinyScenario);
    ExperimentResult result = run_experiment(spec, 1);
    REQUIRE(result.rows.size() == 12);  // 3 values x 4 detectors

    const std::string csv = render_csv(result);
    REQUIRE(csv.rfind("axis,detector,pulse_rate,ber,ci_low,ci_high,analytic\n", 0) == 0);

    // analytic column is filled for MF rows only
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);  // header
    int mf_with_analytic = 0, other_with_analytic = 0;
    while (std::getline(lines, line)) {
        const bool has_analytic = line.back() != ',';
        if (line.find(",mf,") != std::string::npos)
            mf_with_analytic += has_analytic;
        else
            other_with_analytic += has_analytic;
    }
    REQUIRE(mf_with_analytic == 3);
    REQUIRE(other_with_analytic == 0);

    const std::string svg = render_svg(result);
    REQUIRE(svg.rfind("<svg", 0) == 0);
    REQUIRE(svg.find("polyline") != std::string::npos);
    REQUIRE(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("thirsim sweep runs a scenario file deterministically", "[cli]") {
    REQUIRE_FALSE(tool_path().empty());
    write_file("tiny.scn", kTinyScenario);

    RunResult r1 = run_tool("sweep tiny.scn --out tiny1.csv --svg tiny.svg");
    REQUIRE(r1.exit_code == 0);
    RunResult r2 = run_tool("sweep tiny.scn --out tiny2.csv");
    REQUIRE(r2.exit_code == 0);
    const std::string csv1 = read_file("tiny1.csv");
    REQUIRE(csv1 == read_file("tiny2.csv"));  // byte-identical rerun
    REQUIRE(csv1.rfind("axis,detector,pulse_rate,ber,ci_low,ci_high,analytic\n", 0) == 0);
    REQUIRE(read_file("tiny.svg").rfind("<svg", 0) == 0);

    // overrides win over file keys
    RunResult r3 = run_tool("sweep tiny.scn --set trials=1000 --out tiny3.csv");
    REQUIRE(r3.exit_code == 0);
    REQUIRE(read_file("tiny3.csv") != csv1);
}

TEST_CASE("thirsim exit codes", "[cli]") {
    REQUIRE_FALSE(tool_path().empty());

    write_file("broken.scn", "name = broken\nwhat even is this line\n");
    REQUIRE(run_tool("sweep broken.scn").exit_code == 2);

    write_file("badkey.scn", std::string(kTinyScenario) + "unknown_thing = 3\n");
    REQUIRE(run_tool("sweep badkey.scn").exit_code == 2);

    REQUIRE(run_tool("sweep no_such_scenario_name").exit_code == 2);

    // infeasible: swept pulse rate does not divide the total gain
    write_file("infeasible.scn", std::string(kTinyScenario) + "");
    REQUIRE(run_tool("sweep infeasible.scn --set values=\"1 3 16\"").exit_code == 3);

    // infeasible: exhaustive ML beyond the user cap
    RunResult ml = run_tool("sweep tiny.scn --set num_users=21 --out ml.csv");
    REQUIRE(ml.exit_code == 3);
}

TEST_CASE("thirsim scenarios subcommands", "[cli]") {
    REQUIRE_FALSE(tool_path().empty());
    RunResult list = run_tool("scenarios list");
    REQUIRE(list.exit_code == 0);
    for (const char* name : {"fig1a", "fig1b", "fig2", "fig3", "fig4"})
        REQUIRE(list.out.find(name) != std::string::npos);

    RunResult show = run_tool("scenarios show fig1a");
    REQUIRE(show.exit_code == 0);
    REQUIRE(show.out.find("total_gain = 128") != std::string::npos);
    REQUIRE(run_tool("scenarios show nope").exit_code == 2);
}

TEST_CASE("thirsim verify quick is deterministic and passes", "[cli][slow]") {
    REQUIRE_FALSE(tool_path().empty());
    RunResult v1 = run_tool("verify --scale quick --seed 42 --out rep1.csv");
    REQUIRE(v1.exit_code == 0);
    RunResult v2 = run_tool("verify --scale quick --seed 42 --out rep2.csv");
    REQUIRE(v2.exit_code == 0);
    REQUIRE(read_file("rep1.csv") == read_file("rep2.csv"));
    REQUIRE(v1.out.find("all-pass") != std::string::npos);
}
