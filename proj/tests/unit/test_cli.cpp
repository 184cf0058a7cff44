#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hwlrp/formulation.hpp"
#include "hwlrp/instance.hpp"
#include "test_util.hpp"

#ifndef HWLRP_CLI_PATH
#error "HWLRP_CLI_PATH must point at the hwlrp binary"
#endif

namespace fs = std::filesystem;
using namespace hwlrp;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args) {
    const fs::path out = fs::temp_directory_path() / "hwlrp_cli_test_out.txt";
    const std::string cmd =
        std::string(HWLRP_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out);
    std::ostringstream ss;
    ss << in.rdbuf();
    RunResult res;
    res.exit_code = WEXITSTATUS(rc);
    res.output = ss.str();
    return res;
}

fs::path write_temp_instance(const std::string& name, const Instance& inst) {
    const fs::path path = fs::temp_directory_path() / name;
    std::ofstream(path) << serialize_instance(inst);
    return path;
}

}  // namespace

TEST_CASE("validate: clean instance exits 0, broken data exits 2, missing file 5") {
    const fs::path ok = fs::temp_directory_path() / "cli_minimal.json";
    std::ofstream(ok) << testutil::minimal_doc();
    CHECK(run_cli("validate " + ok.string()).exit_code == 0);

    Instance bad = testutil::minimal_instance();
    bad.vehicles[0].capacity = 4.0;  // demand 6 no longer fits any vehicle
    const fs::path bad_path = write_temp_instance("cli_bad.json", bad);
    const RunResult res = run_cli("validate " + bad_path.string());
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("demand-exceeds-capacity") != std::string::npos);

    CHECK(run_cli("validate /nonexistent/instance.json").exit_code == 5);
}

TEST_CASE("solve writes a report and a reloadable solution document") {
    Instance inst = synth_instance(7, testutil::tiny_dims());
    const fs::path path = write_temp_instance("cli_synth7.json", inst);
    const fs::path outdir = fs::temp_directory_path() / "cli_out";
    fs::remove_all(outdir);
    const RunResult res =
        run_cli("solve " + path.string() + " --objective f1 --out " + outdir.string());
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("objectives:") != std::string::npos);

    const fs::path sol_path = outdir / (inst.name + ".f1.solution.json");
    REQUIRE(fs::exists(sol_path));
    std::ifstream in(sol_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    const Solution sol = parse_solution(inst, ss.str());
    CHECK(check_solution_feasible(inst, sol).empty());

    // reruns are byte-identical
    std::string first = ss.str();
    const RunResult res2 =
        run_cli("solve " + path.string() + " --objective f1 --out " + outdir.string());
    CHECK(res2.exit_code == 0);
    std::ifstream in2(sol_path);
    std::ostringstream ss2;
    ss2 << in2.rdbuf();
    CHECK(ss2.str() == first);
}

TEST_CASE("solve maps infeasibility to exit 3") {
    Instance inst = testutil::minimal_instance();
    // traps the only vehicle: too short for any route
    inst.vehicles[0].max_distance = 5.0;
    const fs::path path = write_temp_instance("cli_infeasible.json", inst);
    CHECK(run_cli("solve " + path.string() + " --objective f1").exit_code == 3);
}

TEST_CASE("solve honors the node limit with exit 4") {
    Instance inst = synth_instance(12, testutil::tiny_dims(3, 2, 2, 1, 2, 3, 2));
    const fs::path path = write_temp_instance("cli_limit.json", inst);
    const RunResult res =
        run_cli("solve " + path.string() + " --objective f1 --node-limit 1");
    CHECK(res.exit_code == 4);
}

TEST_CASE("pareto emits the front table with one row per grid cell") {
    Instance inst = synth_instance(3, testutil::tiny_dims());
    const fs::path path = write_temp_instance("cli_pareto.json", inst);
    const fs::path outdir = fs::temp_directory_path() / "cli_pareto_out";
    fs::remove_all(outdir);
    const RunResult res =
        run_cli("pareto " + path.string() + " --grid 2 --out " + outdir.string());
    CHECK(res.exit_code == 0);
    const fs::path front = outdir / (inst.name + ".front.tsv");
    REQUIRE(fs::exists(front));
    std::ifstream in(front);
    std::string line;
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 1 + 4);  // header + 2x2 grid

    // determinism of the emitted table
    std::ostringstream first;
    first << std::ifstream(front).rdbuf();
    run_cli("pareto " + path.string() + " --grid 2 --out " + outdir.string());
    std::ostringstream second;
    second << std::ifstream(front).rdbuf();
    CHECK(first.str() == second.str());
}

TEST_CASE("sensitivity waste-scale 1.0 reports zero deltas") {
    Instance inst = synth_instance(7, testutil::tiny_dims());
    const fs::path path = write_temp_instance("cli_sens.json", inst);
    const RunResult res = run_cli("sensitivity " + path.string() +
                                  " --scenario waste-scale --factor 1.0");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("f1 delta: 0%") != std::string::npos);
    CHECK(res.output.find("f2 delta: 0%") != std::string::npos);
    CHECK(res.output.find("f3 delta: 0%") != std::string::npos);
}

TEST_CASE("export produces LP text with the augmented slack columns") {
    Instance inst = synth_instance(7, testutil::tiny_dims());
    const fs::path path = write_temp_instance("cli_export.json", inst);
    const RunResult plain = run_cli("export " + path.string() + " --objective f2 -o -");
    CHECK(plain.exit_code == 0);
    CHECK(plain.output.find("Minimize") != std::string::npos);
    CHECK(plain.output.find("End") != std::string::npos);

    const RunResult aug =
        run_cli("export " + path.string() + " --eps2 1e9 --eps3 1e9 -o -");
    CHECK(aug.exit_code == 0);
    CHECK(aug.output.find("s2") != std::string::npos);
    CHECK(aug.output.find("s3") != std::string::npos);
    CHECK(aug.output.find("eq42_epsilon") != std::string::npos);
}
