#include "catch_amalgamated.hpp"

#include "tripled/cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace tripled;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / "tripled_cli_tests" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

RunConfig small(const std::string& problem, const fs::path& out) {
    RunConfig c;
    c.problem = {problem, {}};
    c.t_max = 2.0;
    c.n_nodes = 65;
    c.output_dir = out;
    return c;
}

}  // namespace

TEST_CASE("parse_config reads every section", "[cli]") {
    const auto c = parse_config(R"({
        "problem": {"name": "linear_volterra", "parameters": {"lambda": 0.5}},
        "grid": {"t_max": 2.0, "n_nodes": 1025},
        "solve": {"tol": 1e-10, "max_iter": 50, "damping": 0.5, "init": "zero", "max_seconds": 3},
        "quad": {"base_panels": 8, "rel_tol": 1e-10, "abs_tol": 1e-13, "max_refine": 12},
        "mnc": {"eps_ladder": [0.2, 0.1], "k_ladder": [1.0, 2.0], "tail_start": 1.5},
        "verify": {"holder_samples": 10, "decay_ladder": [5, 6, 7]},
        "diagnose": {"window": 4, "axiom_trials": 10},
        "output_dir": "somewhere", "seed": 9, "retain_trace": true
    })");
    CHECK(c.problem.name == "linear_volterra");
    CHECK(c.problem.parameters.at("lambda") == 0.5);
    CHECK(c.t_max == 2.0);
    CHECK(c.n_nodes == 1025);
    CHECK(c.solve.tol == 1e-10);
    CHECK(c.solve.max_iter == 50);
    CHECK(c.solve.damping == 0.5);
    CHECK(c.solve.init == InitPolicy::Zero);
    CHECK(c.solve.max_seconds == 3.0);
    CHECK(c.quad.base_panels == 8);
    CHECK(c.quad.max_refine == 12);
    CHECK(c.mnc.eps_ladder == std::vector<double>{0.2, 0.1});
    CHECK(c.mnc.tail_start == 1.5);
    CHECK(c.verify.holder_samples == 10);
    CHECK(c.verify.decay_ladder.size() == 3);
    CHECK(c.diagnose.window == 4);
    CHECK(c.output_dir == "somewhere");
    CHECK(c.seed == 9);
    CHECK(c.retain_trace);

    const auto d = parse_config("{}");
    CHECK(d.problem.name == "paper_example");
    CHECK(d.t_max == 20.0);
    CHECK(d.n_nodes == 2001);
    CHECK(d.solve.tol == 1e-8);
}

TEST_CASE("parse_config reports location and key context", "[cli]") {
    try {
        parse_config("{\n  \"seed\": 3,\n  \"grid\": {\"t_max\": }\n}");
        FAIL("expected parse error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
        parse_config(R"({"solve": {"tol": "small"}})");
        FAIL("expected type error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("solve.tol") != std::string::npos);
    }
    try {
        parse_config(R"({"quad": {"panels": 4}})");
        FAIL("expected unknown key");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("quad.panels") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(R"({"solve": {"init": "random"}})"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"grid": 3})"), ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ValidationError);
}

TEST_CASE("solve command", "[cli]") {
    std::ostringstream log;
    auto c = small("decoupled_identity", scratch("solve_decoupled"));
    CHECK(cmd_solve(c, log) == kExitOk);
    const auto report = json::parse(slurp(c.output_dir / "report.json"));
    CHECK(report["iterations"] == 1);
    CHECK(report["converged"] == true);
    CHECK(report["final_residual"] == 0.0);
    const auto csv = slurp(c.output_dir / "solution.csv");
    CHECK(csv.rfind("t,x,y,z\n", 0) == 0);
    CHECK(count_lines(csv) == 66);

    c = small("linear_volterra", scratch("solve_cap"));
    c.solve.max_iter = 3;
    CHECK(cmd_solve(c, log) == kExitInconclusive);
    CHECK(json::parse(slurp(c.output_dir / "report.json"))["status"] == "inconclusive");

    c = small("no_such_problem", scratch("solve_unknown"));
    CHECK(cmd_solve(c, log) == kExitError);
    c = small("linear_volterra", scratch("solve_diverge"));
    c.problem.parameters["lambda"] = 50.0;
    CHECK(cmd_solve(c, log) == kExitError);
    CHECK(log.str().find("divergence") != std::string::npos);
    c = small("linear_volterra", scratch("solve_badgrid"));
    c.n_nodes = 1;
    CHECK(cmd_solve(c, log) == kExitError);
}

TEST_CASE("verify command", "[cli]") {
    std::ostringstream log;
    auto c = small("decoupled_identity", scratch("verify_ok"));
    c.verify.holder_samples = 2000;
    c.verify.f_samples = 2000;
    CHECK(cmd_verify(c, log) == kExitOk);
    const auto j = json::parse(slurp(c.output_dir / "hypotheses.json"));
    CHECK(j["conditions"].size() == 5);
    CHECK(fs::exists(c.output_dir / "decay_1.csv"));
    CHECK(slurp(c.output_dir / "decay_1.csv").rfind("t,max_diff_integral\n", 0) == 0);

    c = small("squared_psi", scratch("verify_bad"));
    c.verify.holder_samples = 2000;
    c.verify.f_samples = 2000;
    CHECK(cmd_verify(c, log) == kExitError);
    const auto bad = json::parse(slurp(c.output_dir / "hypotheses.json"));
    CHECK(bad["conditions"][1]["status"] == "violated");
    CHECK(bad["conditions"][1]["witness"].size() == 2);
}

TEST_CASE("diagnose command", "[cli]") {
    std::ostringstream log;
    auto c = small("linear_volterra", scratch("diagnose_untraced"));
    CHECK(cmd_diagnose(c, log) == kExitError);
    CHECK(log.str().find("retain_trace") != std::string::npos);

    c = small("linear_volterra", scratch("diagnose"));
    c.retain_trace = true;
    c.diagnose.axiom_trials = 10;
    CHECK(cmd_diagnose(c, log) == kExitOk);
    const auto j = json::parse(slurp(c.output_dir / "mnc.json"));
    CHECK(j["axiom_suite"]["subset_pass"] == 10);
    CHECK(j["windows"].size() > 1);
    const auto diam = slurp(c.output_dir / "diam.csv");
    CHECK(diam.rfind("t,diam\n", 0) == 0);
    CHECK(count_lines(diam) == 66);

    c = small("decoupled_identity", scratch("diagnose_short"));
    c.retain_trace = true;
    c.diagnose.axiom_trials = 3;
    CHECK(cmd_diagnose(c, log) == kExitOk);
    CHECK(json::parse(slurp(c.output_dir / "mnc.json")).contains("windows_note"));
}

TEST_CASE("outputs are byte-identical across runs", "[cli][property]") {
    std::ostringstream log;
    auto c = small("linear_volterra", scratch("determinism_a"));
    c.retain_trace = true;
    c.diagnose.axiom_trials = 5;
    auto d = c;
    d.output_dir = scratch("determinism_b");
    REQUIRE(cmd_solve(c, log) == kExitOk);
    REQUIRE(cmd_solve(d, log) == kExitOk);
    REQUIRE(cmd_diagnose(c, log) == kExitOk);
    REQUIRE(cmd_diagnose(d, log) == kExitOk);
    for (const char* f : {"solution.csv", "report.json", "mnc.json", "diam.csv"}) {
        INFO(f);
        CHECK(slurp(c.output_dir / f) == slurp(d.output_dir / f));
    }
}

TEST_CASE("list-problems names every registry entry", "[cli]") {
    std::ostringstream os;
    list_problems(os);
    for (const char* name : {"paper_example", "decoupled_identity", "linear_volterra", "squared_psi"}) {
        CHECK(os.str().find(name) != std::string::npos);
    }
}
