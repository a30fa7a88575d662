#include "tripled/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::string config;
    std::optional<double> tol;
    std::optional<double> t_max;
    std::optional<std::size_t> n_nodes;
    std::optional<std::string> problem;
    std::optional<std::string> output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> max_iter;
    std::optional<double> max_seconds;
    bool retain_trace = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("-c,--config", o.config, "JSON run configuration");
    cmd->add_option("--tol", o.tol, "residual tolerance (solve.tol)");
    cmd->add_option("--t-max", o.t_max, "grid horizon (grid.t_max)");
    cmd->add_option("--n-nodes", o.n_nodes, "grid node count (grid.n_nodes)");
    cmd->add_option("--problem", o.problem, "registered problem name (problem.name)");
    cmd->add_option("-o,--output-dir", o.output_dir, "directory for the output files");
    cmd->add_option("--seed", o.seed, "random seed");
    cmd->add_option("--max-iter", o.max_iter, "iteration cap (solve.max_iter)");
    cmd->add_option("--max-seconds", o.max_seconds, "wall-clock budget for the solve, 0 for none");
    cmd->add_flag("--retain-trace", o.retain_trace, "keep every iterate (needed by diagnose)");
}

tripled::RunConfig resolve(const Overrides& o) {
    tripled::RunConfig cfg = o.config.empty() ? tripled::RunConfig{} : tripled::load_config(o.config);
    if (o.problem && *o.problem != cfg.problem.name) {
        cfg.problem.name = *o.problem;
        cfg.problem.parameters.clear();
    }
    if (o.tol) cfg.solve.tol = *o.tol;
    if (o.t_max) cfg.t_max = *o.t_max;
    if (o.n_nodes) cfg.n_nodes = *o.n_nodes;
    if (o.output_dir) cfg.output_dir = *o.output_dir;
    if (o.seed) cfg.seed = *o.seed;
    if (o.max_iter) cfg.solve.max_iter = *o.max_iter;
    if (o.max_seconds) cfg.solve.max_seconds = *o.max_seconds;
    if (o.retain_trace) cfg.retain_trace = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Picard solver and hypothesis diagnostics for tripled systems of integral equations"};
    app.require_subcommand(1);

    Overrides o;
    auto* solve = app.add_subcommand("solve", "iterate to the fixed point; writes solution.csv and report.json");
    auto* verify = app.add_subcommand("verify", "sample-check conditions (i)-(v); writes hypotheses.json");
    auto* diagnose = app.add_subcommand("diagnose", "mnc of iterate windows and the axiom suite; writes mnc.json, diam.csv");
    app.add_subcommand("list-problems", "print the registered problems and their parameters");
    add_common(solve, o);
    add_common(verify, o);
    add_common(diagnose, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : tripled::kExitError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "list-problems") {
        tripled::list_problems(std::cout);
        return tripled::kExitOk;
    }

    tripled::RunConfig cfg;
    try {
        cfg = resolve(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return tripled::kExitError;
    }
    if (name == "solve") return tripled::cmd_solve(cfg);
    if (name == "verify") return tripled::cmd_verify(cfg);
    return tripled::cmd_diagnose(cfg);
}
