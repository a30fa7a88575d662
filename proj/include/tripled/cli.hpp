#pragma once

// Run configuration and the solve / verify / diagnose pipelines behind the command-line tool.
// Exit codes: 0 success, 1 error or violated condition, 2 inconclusive solve.

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/hypotheses.hpp"
#include "tripled/io.hpp"
#include "tripled/mnc.hpp"
#include "tripled/problems.hpp"
#include "tripled/quadrature.hpp"
#include "tripled/solver.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace tripled {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInconclusive = 2;

struct DiagnoseConfig {
    std::size_t window = 5;
    std::size_t axiom_trials = 100;
};

struct RunConfig {
    ProblemId problem{"paper_example", {}};
    double t_max = 20.0;
    std::size_t n_nodes = 2001;
    SolveConfig solve;
    QuadConfig quad;
    MncParams mnc;
    VerifyConfig verify;
    DiagnoseConfig diagnose;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 42;
    bool retain_trace = false;

    Grid grid() const { return Grid(t_max, n_nodes); }
};

namespace detail {

inline std::string line_col(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
void read_key(const json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError("config key '" + path + key + "': " + e.what());
    }
}

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw ValidationError("config key '" + path + "' must be an object");
    for (const auto& [k, v] : obj.items()) {
        if (std::find_if(known.begin(), known.end(), [&](const char* s) { return k == s; }) == known.end()) {
            throw ValidationError("unknown config key '" + path + k + "'");
        }
    }
}

}  // namespace detail

/// Parses the JSON config document. Absent keys keep their defaults.
inline RunConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config parse error at " + detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                              e.what());
    }
    RunConfig cfg;
    detail::reject_unknown(doc, "",
                           {"problem", "grid", "solve", "quad", "mnc", "verify", "diagnose", "output_dir", "seed",
                            "retain_trace"});
    if (doc.contains("problem")) {
        const auto& p = doc["problem"];
        detail::reject_unknown(p, "problem.", {"name", "parameters"});
        detail::read_key(p, "name", "problem.", cfg.problem.name);
        detail::read_key(p, "parameters", "problem.", cfg.problem.parameters);
    }
    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        detail::reject_unknown(g, "grid.", {"t_max", "n_nodes"});
        detail::read_key(g, "t_max", "grid.", cfg.t_max);
        detail::read_key(g, "n_nodes", "grid.", cfg.n_nodes);
    }
    if (doc.contains("solve")) {
        const auto& s = doc["solve"];
        detail::reject_unknown(s, "solve.", {"tol", "max_iter", "damping", "init", "max_seconds"});
        detail::read_key(s, "tol", "solve.", cfg.solve.tol);
        detail::read_key(s, "max_iter", "solve.", cfg.solve.max_iter);
        detail::read_key(s, "damping", "solve.", cfg.solve.damping);
        detail::read_key(s, "max_seconds", "solve.", cfg.solve.max_seconds);
        std::string init = "g";
        detail::read_key(s, "init", "solve.", init);
        if (init == "g") cfg.solve.init = InitPolicy::SampledG;
        else if (init == "zero") cfg.solve.init = InitPolicy::Zero;
        else throw ValidationError("config key 'solve.init' must be \"g\" or \"zero\"");
    }
    if (doc.contains("quad")) {
        const auto& q = doc["quad"];
        detail::reject_unknown(q, "quad.", {"base_panels", "rel_tol", "abs_tol", "max_refine"});
        detail::read_key(q, "base_panels", "quad.", cfg.quad.base_panels);
        detail::read_key(q, "rel_tol", "quad.", cfg.quad.rel_tol);
        detail::read_key(q, "abs_tol", "quad.", cfg.quad.abs_tol);
        detail::read_key(q, "max_refine", "quad.", cfg.quad.max_refine);
    }
    if (doc.contains("mnc")) {
        const auto& m = doc["mnc"];
        detail::reject_unknown(m, "mnc.", {"eps_ladder", "k_ladder", "tail_start"});
        detail::read_key(m, "eps_ladder", "mnc.", cfg.mnc.eps_ladder);
        detail::read_key(m, "k_ladder", "mnc.", cfg.mnc.k_ladder);
        detail::read_key(m, "tail_start", "mnc.", cfg.mnc.tail_start);
    }
    if (doc.contains("verify")) {
        const auto& v = doc["verify"];
        detail::reject_unknown(v, "verify.",
                               {"warp_samples", "holder_samples", "holder_range", "f_samples", "f_box", "d_states",
                                "decay_pairs", "decay_ladder", "majorant_samples", "majorant_time_bound",
                                "majorant_value_bound", "state_bound"});
        detail::read_key(v, "warp_samples", "verify.", cfg.verify.warp_samples);
        detail::read_key(v, "holder_samples", "verify.", cfg.verify.holder_samples);
        detail::read_key(v, "holder_range", "verify.", cfg.verify.holder_range);
        detail::read_key(v, "f_samples", "verify.", cfg.verify.f_samples);
        detail::read_key(v, "f_box", "verify.", cfg.verify.f_box);
        detail::read_key(v, "d_states", "verify.", cfg.verify.d_states);
        detail::read_key(v, "decay_pairs", "verify.", cfg.verify.decay_pairs);
        detail::read_key(v, "decay_ladder", "verify.", cfg.verify.decay_ladder);
        detail::read_key(v, "majorant_samples", "verify.", cfg.verify.majorant_samples);
        detail::read_key(v, "majorant_time_bound", "verify.", cfg.verify.majorant_time_bound);
        detail::read_key(v, "majorant_value_bound", "verify.", cfg.verify.majorant_value_bound);
        detail::read_key(v, "state_bound", "verify.", cfg.verify.state_bound);
    }
    if (doc.contains("diagnose")) {
        const auto& d = doc["diagnose"];
        detail::reject_unknown(d, "diagnose.", {"window", "axiom_trials"});
        detail::read_key(d, "window", "diagnose.", cfg.diagnose.window);
        detail::read_key(d, "axiom_trials", "diagnose.", cfg.diagnose.axiom_trials);
    }
    std::string out = cfg.output_dir.string();
    detail::read_key(doc, "output_dir", "", out);
    cfg.output_dir = out;
    detail::read_key(doc, "seed", "", cfg.seed);
    detail::read_key(doc, "retain_trace", "", cfg.retain_trace);
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/// Checks every sub-config invariant and prepares the output directory.
inline void validate_config(const RunConfig& cfg) {
    (void)cfg.grid();
    cfg.solve.validate();
    cfg.quad.validate();
    cfg.mnc.validate(cfg.grid());
    if (cfg.diagnose.window < 1) throw ValidationError("diagnose.window must be >= 1");
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec || !std::filesystem::is_directory(cfg.output_dir)) {
        throw ValidationError("output_dir '" + cfg.output_dir.string() + "' is not writable");
    }
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out << text;
}

inline void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

inline json problem_json(const RunConfig& cfg) {
    return {{"name", cfg.problem.name}, {"parameters", cfg.problem.parameters}};
}

inline json solve_summary(const RunConfig& cfg, const SolveReport& rep) {
    return {{"problem", problem_json(cfg)},
            {"grid", to_json(cfg.grid())},
            {"tol", cfg.solve.tol},
            {"damping", cfg.solve.damping},
            {"max_iter", cfg.solve.max_iter},
            {"status", to_string(rep.status)},
            {"converged", rep.converged},
            {"iterations", rep.iterations},
            {"final_residual", rep.residuals.back()},
            {"divergence_guard_factor", kDivergenceFactor},
            {"extension_hits", rep.extension_hits},
            {"residuals", rep.residuals}};
}

template <class Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch (const DivergenceError& e) {
        log << "error: " << e.what() << " (" << e.residuals().size() << " residuals recorded)\n";
    } catch (const ToleranceNotMet& e) {
        log << "error: " << e.what() << '\n';
    } catch (const Error& e) {
        log << "error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
    }
    return kExitError;
}

}  // namespace detail

/// Writes solution.csv and report.json. Exit 0 converged, 2 inconclusive, 1 error.
inline int cmd_solve(const RunConfig& cfg, std::ostream& log = std::cerr) {
    return detail::guarded(log, [&] {
        validate_config(cfg);
        const ProblemSpec spec = get_problem(cfg.problem);
        const Grid grid = cfg.grid();
        SolveConfig scfg = cfg.solve;
        scfg.retain_trace = false;
        const SolveReport rep = picard_solve(spec, grid, scfg, cfg.quad);

        std::ostringstream csv;
        write_solution_csv(csv, rep.final);
        detail::write_text(cfg.output_dir / "solution.csv", csv.str());
        detail::write_json(cfg.output_dir / "report.json", detail::solve_summary(cfg, rep));
        log << "solve: " << to_string(rep.status) << " after " << rep.iterations << " iterations, residual "
            << format_real(rep.residuals.back()) << '\n';
        return rep.converged ? kExitOk : kExitInconclusive;
    });
}

/// Writes hypotheses.json and decay_{1,2,3}.csv. Exit 0 iff no condition is violated.
inline int cmd_verify(const RunConfig& cfg, std::ostream& log = std::cerr) {
    return detail::guarded(log, [&] {
        validate_config(cfg);
        const ProblemSpec spec = get_problem(cfg.problem);
        const HypothesisReport rep = verify_hypotheses(spec, cfg.grid(), cfg.verify, cfg.quad, cfg.seed);
        json j = to_json(rep);
        j["problem"] = detail::problem_json(cfg);
        j["grid"] = to_json(cfg.grid());
        j["seed"] = cfg.seed;
        detail::write_json(cfg.output_dir / "hypotheses.json", j);
        for (std::size_t i = 0; i < 3; ++i) {
            std::ostringstream csv;
            write_two_column_csv(csv, "t,max_diff_integral", rep.decay[i].t, rep.decay[i].max_diff_integral);
            detail::write_text(cfg.output_dir / ("decay_" + std::to_string(i + 1) + ".csv"), csv.str());
        }
        for (const auto& c : rep.conditions) log << "condition " << c.name << ": " << to_string(c.status) << '\n';
        return rep.any_violated() ? kExitError : kExitOk;
    });
}

/// Writes mnc.json and diam.csv. Exit 0 iff the axiom suite passes every trial.
inline int cmd_diagnose(const RunConfig& cfg, std::ostream& log = std::cerr) {
    return detail::guarded(log, [&] {
        if (!cfg.retain_trace) {
            throw UsageError("diagnose needs retain_trace = true (iterate diagnostics read the solver trace)");
        }
        validate_config(cfg);
        const ProblemSpec spec = get_problem(cfg.problem);
        const Grid grid = cfg.grid();
        SolveConfig scfg = cfg.solve;
        scfg.retain_trace = true;
        SolveReport rep = picard_solve(spec, grid, scfg, cfg.quad);

        json windows = json::array();
        std::string window_note;
        if (rep.trace.size() >= cfg.diagnose.window) {
            rep.mnc_trace = iterate_set_diagnostic(rep, cfg.diagnose.window, cfg.mnc);
            for (const auto& w : rep.mnc_trace) windows.push_back(to_json(w));
        } else {
            window_note = "trace shorter than the window; no window estimates";
        }

        const AxiomSuiteReport axioms = axiom_suite(default_family_generator, cfg.diagnose.axiom_trials, cfg.seed);

        json j;
        j["problem"] = detail::problem_json(cfg);
        j["solve"] = detail::solve_summary(cfg, rep);
        j["window"] = cfg.diagnose.window;
        j["windows"] = windows;
        if (!window_note.empty()) j["windows_note"] = window_note;
        j["axiom_suite"] = to_json(axioms);
        j["seed"] = cfg.seed;
        detail::write_json(cfg.output_dir / "mnc.json", j);

        // diam over the whole retained iterate set, max over the three components
        std::vector<double> diam(grid.size(), 0.0);
        for (std::size_t i = 0; i < 3; ++i) {
            Family F;
            for (const auto& s : rep.trace) F.push_back(s.component(i));
            const auto prof = diam_profile(F);
            for (std::size_t k = 0; k < diam.size(); ++k) diam[k] = std::max(diam[k], prof[k]);
        }
        std::ostringstream csv;
        write_two_column_csv(csv, "t,diam", grid.nodes(), diam);
        detail::write_text(cfg.output_dir / "diam.csv", csv.str());

        log << "diagnose: " << rep.mnc_trace.size() << " windows, axiom suite " << axioms.subset_pass << "/"
            << axioms.n_trials << " subset, " << axioms.convex_pass << "/" << axioms.n_trials << " convex\n";
        return axioms.all_passed() ? kExitOk : kExitError;
    });
}

inline void list_problems(std::ostream& os) {
    for (const auto& [name, entry] : ProblemRegistry::builtin().entries()) {
        os << name;
        for (const auto& [k, v] : entry.defaults) os << ' ' << k << '=' << format_real(v);
        os << "\n    " << entry.description << '\n';
    }
}

}  // namespace tripled
