#pragma once

// JSON and CSV writers for the run artifacts. JSON uses nlohmann/json, whose number
// output is the shortest text that round-trips the double; CSV uses 17 significant digits.

#include "tripled/funcspace.hpp"
#include "tripled/hypotheses.hpp"
#include "tripled/mnc.hpp"
#include "tripled/solver.hpp"

#include "json.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <vector>

namespace tripled {

using json = nlohmann::ordered_json;

inline json to_json(const Grid& g) { return {{"t_max", g.t_max()}, {"n_nodes", g.size()}}; }

inline json to_json(const MncReport& r) {
    return {{"omega0_est", r.omega0_est}, {"tail_diam_est", r.tail_diam_est}, {"mu_est", r.mu_est},
            {"k_ladder", r.k_ladder},     {"eps_ladder", r.eps_ladder},       {"omega_table", r.omega_table}};
}

inline json to_json(const WindowMnc& w) {
    json comps = json::array();
    for (const auto& c : w.components) comps.push_back(to_json(c));
    return {{"start", w.start}, {"product_mu", w.product_mu}, {"components", comps}};
}

inline json to_json(const AxiomSuiteReport& a) {
    json fails = json::array();
    for (const auto& f : a.failures) {
        fails.push_back({{"trial", f.trial},
                         {"check", f.check},
                         {"lambda", std::isnan(f.lambda) ? json(nullptr) : json(f.lambda)},
                         {"lhs", f.lhs},
                         {"rhs", f.rhs}});
    }
    return {{"n_trials", a.n_trials},
            {"subset_pass", a.subset_pass},
            {"convex_pass", a.convex_pass},
            {"all_passed", a.all_passed()},
            {"failures", fails}};
}

inline json to_json(const CheckResult& c) {
    return {{"status", to_string(c.status)}, {"witness", c.witness}, {"detail", c.detail}, {"measured", c.measured}};
}

inline json to_json(const HypothesisReport& r) {
    json conds = json::array();
    for (const auto& c : r.conditions) {
        conds.push_back({{"name", c.name},
                         {"status", to_string(c.status)},
                         {"component", c.component},
                         {"witness", c.witness},
                         {"notes", c.notes}});
    }
    json comps = json::array();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& d = r.D[i];
        const auto& dc = r.decay[i];
        comps.push_back({{"component", i + 1},
                         {"holder", to_json(r.holder[i])},
                         {"f_bound", to_json(r.f_bound[i])},
                         {"M", r.M[i]},
                         {"D", {{"empirical_lower_bound", d.empirical},
                                {"witness_t", d.witness_t},
                                {"certified_upper_bound",
                                 d.certified_upper ? json(*d.certified_upper) : json(nullptr)}}},
                         {"kernel_decay", {{"t", dc.t},
                                           {"max_diff_integral", dc.max_diff_integral},
                                           {"envelope", dc.envelope},
                                           {"result", to_json(dc.result)}}},
                         {"kernel_majorant", to_json(r.kernel_majorant[i])}});
    }
    return {{"conditions", conds},
            {"any_violated", r.any_violated()},
            {"components", comps},
            {"constants", {{"G", r.constants_used.G}, {"M", r.constants_used.M}, {"D", r.constants_used.D}}},
            {"r0", r.r0 ? json(*r.r0) : json(nullptr)}};
}

/// Columns `t,x,y,z`.
inline void write_solution_csv(std::ostream& os, const TripleState& s) {
    os << "t,x,y,z\n";
    for (std::size_t k = 0; k < s.grid().size(); ++k) {
        os << format_real(s.grid().node(k)) << ',' << format_real(s.x()[k]) << ',' << format_real(s.y()[k]) << ','
           << format_real(s.z()[k]) << '\n';
    }
}

inline void write_two_column_csv(std::ostream& os, const char* header, const std::vector<double>& a,
                                 const std::vector<double>& b) {
    os << header << '\n';
    for (std::size_t k = 0; k < a.size(); ++k) os << format_real(a[k]) << ',' << format_real(b[k]) << '\n';
}

}  // namespace tripled
