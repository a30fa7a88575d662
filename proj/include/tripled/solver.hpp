#pragma once

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/mnc.hpp"
#include "tripled/operators.hpp"
#include "tripled/problems.hpp"
#include "tripled/quadrature.hpp"
#include "tripled/random.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tripled {

enum class InitPolicy {
    SampledG,  // (g1, g2, g3) on the grid
    Zero,
    Custom,
};

struct SolveConfig {
    double tol = 1e-8;
    int max_iter = 500;
    /// next = (1 - damping) state + damping T(state)
    double damping = 1.0;
    InitPolicy init = InitPolicy::SampledG;
    std::optional<TripleState> custom_init;
    bool retain_trace = false;
    /// Wall-clock budget in seconds, 0 for none. Checked after each iteration.
    double max_seconds = 0.0;

    void validate() const {
        if (!(tol > 0.0)) throw ValidationError("solve.tol must be > 0");
        if (max_iter < 1) throw ValidationError("solve.max_iter must be >= 1");
        if (!(damping > 0.0) || damping > 1.0) throw ValidationError("solve.damping must lie in (0, 1]");
        if (!(max_seconds >= 0.0)) throw ValidationError("solve.max_seconds must be >= 0");
        if (init == InitPolicy::Custom && !custom_init) {
            throw ValidationError("solve.init = custom requires an initial state");
        }
    }
};

inline constexpr double kDivergenceFactor = 1e6;

enum class SolveStatus {
    Converged,
    /// Iteration cap reached with bounded residuals.
    Inconclusive,
    /// Wall-clock budget reached before convergence.
    TimeBudget,
};

inline const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Inconclusive: return "inconclusive";
        case SolveStatus::TimeBudget: return "time_budget";
    }
    return "unknown";
}

struct WindowMnc {
    std::size_t start = 0;
    std::array<MncReport, 3> components;
    /// Max-combined mu over the three components.
    double product_mu = 0.0;
};

struct SolveReport {
    /// Last state whose residual was measured; residual(final) == residuals.back().
    TripleState final;
    std::vector<double> residuals;
    int iterations = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::Inconclusive;
    std::vector<WindowMnc> mnc_trace;
    std::size_t extension_hits = 0;
    /// States 0..iterations-1 when SolveConfig::retain_trace is set.
    std::vector<TripleState> trace;
};

inline TripleState initial_state(const ProblemSpec& spec, const Grid& grid, const SolveConfig& cfg) {
    switch (cfg.init) {
        case InitPolicy::SampledG:
            return {GridFunction::sample(grid, spec.components[0].g), GridFunction::sample(grid, spec.components[1].g),
                    GridFunction::sample(grid, spec.components[2].g)};
        case InitPolicy::Zero: return TripleState::constant(grid, 0.0);
        case InitPolicy::Custom:
            if (!(cfg.custom_init->grid() == grid)) throw ContractViolation("custom initial state is on another grid");
            return *cfg.custom_init;
    }
    throw ValidationError("unknown init policy");
}

/// Damped successive approximation state <- (1 - theta) state + theta T(state).
inline SolveReport picard_solve(const ProblemSpec& spec, const Grid& grid, const SolveConfig& cfg,
                                const QuadConfig& qcfg = {}) {
    cfg.validate();
    qcfg.validate();
    const auto started = std::chrono::steady_clock::now();

    TripleState state = initial_state(spec, grid, cfg);
    std::vector<double> residuals;
    std::vector<TripleState> trace;
    std::size_t hits = 0;
    SolveStatus status = SolveStatus::Inconclusive;

    for (int n = 0; n < cfg.max_iter; ++n) {
        OperatorEval ev = apply_T(spec, state, qcfg);
        hits += ev.extension_hits;
        const double r = max_component_dist(ev.output, state);
        residuals.push_back(r);
        if (cfg.retain_trace) trace.push_back(state);

        if (r <= cfg.tol) {
            status = SolveStatus::Converged;
            break;
        }
        if (r > kDivergenceFactor * (1.0 + residuals.front())) {
            throw DivergenceError("picard_solve: residual " + format_real(r) + " exceeds divergence guard at iteration " +
                                      std::to_string(n),
                                  residuals);
        }
        if (n + 1 == cfg.max_iter) break;
        if (cfg.max_seconds > 0.0) {
            const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            if (elapsed > cfg.max_seconds) {
                status = SolveStatus::TimeBudget;
                break;
            }
        }
        state = cfg.damping == 1.0 ? std::move(ev.output) : blend(state, ev.output, cfg.damping);
    }

    SolveReport rep{std::move(state), std::move(residuals), 0, status == SolveStatus::Converged, status, {}, hits,
                    std::move(trace)};
    rep.iterations = static_cast<int>(rep.residuals.size());
    return rep;
}

// Contraction probe ---------------------------------------------------------------

struct ProbeReport {
    double max_ratio = 0.0;
    std::size_t witness_pair = 0;
    std::size_t witness_component = 0;  // 1-based
    double witness_distance = 0.0;
    std::optional<TripleState> witness_a;
    std::optional<TripleState> witness_b;
    std::size_t pairs_used = 0;
    std::size_t pairs_skipped = 0;
    /// floor(log10(distance)) -> max ratio seen in that bucket.
    std::map<int, double> bucket_max_ratio;
};

inline constexpr double kDegeneratePairDistance = 1e-12;

/// Empirical Lipschitz ratios ||T_i(a) - T_i(b)|| / max-component-dist(a, b) over random smooth
/// state pairs bounded by `bound`.
inline ProbeReport contraction_probe(const ProblemSpec& spec, const Grid& grid, std::size_t n_pairs, std::uint64_t seed,
                                     const QuadConfig& qcfg = {}, double bound = 1.0) {
    if (n_pairs < 1) throw DomainError("contraction_probe: n_pairs must be >= 1");
    Rng rng(seed);
    ProbeReport rep;
    bool have = false;
    for (std::size_t p = 0; p < n_pairs; ++p) {
        TripleState a = random_state(grid, bound, rng);
        TripleState b = random_state(grid, bound, rng);
        const double d = max_component_dist(a, b);
        if (d < kDegeneratePairDistance) {
            ++rep.pairs_skipped;
            continue;
        }
        ++rep.pairs_used;
        const TripleState Ta = apply_T(spec, a, qcfg).output;
        const TripleState Tb = apply_T(spec, b, qcfg).output;
        const int bucket = static_cast<int>(std::floor(std::log10(d)));
        for (std::size_t i = 0; i < 3; ++i) {
            const double ratio = sup_dist(Ta.component(i), Tb.component(i)) / d;
            auto [it, inserted] = rep.bucket_max_ratio.emplace(bucket, ratio);
            if (!inserted) it->second = std::max(it->second, ratio);
            if (!have || ratio > rep.max_ratio) {
                have = true;
                rep.max_ratio = ratio;
                rep.witness_pair = p;
                rep.witness_component = i + 1;
                rep.witness_distance = d;
                rep.witness_a = a;
                rep.witness_b = b;
            }
        }
    }
    if (rep.pairs_used == 0) throw InsufficientSamples("contraction_probe: every sampled pair was degenerate");
    return rep;
}

// Iterate-set diagnostic ----------------------------------------------------------

/// mnc estimates of the sliding windows {state_n, ..., state_{n+window-1}} of a retained trace.
inline std::vector<WindowMnc> iterate_set_diagnostic(const SolveReport& report, std::size_t window,
                                                     const MncParams& params = {}) {
    if (window < 1) throw DomainError("iterate_set_diagnostic: window must be >= 1");
    if (report.trace.empty()) {
        throw UsageError("iterate_set_diagnostic: the solve did not retain its trace (set retain_trace)");
    }
    if (report.trace.size() < window) {
        throw UsageError("iterate_set_diagnostic: trace holds " + std::to_string(report.trace.size()) +
                         " states, fewer than the window " + std::to_string(window));
    }
    std::vector<WindowMnc> out;
    for (std::size_t n = 0; n + window <= report.trace.size(); ++n) {
        WindowMnc w;
        w.start = n;
        for (std::size_t i = 0; i < 3; ++i) {
            Family F;
            F.reserve(window);
            for (std::size_t m = n; m < n + window; ++m) F.push_back(report.trace[m].component(i));
            w.components[i] = mnc_estimate(F, params);
        }
        w.product_mu = product_mnc(w.components, Combiner::Max);
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace tripled
