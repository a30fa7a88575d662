#pragma once

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/problems.hpp"
#include "tripled/quadrature.hpp"
#include "tripled/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace tripled {

/// Sampling can only ever support "verified-on-samples"; conditions that cannot be
/// observed at all on a finite horizon are "advisory".
enum class Status { VerifiedOnSamples, Violated, Advisory };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::VerifiedOnSamples: return "verified-on-samples";
        case Status::Violated: return "violated";
        case Status::Advisory: return "advisory";
    }
    return "unknown";
}

struct CheckResult {
    Status status = Status::VerifiedOnSamples;
    std::vector<double> witness;
    std::string detail;
    /// Check-specific measured constant (empirical delta, worst ratio, ...).
    double measured = 0.0;
};

inline constexpr double kCheckSlack = 1e-12;

// (ii) Hoelder continuity of psi ------------------------------------------------------

/// Excess |psi(a) - psi(b)| - delta |a - b|^alpha; positive beyond the slack means violated.
inline double holder_excess(const ScalarMap& psi, double delta, double alpha, double a, double b) {
    return std::abs(psi(a) - psi(b)) - delta * std::pow(std::abs(a - b), alpha);
}

/// Samples pairs in [0, range_bound]. The witness is the violating pair with the largest
/// ratio |psi(a) - psi(b)| / (delta |a - b|^alpha); `measured` is the largest sampled
/// |psi(a) - psi(b)| / |a - b|^alpha.
inline CheckResult check_holder(const ScalarMap& psi, double delta, double alpha, std::size_t n_samples,
                                double range_bound, std::uint64_t seed) {
    if (!(delta > 0.0) || !(alpha > 0.0)) throw DomainError("check_holder: delta and alpha must be positive");
    Rng rng(seed);
    CheckResult res;
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double a = uniform(rng, 0.0, range_bound);
        const double b = uniform(rng, 0.0, range_bound);
        const double gap = std::pow(std::abs(a - b), alpha);
        if (gap > 0.0) res.measured = std::max(res.measured, std::abs(psi(a) - psi(b)) / gap);
        if (holder_excess(psi, delta, alpha, a, b) > kCheckSlack) {
            const double ratio = std::abs(psi(a) - psi(b)) / (delta * gap);
            if (res.status != Status::Violated || ratio > worst_ratio) {
                res.status = Status::Violated;
                res.witness = {a, b};
                worst_ratio = ratio;
            }
        }
    }
    if (res.status == Status::Violated) {
        res.detail = "|psi(a) - psi(b)| exceeds delta |a - b|^alpha by a factor " + format_real(worst_ratio);
    }
    return res;
}

// (iii) Comparison bound on f --------------------------------------------------------

/// Excess of |f(t, a) - f(t, b)| over phi(max_k<3 |a_k - b_k|) + Phi(|a_3 - b_3|).
inline double f_bound_excess(const ComponentSpec& c, double t, const std::array<double, 4>& a,
                             const std::array<double, 4>& b) {
    const double lhs = std::abs(c.f(t, a[0], a[1], a[2], a[3]) - c.f(t, b[0], b[1], b[2], b[3]));
    const double m = std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
    return lhs - (c.phi(m) + c.Phi(std::abs(a[3] - b[3])));
}

/// Samples t in [0, box_bound] and argument tuples in [-box_bound, box_bound]^4.
/// Witness layout: (t, a0..a3, b0..b3).
inline CheckResult check_f_bound(const ProblemSpec& spec, std::size_t i, std::size_t n_samples, double box_bound,
                                 std::uint64_t seed) {
    const auto& c = spec.component(i);
    Rng rng(seed);
    CheckResult res;
    double worst = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t = uniform(rng, 0.0, box_bound);
        std::array<double, 4> a{};
        std::array<double, 4> b{};
        for (auto& v : a) v = uniform(rng, -box_bound, box_bound);
        for (auto& v : b) v = uniform(rng, -box_bound, box_bound);
        const double excess = f_bound_excess(c, t, a, b);
        res.measured = std::max(res.measured, excess);
        if (excess > kCheckSlack && excess > worst) {
            worst = excess;
            res.status = Status::Violated;
            res.witness = {t, a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]};
        }
    }
    if (res.status == Status::Violated) res.detail = "f difference exceeds phi + Phi by " + format_real(worst);
    return res;
}

// (iv) M_i -------------------------------------------------------------------------

/// max over nodes of |f_i(t, 0, 0, 0, 0)|.
inline double check_M(const ProblemSpec& spec, std::size_t i, const Grid& grid) {
    const auto& c = spec.component(i);
    double m = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid.node(k);
        const double v = c.f(t, 0.0, 0.0, 0.0, 0.0);
        if (!std::isfinite(v)) throw NumericError("check_M: f_" + std::to_string(i + 1) + "(" + format_real(t) + ", 0) is not finite");
        m = std::max(m, std::abs(v));
    }
    return m;
}

// (v) D and kernel decay -------------------------------------------------------------

struct DEstimate {
    /// max |int_0^{q(t)} h| over sampled states and grid nodes: a lower bound for the true sup.
    double empirical = 0.0;
    double witness_t = 0.0;
    /// max over nodes of int_0^{q(t)} |h| majorant, when the problem declares one.
    std::optional<double> certified_upper;
};

inline DEstimate check_D(const ProblemSpec& spec, std::size_t i, std::size_t n_states, const Grid& grid,
                         const QuadConfig& qcfg, std::uint64_t seed, double bound = 1.0) {
    if (n_states < 1) throw DomainError("check_D: n_states must be >= 1");
    const auto& c = spec.component(i);
    Rng rng(seed);
    DEstimate est;
    const std::vector<double> breaks = warp_breakpoints(c.eta, grid);
    for (std::size_t m = 0; m < n_states; ++m) {
        const TripleState state = random_state(grid, bound, rng);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double t = grid.node(k);
            const double v = std::abs(integrate_kernel(spec, i, state, t, qcfg, nullptr, &breaks));
            if (v > est.empirical) {
                est.empirical = v;
                est.witness_t = t;
            }
        }
    }
    if (c.kernel_abs_majorant) {
        double up = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double t = grid.node(k);
            const auto& maj = c.kernel_abs_majorant;
            up = std::max(up, integrate_scalar([&](double s) { return maj(t, s); }, 0.0, c.q(t), qcfg));
        }
        est.certified_upper = up;
    }
    return est;
}

struct DecayCurve {
    std::vector<double> t;
    /// max over state pairs of |int_0^{q(t)} [h(.., a) - h(.., b)] ds|; +inf where non-finite.
    std::vector<double> max_diff_integral;
    /// int_0^{q(t)} kernel_diff_majorant(t, s) ds when declared.
    std::vector<double> envelope;
    CheckResult result;
};

inline constexpr double kDecayThreshold = 1e-6;

/// Decay of the kernel-difference integral along t_ladder for random smooth state pairs
/// bounded by `bound`. States live on a 1001-node grid over [0, max(t_ladder)].
/// Verified when the last value is below 1e-6 and the last three values are nonincreasing.
inline DecayCurve check_kernel_decay(const ProblemSpec& spec, std::size_t i, std::size_t n_pairs,
                                     const std::vector<double>& t_ladder, const QuadConfig& qcfg, std::uint64_t seed,
                                     double bound = 1.0) {
    if (t_ladder.empty()) throw DomainError("check_kernel_decay: empty ladder");
    for (std::size_t k = 0; k < t_ladder.size(); ++k) {
        if (!(t_ladder[k] > 0.0) || (k > 0 && !(t_ladder[k] > t_ladder[k - 1]))) {
            throw DomainError("check_kernel_decay: ladder must be positive and increasing");
        }
    }
    if (n_pairs < 1) throw DomainError("check_kernel_decay: n_pairs must be >= 1");
    const auto& c = spec.component(i);
    const Grid grid(t_ladder.back(), 1001);
    const std::vector<double> breaks = warp_breakpoints(c.eta, grid);
    Rng rng(seed);
    std::vector<std::pair<TripleState, TripleState>> pairs;
    pairs.reserve(n_pairs);
    for (std::size_t p = 0; p < n_pairs; ++p) {
        TripleState a = random_state(grid, bound, rng);
        TripleState b = random_state(grid, bound, rng);
        pairs.emplace_back(std::move(a), std::move(b));
    }

    DecayCurve curve;
    curve.t = t_ladder;
    std::optional<std::pair<double, std::size_t>> nonfinite;  // (t, pair)
    for (double t : t_ladder) {
        const double upper = c.q(t);
        double worst = 0.0;
        for (std::size_t p = 0; p < pairs.size() && std::isfinite(worst); ++p) {
            const auto& [a, b] = pairs[p];
            auto diff = [&](double s) {
                const double e = c.eta(s);
                return c.h(t, s, a.x().eval_unchecked(e), a.y().eval_unchecked(e), a.z().eval_unchecked(e)) -
                       c.h(t, s, b.x().eval_unchecked(e), b.y().eval_unchecked(e), b.z().eval_unchecked(e));
            };
            try {
                worst = std::max(worst, std::abs(integrate_scalar(diff, 0.0, upper, qcfg, breaks)));
            } catch (const NumericError&) {
                worst = std::numeric_limits<double>::infinity();
                if (!nonfinite) nonfinite = std::make_pair(t, p);
            }
        }
        curve.max_diff_integral.push_back(worst);
        if (c.kernel_diff_majorant) {
            const auto& maj = c.kernel_diff_majorant;
            double env = std::numeric_limits<double>::infinity();
            try {
                env = integrate_scalar([&](double s) { return maj(t, s); }, 0.0, upper, qcfg);
            } catch (const NumericError&) {
            }
            curve.envelope.push_back(env);
        }
    }

    const auto& v = curve.max_diff_integral;
    const std::size_t n = v.size();
    bool tail_nonincreasing = true;
    for (std::size_t k = (n >= 3 ? n - 2 : 1); k < n; ++k) {
        if (!(v[k] <= v[k - 1])) tail_nonincreasing = false;
    }
    if (nonfinite) {
        curve.result.status = Status::Violated;
        curve.result.witness = {nonfinite->first, static_cast<double>(nonfinite->second)};
        curve.result.detail = "kernel-difference integral is not finite at t = " + format_real(nonfinite->first);
    } else if (!(v.back() < kDecayThreshold) || !tail_nonincreasing) {
        curve.result.status = Status::Violated;
        curve.result.witness = {t_ladder.back(), v.back()};
        curve.result.detail = v.back() < kDecayThreshold ? "curve increases over the last three ladder points"
                                                         : "curve has not fallen below 1e-6 at the last ladder point";
    } else {
        curve.result.status = Status::VerifiedOnSamples;
    }
    curve.result.measured = v.back();
    return curve;
}

// Kernel majorant spot check ---------------------------------------------------------

/// Excess of |h(t,s,x,y,z) - h(t,s,u,v,w)| over the declared difference majorant.
inline double kernel_majorant_excess(const ComponentSpec& c, double t, double s, const std::array<double, 3>& a,
                                     const std::array<double, 3>& b) {
    const double lhs = std::abs(c.h(t, s, a[0], a[1], a[2]) - c.h(t, s, b[0], b[1], b[2]));
    return lhs - c.kernel_diff_majorant(t, s);
}

/// Samples t, s in [0, time_bound] and state values in [-value_bound, value_bound].
/// Witness layout: (t, s, x, y, z, u, v, w). Advisory when no majorant is declared.
inline CheckResult check_kernel_majorant(const ProblemSpec& spec, std::size_t i, std::size_t n_samples,
                                         double time_bound, double value_bound, std::uint64_t seed) {
    const auto& c = spec.component(i);
    CheckResult res;
    if (!c.kernel_diff_majorant) {
        res.status = Status::Advisory;
        res.detail = "no kernel difference majorant declared";
        return res;
    }
    Rng rng(seed);
    double worst = 0.0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        const double t = uniform(rng, 0.0, time_bound);
        const double s = uniform(rng, 0.0, time_bound);
        std::array<double, 3> a{};
        std::array<double, 3> b{};
        for (auto& v : a) v = uniform(rng, -value_bound, value_bound);
        for (auto& v : b) v = uniform(rng, -value_bound, value_bound);
        const double excess = kernel_majorant_excess(c, t, s, a, b);
        res.measured = std::max(res.measured, excess);
        if (excess > kCheckSlack && excess > worst) {
            worst = excess;
            res.status = Status::Violated;
            res.witness = {t, s, a[0], a[1], a[2], b[0], b[1], b[2]};
        }
    }
    if (res.status == Status::Violated) res.detail = "kernel difference exceeds the declared majorant by " + format_real(worst);
    return res;
}

// Invariant ball -------------------------------------------------------------------

struct InvariantConstants {
    double G = 0.0;
    std::array<double, 3> M{0.0, 0.0, 0.0};
    double D = 0.0;
};

/// Left-hand side max_i [phi_i(r) + G + M_i + Phi_i(delta_i D^alpha_i)] of the invariant-ball inequality.
inline double invariant_ball_lhs(const ProblemSpec& spec, const InvariantConstants& k, double r) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& c = spec.components[i];
        m = std::max(m, c.phi(r) + k.G + k.M[i] + c.Phi(c.delta * std::pow(k.D, c.alpha)));
    }
    return m;
}

/// Smallest r in {2^-4, ..., 2^20} with invariant_ball_lhs(r) <= r, if any.
inline std::optional<double> find_invariant_radius(const ProblemSpec& spec, const InvariantConstants& k) {
    if (!std::isfinite(k.G) || !std::isfinite(k.D) || !std::isfinite(k.M[0]) || !std::isfinite(k.M[1]) ||
        !std::isfinite(k.M[2])) {
        return std::nullopt;
    }
    for (int e = -4; e <= 20; ++e) {
        const double r = std::ldexp(1.0, e);
        if (invariant_ball_lhs(spec, k, r) <= r) return r;
    }
    return std::nullopt;
}

// Full report -----------------------------------------------------------------------

struct VerifyConfig {
    std::size_t warp_samples = 1000;
    std::size_t holder_samples = 10000;
    double holder_range = 100.0;
    std::size_t f_samples = 10000;
    double f_box = 10.0;
    std::size_t d_states = 8;
    std::size_t decay_pairs = 10;
    std::vector<double> decay_ladder{10.0, 20.0, 30.0, 40.0, 50.0};
    std::size_t majorant_samples = 10000;
    double majorant_time_bound = 10.0;
    double majorant_value_bound = 10.0;
    /// Sup bound of the random states used for D and decay.
    double state_bound = 1.0;
};

struct ConditionReport {
    std::string name;  // "(i)" ... "(v)"
    Status status = Status::VerifiedOnSamples;
    std::vector<double> witness;
    int component = 0;  // 1-based component of the witness, 0 if none
    std::vector<std::string> notes;
};

struct HypothesisReport {
    std::array<ConditionReport, 5> conditions;
    std::array<CheckResult, 3> holder;
    std::array<CheckResult, 3> f_bound;
    std::array<double, 3> M{};
    std::array<DEstimate, 3> D{};
    std::array<DecayCurve, 3> decay;
    std::array<CheckResult, 3> kernel_majorant;
    double G = 0.0;
    std::optional<double> r0;
    InvariantConstants constants_used;

    bool any_violated() const {
        return std::any_of(conditions.begin(), conditions.end(),
                           [](const ConditionReport& c) { return c.status == Status::Violated; });
    }
};

namespace detail {

inline void mark_violated(ConditionReport& c, int component, std::vector<double> witness, std::string note) {
    if (c.status != Status::Violated) {
        c.status = Status::Violated;
        c.witness = std::move(witness);
        c.component = component;
    }
    c.notes.push_back(std::move(note));
}

}  // namespace detail

/// Runs every sampled check of conditions (i)-(v) plus the invariant-radius scan.
inline HypothesisReport verify_hypotheses(const ProblemSpec& spec, const Grid& grid, const VerifyConfig& vcfg,
                                          const QuadConfig& qcfg, std::uint64_t seed) {
    HypothesisReport rep;
    const char* names[5] = {"(i)", "(ii)", "(iii)", "(iv)", "(v)"};
    for (std::size_t k = 0; k < 5; ++k) rep.conditions[k].name = names[k];
    auto& c1 = rep.conditions[0];
    auto& c2 = rep.conditions[1];
    auto& c3 = rep.conditions[2];
    auto& c4 = rep.conditions[3];
    auto& c5 = rep.conditions[4];

    // (i) warps: nonnegativity is checkable, divergence of xi is not.
    c1.status = Status::Advisory;
    for (const auto& v : validate_spec(spec, grid, vcfg.warp_samples)) {
        const std::string note = v.condition + (v.detail.empty() ? "" : ": " + v.detail);
        if (v.condition.rfind("warp", 0) == 0 || v.condition == "missing map") {
            detail::mark_violated(c1, v.component, v.witness, note);
        } else if (v.condition == "constant not positive") {
            detail::mark_violated(c2, v.component, v.witness, note);
        } else {
            detail::mark_violated(c3, v.component, v.witness, note);
        }
    }
    // Missing or negative warps make the sampled checks below meaningless.
    if (c1.status == Status::Violated) return rep;
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& xi = spec.components[i].xi;
        bool monotone = true;
        double prev = xi(0.5 * grid.t_max());
        for (std::size_t k = 1; k <= vcfg.warp_samples; ++k) {
            const double t = 0.5 * grid.t_max() * (1.0 + static_cast<double>(k) / static_cast<double>(vcfg.warp_samples));
            const double v = xi(t);
            if (v < prev) monotone = false;
            prev = v;
        }
        c1.notes.push_back("xi_" + std::to_string(i + 1) + (monotone ? " nondecreasing" : " NOT nondecreasing") +
                           " on sampled [t_max/2, t_max]; divergence at infinity is not observable");
    }

    // (ii)
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& c = spec.components[i];
        rep.holder[i] = check_holder(c.psi, c.delta, c.alpha, vcfg.holder_samples, vcfg.holder_range, seed + 11 * i);
        if (rep.holder[i].status == Status::Violated) {
            detail::mark_violated(c2, static_cast<int>(i + 1), rep.holder[i].witness, rep.holder[i].detail);
        }
    }

    // (iii)
    for (std::size_t i = 0; i < 3; ++i) {
        rep.f_bound[i] = check_f_bound(spec, i, vcfg.f_samples, vcfg.f_box, seed + 13 * i + 1);
        if (rep.f_bound[i].status == Status::Violated) {
            detail::mark_violated(c3, static_cast<int>(i + 1), rep.f_bound[i].witness, rep.f_bound[i].detail);
        }
    }

    // (iv)
    for (std::size_t i = 0; i < 3; ++i) {
        try {
            rep.M[i] = check_M(spec, i, grid);
        } catch (const NumericError& e) {
            detail::mark_violated(c4, static_cast<int>(i + 1), {}, e.what());
            rep.M[i] = std::numeric_limits<double>::infinity();
            continue;
        }
        if (spec.M[i] && rep.M[i] > *spec.M[i] + kCheckSlack) {
            detail::mark_violated(c4, static_cast<int>(i + 1), {rep.M[i]},
                                  "measured M exceeds the declared value " + format_real(*spec.M[i]));
        }
    }

    // (v)
    c5.notes.push_back("D is a sup over all of BC(R+)^3; the sampled value is a lower bound (advisory)");
    double D_for_radius = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        rep.D[i] = check_D(spec, i, vcfg.d_states, grid, qcfg, seed + 17 * i + 2, vcfg.state_bound);
        D_for_radius = std::max(D_for_radius, rep.D[i].certified_upper.value_or(rep.D[i].empirical));
        rep.decay[i] = check_kernel_decay(spec, i, vcfg.decay_pairs, vcfg.decay_ladder, qcfg, seed + 19 * i + 3,
                                          vcfg.state_bound);
        if (rep.decay[i].result.status == Status::Violated) {
            detail::mark_violated(c5, static_cast<int>(i + 1), rep.decay[i].result.witness,
                                  "kernel decay: " + rep.decay[i].result.detail);
        }
        rep.kernel_majorant[i] = check_kernel_majorant(spec, i, vcfg.majorant_samples, vcfg.majorant_time_bound,
                                                       vcfg.majorant_value_bound, seed + 23 * i + 4);
    }

    rep.G = 0.0;
    for (const auto& c : spec.components) rep.G = std::max(rep.G, sup_norm(GridFunction::sample(grid, c.g)));
    rep.constants_used.G = rep.G;
    rep.constants_used.M = rep.M;
    rep.constants_used.D = D_for_radius;
    rep.r0 = find_invariant_radius(spec, rep.constants_used);
    return rep;
}

}  // namespace tripled
