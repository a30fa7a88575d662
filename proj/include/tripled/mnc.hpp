#pragma once

// Finite-family estimators for the measure of noncompactness on BC(R+)
//
//   mu(X) = omega_0(X) + limsup_{t -> inf} diam X(t),
//   omega_0(X) = lim_{K -> inf} lim_{eps -> 0} sup_{x in X} omega^K(x, eps),
//
// with the limits replaced by ladder extremes and the limsup by a max over a trailing
// window. All reductions run in a fixed order so results are bit-reproducible.

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/random.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace tripled {

using Family = std::vector<GridFunction>;

struct MncParams {
    std::vector<double> eps_ladder{0.5, 0.2, 0.1, 0.05, 0.02, 0.01};
    /// Empty means {t_max/4, t_max/2, t_max} of whatever grid is measured.
    std::vector<double> k_ladder;
    /// Negative means 0.8 t_max.
    double tail_start = -1.0;

    std::vector<double> k_ladder_for(const Grid& g) const {
        if (k_ladder.empty()) return {g.t_max() / 4.0, g.t_max() / 2.0, g.t_max()};
        return k_ladder;
    }
    double tail_start_for(const Grid& g) const { return tail_start < 0.0 ? 0.8 * g.t_max() : tail_start; }

    void validate(const Grid& g) const {
        if (eps_ladder.empty()) throw ValidationError("mnc.eps_ladder must be nonempty");
        for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
            if (!(eps_ladder[i] > 0.0)) throw ValidationError("mnc.eps_ladder entries must be > 0");
            if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1])) {
                throw ValidationError("mnc.eps_ladder must be strictly decreasing");
            }
        }
        const auto ks = k_ladder_for(g);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (!(ks[i] > 0.0) || ks[i] > g.t_max()) throw ValidationError("mnc.k_ladder entries must lie in (0, t_max]");
            if (i > 0 && !(ks[i] > ks[i - 1])) throw ValidationError("mnc.k_ladder must be strictly increasing");
        }
        const double ts = tail_start_for(g);
        if (!(ts >= 0.0) || !(ts < g.t_max())) throw ValidationError("mnc.tail_start must lie in [0, t_max)");
    }
};

struct MncReport {
    double omega0_est = 0.0;
    double tail_diam_est = 0.0;
    double mu_est = 0.0;
    std::vector<double> k_ladder;
    std::vector<double> eps_ladder;
    /// omega_table[a][b] = family_modulus(F, k_ladder[a], eps_ladder[b]).
    std::vector<std::vector<double>> omega_table;
};

namespace detail {

// Grid-index images of k and eps. The relative slack keeps node-aligned values
// (k = 0.5 on a 0.01 grid, eps = 0.1 on a 0.1 grid) on the inclusive side.
inline std::size_t last_index_within(const Grid& g, double k) {
    const double pos = k / g.step() * (1.0 + 1e-12);
    return std::min(static_cast<std::size_t>(std::floor(pos)), g.size() - 1);
}

inline std::size_t max_index_gap(const Grid& g, double eps) {
    return static_cast<std::size_t>(std::floor(eps / g.step() * (1.0 + 1e-12)));
}

inline void require_family(std::span<const GridFunction> F, const char* where) {
    if (F.empty()) throw DomainError(std::string(where) + ": empty family");
    for (const auto& f : F) require_same_grid(F.front(), f, where);
}

}  // namespace detail

/// omega^K(f, eps): max |f(t_i) - f(t_j)| over nodes in [0, k] at most eps apart.
inline double modulus(const GridFunction& f, double k, double eps) {
    if (!(k > 0.0) || !(eps > 0.0)) throw DomainError("modulus: k and eps must be positive");
    const Grid& g = f.grid();
    const std::size_t last = detail::last_index_within(g, k);
    const std::size_t gap = detail::max_index_gap(g, eps);
    double m = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
        const std::size_t hi = std::min(last, i + gap);
        for (std::size_t j = i + 1; j <= hi; ++j) m = std::max(m, std::abs(f[j] - f[i]));
    }
    return m;
}

inline double family_modulus(std::span<const GridFunction> F, double k, double eps) {
    detail::require_family(F, "family_modulus");
    double m = 0.0;
    for (const auto& f : F) m = std::max(m, modulus(f, k, eps));
    return m;
}

/// diam F(t) = max pairwise |f_i(t) - f_j(t)|.
inline double diam_at(std::span<const GridFunction> F, double t) {
    detail::require_family(F, "diam_at");
    double lo = eval(F.front(), t);
    double hi = lo;
    for (const auto& f : F) {
        const double v = f.eval_unchecked(t);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi - lo;
}

/// diam F(t_k) at every node.
inline std::vector<double> diam_profile(std::span<const GridFunction> F) {
    detail::require_family(F, "diam_profile");
    const Grid& g = F.front().grid();
    std::vector<double> out(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        double lo = F.front()[k];
        double hi = lo;
        for (const auto& f : F) {
            lo = std::min(lo, f[k]);
            hi = std::max(hi, f[k]);
        }
        out[k] = hi - lo;
    }
    return out;
}

/// Max of diam over nodes in [tail_start, t_max].
inline double tail_diam(std::span<const GridFunction> F, const MncParams& params = {}) {
    detail::require_family(F, "tail_diam");
    const Grid& g = F.front().grid();
    const double start = params.tail_start_for(g);
    const auto profile = diam_profile(F);
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.node(k) >= start) m = std::max(m, profile[k]);
    }
    return m;
}

inline MncReport mnc_estimate(std::span<const GridFunction> F, const MncParams& params = {}) {
    detail::require_family(F, "mnc_estimate");
    const Grid& g = F.front().grid();
    params.validate(g);
    MncReport r;
    r.k_ladder = params.k_ladder_for(g);
    r.eps_ladder = params.eps_ladder;
    r.omega_table.assign(r.k_ladder.size(), std::vector<double>(r.eps_ladder.size(), 0.0));
    for (std::size_t a = 0; a < r.k_ladder.size(); ++a) {
        for (std::size_t b = 0; b < r.eps_ladder.size(); ++b) {
            r.omega_table[a][b] = family_modulus(F, r.k_ladder[a], r.eps_ladder[b]);
        }
    }
    r.omega0_est = r.omega_table.back().back();
    r.tail_diam_est = tail_diam(F, params);
    r.mu_est = r.omega0_est + r.tail_diam_est;
    return r;
}

enum class Combiner { Max, Sum };

/// Product-space measure from the three component measures.
inline double product_mnc(const std::array<MncReport, 3>& reports, Combiner combiner) {
    const double a = reports[0].mu_est, b = reports[1].mu_est, c = reports[2].mu_est;
    return combiner == Combiner::Max ? std::max({a, b, c}) : a + b + c;
}

// Axiom suite ---------------------------------------------------------------------

/// Produces a random family of `size` functions.
using FamilyGenerator = std::function<Family(Rng&, std::size_t size)>;

/// Smooth random functions plus per-node noise on [0, 10] with 201 nodes.
inline Family default_family_generator(Rng& rng, std::size_t size) {
    static const Grid grid(10.0, 201);
    Family F;
    F.reserve(size);
    for (std::size_t m = 0; m < size; ++m) {
        const double scale = uniform(rng, 0.1, 3.0);
        const double noise = uniform(rng, 0.0, 0.2);
        auto base = random_smooth_function(grid, scale, rng);
        std::vector<double> v(base.values().begin(), base.values().end());
        for (double& x : v) x += uniform(rng, -noise, noise);
        F.emplace_back(grid, std::move(v));
    }
    return F;
}

struct AxiomFailure {
    std::size_t trial;
    std::string check;  // "subset" or "convex"
    double lambda;      // NaN for subset checks
    double lhs;
    double rhs;
};

struct AxiomSuiteReport {
    std::size_t n_trials = 0;
    std::size_t subset_pass = 0;
    std::size_t convex_pass = 0;
    std::vector<AxiomFailure> failures;

    bool all_passed() const noexcept { return subset_pass == n_trials && convex_pass == n_trials; }
};

inline constexpr std::array<double, 5> kConvexLambdas{0.0, 0.25, 0.5, 0.75, 1.0};
inline constexpr double kAxiomSlack = 1e-12;

/// Checks monotonicity under inclusion and convex-combination subadditivity of mnc_estimate
/// on random families F, G of five functions each.
inline AxiomSuiteReport axiom_suite(const FamilyGenerator& generator, std::size_t n_trials, std::uint64_t seed,
                                    const MncParams& params = {}) {
    if (n_trials < 1) throw DomainError("axiom_suite: n_trials must be >= 1");
    Rng rng(seed);
    AxiomSuiteReport rep;
    rep.n_trials = n_trials;
    for (std::size_t trial = 0; trial < n_trials; ++trial) {
        const Family F = generator(rng, 5);
        const Family G = generator(rng, 5);

        // Random nonempty subset S of F, then S ⊆ F ⊆ F ∪ G.
        Family S;
        for (const auto& f : F) {
            if (uniform(rng, 0.0, 1.0) < 0.5) S.push_back(f);
        }
        if (S.empty()) S.push_back(F.front());
        Family FG = F;
        FG.insert(FG.end(), G.begin(), G.end());

        const double muS = mnc_estimate(S, params).mu_est;
        const double muF = mnc_estimate(F, params).mu_est;
        const double muG = mnc_estimate(G, params).mu_est;
        const double muFG = mnc_estimate(FG, params).mu_est;
        bool subset_ok = true;
        if (!(muS <= muF)) {
            subset_ok = false;
            rep.failures.push_back({trial, "subset", std::nan(""), muS, muF});
        }
        if (!(muF <= muFG)) {
            subset_ok = false;
            rep.failures.push_back({trial, "subset", std::nan(""), muF, muFG});
        }
        if (subset_ok) ++rep.subset_pass;

        bool convex_ok = true;
        for (double lambda : kConvexLambdas) {
            Family C;
            C.reserve(F.size());
            for (std::size_t m = 0; m < F.size(); ++m) C.push_back(blend(G[m], F[m], lambda));
            const double lhs = mnc_estimate(C, params).mu_est;
            const double rhs = lambda * muF + (1.0 - lambda) * muG;
            if (!(lhs <= rhs + kAxiomSlack)) {
                convex_ok = false;
                rep.failures.push_back({trial, "convex", lambda, lhs, rhs});
            }
        }
        if (convex_ok) ++rep.convex_pass;
    }
    return rep;
}

}  // namespace tripled
