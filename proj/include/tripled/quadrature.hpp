#pragma once

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tripled {

struct QuadConfig {
    int base_panels = 16;
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int max_refine = 20;

    void validate() const {
        if (base_panels < 2 || base_panels % 2 != 0) {
            throw ValidationError("quad.base_panels must be an even integer >= 2");
        }
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw ValidationError("quad tolerances must be > 0");
        if (max_refine < 1) throw ValidationError("quad.max_refine must be >= 1");
    }
};

namespace detail {

/// Composite Simpson with panel doubling on every cell of the partition `edges` (increasing,
/// at least two entries). Cell j starts with an even panel count proportional to its length,
/// `panels` in total and at least 2 per cell, and is doubled until its successive difference
/// falls within its length share of max(abs_tol, rel_tol |estimate|); the shares add up to
/// the whole-interval criterion. `sample(s)` must return the integrand; `label(s)` builds the
/// location text for a non-finite sample.
template <class Sample, class Label>
double simpson_doubling(Sample&& sample, std::span<const double> edges, const QuadConfig& cfg, std::size_t panels,
                        Label&& label) {
    auto checked = [&](double s) {
        const double v = sample(s);
        if (!std::isfinite(v)) throw NumericError("non-finite integrand sample at " + label(s));
        return v;
    };

    struct Cell {
        double a, len;
        std::size_t n;
        double ends, odd = 0.0, even = 0.0;
        double estimate = 0.0, diff = 0.0;
        bool done = false;
    };
    auto simpson = [](const Cell& c) {
        return c.len / static_cast<double>(c.n) / 3.0 * (c.ends + 4.0 * c.odd + 2.0 * c.even);
    };
    const double total = edges.back() - edges.front();
    std::vector<Cell> cells;
    cells.reserve(edges.size() - 1);
    double left_value = checked(edges.front());
    for (std::size_t j = 0; j + 1 < edges.size(); ++j) {
        const double a = edges[j];
        const double len = edges[j + 1] - a;
        const double right_value = checked(edges[j + 1]);
        const auto share = static_cast<std::size_t>(std::ceil(static_cast<double>(panels) * len / total / 2.0));
        Cell c{a, len, 2 * std::max<std::size_t>(1, share), left_value + right_value};
        const double h = len / static_cast<double>(c.n);
        for (std::size_t k = 1; k < c.n; ++k) {
            const double v = checked(a + static_cast<double>(k) * h);
            if (k % 2 == 1) c.odd += v;
            else c.even += v;
        }
        c.estimate = simpson(c);
        cells.push_back(c);
        left_value = right_value;
    }
    auto sum_cells = [&] {
        double acc = 0.0;
        for (const auto& c : cells) acc += c.estimate;
        return acc;
    };

    double estimate = sum_cells();
    for (int r = 1; r <= cfg.max_refine; ++r) {
        for (auto& c : cells) {
            if (c.done) continue;
            c.n *= 2;
            const double h = c.len / static_cast<double>(c.n);
            c.even += c.odd;
            c.odd = 0.0;
            for (std::size_t k = 1; k < c.n; k += 2) c.odd += checked(c.a + static_cast<double>(k) * h);
            const double next = simpson(c);
            c.diff = std::abs(next - c.estimate);
            c.estimate = next;
        }
        estimate = sum_cells();
        const double tol = std::max(cfg.abs_tol, cfg.rel_tol * std::abs(estimate));
        bool all_done = true;
        for (auto& c : cells) {
            if (!c.done) c.done = c.diff < tol * (c.len / total);
            all_done = all_done && c.done;
        }
        if (all_done) return estimate;
    }
    double diff = 0.0;
    for (const auto& c : cells) {
        if (!c.done) diff += c.diff;
    }
    throw ToleranceNotMet("quadrature tolerance not met on [" + format_real(edges.front()) + ", " +
                              format_real(edges.back()) + "]: best " + format_real(estimate) + ", last difference " +
                              format_real(diff),
                          estimate, diff);
}

/// {a} + breaks strictly inside (a, b) + {b}; `breaks` must be increasing.
inline std::vector<double> cell_edges(double a, double b, std::span<const double> breaks) {
    std::vector<double> e{a};
    for (double s : breaks) {
        if (s > a && s < b) e.push_back(s);
    }
    e.push_back(b);
    return e;
}

}  // namespace detail

/// int_a^b fn(s) ds by composite Simpson with panel doubling. Optional `breaks` split the
/// interval where fn has kinks, so that every cell is integrated at the smooth-function rate.
template <class Fn>
double integrate_scalar(Fn&& fn, double a, double b, const QuadConfig& cfg = {}, std::span<const double> breaks = {}) {
    cfg.validate();
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw DomainError("integrate_scalar: need finite a <= b");
    }
    if (a == b) return 0.0;
    const auto edges = detail::cell_edges(a, b, breaks);
    return detail::simpson_doubling(fn, edges, cfg, static_cast<std::size_t>(cfg.base_panels),
                                    [](double s) { return "s = " + format_real(s); });
}

/// Points s_k with eta(s_k) = t_k for the grid nodes t_k above eta(0), increasing. A state
/// read through eta is piecewise linear between consecutive points. Empty when eta is not
/// nondecreasing on a sampled bracket, in which case integration falls back to one cell.
inline std::vector<double> warp_breakpoints(const ScalarMap& eta, const Grid& grid) {
    const double t_max = grid.t_max();
    const double e0 = eta(0.0);
    if (!std::isfinite(e0) || e0 >= t_max) return {};
    double S = 1.0;
    while (eta(S) < t_max && S < 1e12) S *= 2.0;
    constexpr int probes = 4096;
    double prev = e0;
    for (int k = 1; k <= probes; ++k) {
        const double e = eta(S * k / probes);
        if (!(e >= prev)) return {};
        prev = e;
    }
    std::vector<double> out;
    double lo = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double target = grid.node(k);
        if (target <= e0) continue;
        if (eta(S) < target) break;
        double a = lo;
        double b = S;
        for (int it = 0; it < 200 && b - a > 4e-16 * b; ++it) {
            const double mid = 0.5 * (a + b);
            (eta(mid) < target ? a : b) = mid;
        }
        out.push_back(b);
        lo = b;
    }
    return out;
}

/// int_0^{q_i(t)} h_i(t, s, x(eta_i s), y(eta_i s), z(eta_i s)) ds for 0-based component i.
/// `breaks` are warp_breakpoints(eta_i, grid); computed here when null.
/// When `extension_hits` is non-null it is incremented once per warped argument beyond t_max.
inline double integrate_kernel(const ProblemSpec& spec, std::size_t i, const TripleState& state, double t,
                               const QuadConfig& cfg, std::size_t* extension_hits = nullptr,
                               const std::vector<double>* breaks = nullptr) {
    cfg.validate();
    const auto& c = spec.component(i);
    if (!std::isfinite(t) || t < 0.0) throw DomainError("integrate_kernel: t must be finite and >= 0");
    const double upper = c.q(t);
    if (!std::isfinite(upper) || upper < 0.0) {
        throw DomainError("integrate_kernel: q_" + std::to_string(i + 1) + "(" + format_real(t) +
                          ") = " + format_real(upper) + " is not a nonnegative number");
    }
    if (upper == 0.0) return 0.0;

    std::vector<double> own;
    if (!breaks) {
        own = warp_breakpoints(c.eta, state.grid());
        breaks = &own;
    }

    const GridFunction& x = state.x();
    const GridFunction& y = state.y();
    const GridFunction& z = state.z();
    const double t_max = state.grid().t_max();
    std::size_t hits = 0;
    auto integrand = [&](double s) {
        const double e = c.eta(s);
        if (!std::isfinite(e) || e < 0.0) {
            throw DomainError("integrate_kernel: eta_" + std::to_string(i + 1) + "(" + format_real(s) +
                              ") is not a nonnegative number");
        }
        if (e > t_max) ++hits;
        return c.h(t, s, x.eval_unchecked(e), y.eval_unchecked(e), z.eval_unchecked(e));
    };
    auto label = [t](double s) { return "(t, s) = (" + format_real(t) + ", " + format_real(s) + ")"; };
    const auto edges = detail::cell_edges(0.0, upper, *breaks);
    const double result =
        detail::simpson_doubling(integrand, edges, cfg, static_cast<std::size_t>(cfg.base_panels), label);
    if (extension_hits) *extension_hits += hits;
    return result;
}

}  // namespace tripled
