#pragma once

#include "tripled/errors.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/problems.hpp"
#include "tripled/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace tripled {

/// Result of one application of T = (T1, T2, T3).
struct OperatorEval {
    TripleState output;
    /// t -> int_0^{q_i(t)} h_i(...) ds, one per component.
    std::array<GridFunction, 3> inner_integrals;
    /// Warped arguments (xi or eta) that landed beyond t_max and used constant extension.
    std::size_t extension_hits = 0;
};

inline OperatorEval apply_T(const ProblemSpec& spec, const TripleState& state, const QuadConfig& cfg = {}) {
    const Grid& grid = state.grid();
    const std::size_t n = grid.size();
    const double t_max = grid.t_max();
    std::array<std::vector<double>, 3> out;
    std::array<std::vector<double>, 3> integrals;
    std::size_t hits = 0;

    for (std::size_t i = 0; i < 3; ++i) {
        const auto& c = spec.components[i];
        const std::vector<double> breaks = warp_breakpoints(c.eta, grid);
        out[i].resize(n);
        integrals[i].resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = grid.node(k);
            const double integral = integrate_kernel(spec, i, state, t, cfg, &hits, &breaks);
            const double w = c.xi(t);
            if (!std::isfinite(w) || w < 0.0) {
                throw DomainError("apply_T: xi_" + std::to_string(i + 1) + "(" + format_real(t) +
                                  ") is not a nonnegative number");
            }
            if (w > t_max) ++hits;
            const double p = c.psi(integral);
            const double value = c.g(t) + c.f(t, state.x().eval_unchecked(w), state.y().eval_unchecked(w),
                                              state.z().eval_unchecked(w), p);
            if (!std::isfinite(value)) {
                throw NumericError("apply_T: non-finite T_" + std::to_string(i + 1) + " at t = " +
                                   format_real(t) + " (integral " + format_real(integral) + ", psi " +
                                   format_real(p) + ")");
            }
            out[i][k] = value;
            integrals[i][k] = integral;
        }
    }

    return OperatorEval{
        TripleState(GridFunction(grid, std::move(out[0])), GridFunction(grid, std::move(out[1])),
                    GridFunction(grid, std::move(out[2]))),
        {GridFunction(grid, std::move(integrals[0])), GridFunction(grid, std::move(integrals[1])),
         GridFunction(grid, std::move(integrals[2]))},
        hits};
}

/// max_i sup_dist(T_i(state), state_i).
inline double residual(const ProblemSpec& spec, const TripleState& state, const QuadConfig& cfg = {}) {
    return max_component_dist(apply_T(spec, state, cfg).output, state);
}

/// Columns `t,T1,T2,T3,I1,I2,I3`.
inline void write_operator_csv(std::ostream& os, const OperatorEval& ev) {
    os << "t,T1,T2,T3,I1,I2,I3\n";
    const Grid& grid = ev.output.grid();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        os << format_real(grid.node(k)) << ',' << format_real(ev.output.x()[k]) << ','
           << format_real(ev.output.y()[k]) << ',' << format_real(ev.output.z()[k]) << ','
           << format_real(ev.inner_integrals[0][k]) << ',' << format_real(ev.inner_integrals[1][k]) << ','
           << format_real(ev.inner_integrals[2][k]) << '\n';
    }
}

}  // namespace tripled
