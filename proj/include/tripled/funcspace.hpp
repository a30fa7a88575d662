#pragma once

#include "tripled/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

namespace tripled {

/// Round-trip-exact decimal text for a double (17 significant digits).
inline std::string format_real(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    if (ec != std::errc{}) {
        throw NumericError("format_real: conversion failed");
    }
    return std::string(buf, end);
}

/// Uniform grid 0 = t_0 < ... < t_{n-1} = t_max standing in for the half-line.
class Grid {
public:
    Grid(double t_max, std::size_t n_nodes) : t_max_(t_max), n_nodes_(n_nodes) {
        if (!std::isfinite(t_max) || t_max <= 0.0) {
            throw DomainError("Grid: t_max must be finite and positive");
        }
        if (n_nodes < 2) {
            throw DomainError("Grid: at least 2 nodes required");
        }
        step_ = t_max / static_cast<double>(n_nodes - 1);
    }

    double t_max() const noexcept { return t_max_; }
    std::size_t size() const noexcept { return n_nodes_; }
    double step() const noexcept { return step_; }

    double node(std::size_t i) const noexcept {
        if (i + 1 == n_nodes_) return t_max_;
        return t_max_ * static_cast<double>(i) / static_cast<double>(n_nodes_ - 1);
    }

    std::vector<double> nodes() const {
        std::vector<double> out(n_nodes_);
        for (std::size_t i = 0; i < n_nodes_; ++i) out[i] = node(i);
        return out;
    }

    bool operator==(const Grid&) const = default;

private:
    double t_max_;
    std::size_t n_nodes_;
    double step_;
};

/// Piecewise-linear function sampled on a Grid, constant beyond t_max.
class GridFunction {
public:
    GridFunction(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw ContractViolation("GridFunction: value count " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                throw NumericError("GridFunction: non-finite value at node " + std::to_string(i));
            }
        }
    }

    template <class Fn>
    static GridFunction sample(const Grid& grid, Fn&& fn) {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) v[i] = fn(grid.node(i));
        return GridFunction(grid, std::move(v));
    }

    static GridFunction constant(const Grid& grid, double c) {
        return GridFunction(grid, std::vector<double>(grid.size(), c));
    }

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Point evaluation without the domain check; callers guarantee t >= 0 and finite.
    double eval_unchecked(double t) const noexcept {
        const std::size_t n = values_.size();
        if (t >= grid_.t_max()) return values_[n - 1];
        const double pos = t / grid_.step();
        const double nearest = std::nearbyint(pos);
        const auto r = static_cast<std::size_t>(nearest);
        if (r < n && grid_.node(r) == t) return values_[r];
        auto i = static_cast<std::size_t>(pos);
        if (i >= n - 1) return values_[n - 1];
        const double w = pos - static_cast<double>(i);
        const double a = values_[i];
        const double b = values_[i + 1];
        const double v = a + w * (b - a);
        return std::clamp(v, std::min(a, b), std::max(a, b));
    }

private:
    Grid grid_;
    std::vector<double> values_;
};

/// Linear interpolation inside [0, t_max], constant extension beyond, exact at nodes.
inline double eval(const GridFunction& f, double t) {
    if (!std::isfinite(t) || t < 0.0) {
        throw DomainError("eval: t must be finite and nonnegative, got " + format_real(t));
    }
    return f.eval_unchecked(t);
}

inline void require_same_grid(const GridFunction& f, const GridFunction& g, const char* where) {
    if (!(f.grid() == g.grid())) {
        throw ContractViolation(std::string(where) + ": grids differ");
    }
}

inline double sup_dist(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f, g, "sup_dist");
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
    return m;
}

inline double sup_norm(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

/// Pointwise (1 - lambda) a + lambda b.
inline GridFunction blend(const GridFunction& a, const GridFunction& b, double lambda) {
    require_same_grid(a, b, "blend");
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[i] = (1.0 - lambda) * a[i] + lambda * b[i];
    return GridFunction(a.grid(), std::move(v));
}

/// The iterate (x, y, z) of the tripled fixed-point problem.
class TripleState {
public:
    TripleState(GridFunction x, GridFunction y, GridFunction z)
        : x_(std::move(x)), y_(std::move(y)), z_(std::move(z)) {
        require_same_grid(x_, y_, "TripleState");
        require_same_grid(x_, z_, "TripleState");
    }

    static TripleState constant(const Grid& grid, double c) {
        return {GridFunction::constant(grid, c), GridFunction::constant(grid, c),
                GridFunction::constant(grid, c)};
    }

    const Grid& grid() const noexcept { return x_.grid(); }
    const GridFunction& x() const noexcept { return x_; }
    const GridFunction& y() const noexcept { return y_; }
    const GridFunction& z() const noexcept { return z_; }

    /// Component by 0-based index.
    const GridFunction& component(std::size_t i) const {
        switch (i) {
            case 0: return x_;
            case 1: return y_;
            case 2: return z_;
            default: throw DomainError("TripleState: component index out of range");
        }
    }

private:
    GridFunction x_;
    GridFunction y_;
    GridFunction z_;
};

/// max over components of sup_dist, the max-combiner distance on the product space.
inline double max_component_dist(const TripleState& a, const TripleState& b) {
    return std::max({sup_dist(a.x(), b.x()), sup_dist(a.y(), b.y()), sup_dist(a.z(), b.z())});
}

inline TripleState blend(const TripleState& a, const TripleState& b, double lambda) {
    return {blend(a.x(), b.x(), lambda), blend(a.y(), b.y(), lambda), blend(a.z(), b.z(), lambda)};
}

// CSV --------------------------------------------------------------------------

inline void write_csv(std::ostream& os, const GridFunction& f) {
    os << "t,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        os << format_real(f.grid().node(i)) << ',' << format_real(f[i]) << '\n';
    }
}

/// Parses the `t,value` format written by write_csv. Nodes must form a uniform grid from 0.
inline GridFunction read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "t,value") {
        throw ValidationError("read_csv: expected header 't,value'");
    }
    std::vector<double> ts;
    std::vector<double> vs;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ValidationError("read_csv: missing comma on line " + std::to_string(lineno));
        }
        double t = 0.0;
        double v = 0.0;
        const char* b = line.data();
        auto r1 = std::from_chars(b, b + comma, t);
        auto r2 = std::from_chars(b + comma + 1, b + line.size(), v);
        if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
            throw ValidationError("read_csv: malformed number on line " + std::to_string(lineno));
        }
        ts.push_back(t);
        vs.push_back(v);
    }
    if (ts.size() < 2 || ts.front() != 0.0) {
        throw ValidationError("read_csv: need at least two rows starting at t = 0");
    }
    Grid grid(ts.back(), ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (std::abs(ts[i] - grid.node(i)) > 1e-12 * (1.0 + grid.t_max())) {
            throw ValidationError("read_csv: nodes are not uniform at row " + std::to_string(i + 2));
        }
    }
    return GridFunction(grid, std::move(vs));
}

}  // namespace tripled
