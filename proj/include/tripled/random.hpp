#pragma once

#include "tripled/funcspace.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace tripled {

/// Seeded engine. Draws go through uniform() below so sequences do not depend on the
/// standard library's distribution implementations.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
}

/// Smooth random function with |f| <= bound: bound * (c0 + c1 sin(w t + p) + c2 exp(-l t)) / 3.
inline GridFunction random_smooth_function(const Grid& grid, double bound, Rng& rng) {
    const double c0 = uniform(rng, -1.0, 1.0);
    const double c1 = uniform(rng, -1.0, 1.0);
    const double c2 = uniform(rng, -1.0, 1.0);
    const double w = uniform(rng, 0.0, 2.0);
    const double p = uniform(rng, 0.0, 6.283185307179586);
    const double l = uniform(rng, 0.0, 1.0);
    return GridFunction::sample(grid, [&](double t) {
        return bound * (c0 + c1 * std::sin(w * t + p) + c2 * std::exp(-l * t)) / 3.0;
    });
}

inline TripleState random_state(const Grid& grid, double bound, Rng& rng) {
    auto x = random_smooth_function(grid, bound, rng);
    auto y = random_smooth_function(grid, bound, rng);
    auto z = random_smooth_function(grid, bound, rng);
    return {std::move(x), std::move(y), std::move(z)};
}

}  // namespace tripled
