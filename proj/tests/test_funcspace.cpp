#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "tripled/funcspace.hpp"
#include "tripled/random.hpp"

#include <cmath>
#include <sstream>

using namespace tripled;
using Catch::Matchers::WithinAbs;

namespace {
const auto identity_fn = [](double t) { return t; };
const auto square_fn = [](double t) { return t * t; };
}  // namespace

TEST_CASE("grid nodes are uniform and end exactly at t_max", "[funcspace]") {
    const Grid g(20.0, 2001);
    CHECK(g.step() == 0.01);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(2000) == 20.0);
    const auto t = g.nodes();
    for (std::size_t i = 1; i < t.size(); ++i) {
        REQUIRE(t[i] > t[i - 1]);
        REQUIRE_THAT(t[i] - t[i - 1], WithinAbs(0.01, 1e-12));
    }
    CHECK_THROWS_AS(Grid(0.0, 10), DomainError);
    CHECK_THROWS_AS(Grid(INFINITY, 10), DomainError);
    CHECK_THROWS_AS(Grid(1.0, 1), DomainError);
}

TEST_CASE("grid functions reject bad values", "[funcspace]") {
    const Grid g(1.0, 3);
    CHECK_THROWS_AS(GridFunction(g, {0.0, 1.0}), ContractViolation);
    CHECK_THROWS_AS(GridFunction(g, {0.0, NAN, 1.0}), NumericError);
    CHECK_THROWS_AS(GridFunction(g, {0.0, INFINITY, 1.0}), NumericError);
}

TEST_CASE("eval interpolates linearly and extends constantly", "[funcspace]") {
    const Grid g(1.0, 11);
    const auto f = GridFunction::sample(g, identity_fn);
    CHECK_THAT(eval(f, 0.35), WithinAbs(0.35, 1e-15));
    CHECK(eval(f, 2.0) == 1.0);
    CHECK(eval(f, 1.0) == 1.0);
    CHECK(eval(f, 0.0) == 0.0);

    const Grid fine(1.0, 101);
    const auto sq = GridFunction::sample(fine, square_fn);
    // Interpolation error is at most step^2 max|f''| / 8.
    const double bound = fine.step() * fine.step() * 2.0 / 8.0;
    CHECK(bound <= 5e-5);
    CHECK(std::abs(eval(sq, 0.505) - 0.505 * 0.505) <= bound);
    CHECK_THAT(eval(sq, 0.505), WithinAbs(0.255025, 5e-5));
}

TEST_CASE("eval rejects negative and non-finite arguments", "[funcspace]") {
    const auto f = GridFunction::constant(Grid(1.0, 5), 2.0);
    CHECK_THROWS_AS(eval(f, -1e-9), DomainError);
    CHECK_THROWS_AS(eval(f, NAN), DomainError);
    CHECK_THROWS_AS(eval(f, INFINITY), DomainError);
}

TEST_CASE("eval is exact at nodes and stays within the value range", "[funcspace][property]") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const Grid g(uniform(rng, 0.5, 30.0), 2 + static_cast<std::size_t>(uniform(rng, 0.0, 300.0)));
        const auto f = random_smooth_function(g, 5.0, rng);
        for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(eval(f, g.node(i)) == f[i]);
        const auto v = f.values();
        const double lo = *std::min_element(v.begin(), v.end());
        const double hi = *std::max_element(v.begin(), v.end());
        for (int k = 0; k < 200; ++k) {
            const double t = uniform(rng, 0.0, 1.5 * g.t_max());
            const double e = eval(f, t);
            REQUIRE(e >= lo);
            REQUIRE(e <= hi);
        }
    }
}

TEST_CASE("sup_dist examples", "[funcspace]") {
    const Grid g(1.0, 101);
    CHECK(sup_dist(GridFunction::constant(g, 0.0), GridFunction::constant(g, 1.0)) == 1.0);
    const auto id = GridFunction::sample(g, identity_fn);
    const auto sq = GridFunction::sample(g, square_fn);
    CHECK(sup_dist(id, id) == 0.0);
    const double truth = oracle::refined_max([](double t) { return t - t * t; }, 0.0, 1.0, 1000000);
    CHECK_THAT(truth, WithinAbs(0.25, 1e-12));
    CHECK_THAT(sup_dist(id, sq), WithinAbs(truth, 1e-6));
    CHECK_THROWS_AS(sup_dist(id, GridFunction::constant(Grid(1.0, 11), 0.0)), ContractViolation);
}

TEST_CASE("sup_norm examples", "[funcspace]") {
    const Grid g(10.0, 1001);
    CHECK(sup_norm(GridFunction::constant(g, -3.0)) == 3.0);
    CHECK(sup_norm(GridFunction::constant(g, 0.0)) == 0.0);
    const auto g1 = GridFunction::sample(g, [](double t) { return t * t / (2.0 + 2.0 * std::pow(t, 4)); });
    // d/dt t^2/(2+2t^4) = 0 at t = 1, where the value is 1/4.
    CHECK_THAT(sup_norm(g1), WithinAbs(0.25, 1e-4));
    const auto v = g1.values();
    const auto at = std::max_element(v.begin(), v.end()) - v.begin();
    CHECK_THAT(g.node(static_cast<std::size_t>(at)), WithinAbs(1.0, 1e-9));
}

TEST_CASE("sup_dist is a metric", "[funcspace][property]") {
    Rng rng(3);
    const Grid g(20.0, 401);
    const auto zero = GridFunction::constant(g, 0.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = random_smooth_function(g, 4.0, rng);
        const auto b = random_smooth_function(g, 4.0, rng);
        const auto c = random_smooth_function(g, 4.0, rng);
        REQUIRE(sup_dist(a, b) >= 0.0);
        REQUIRE(sup_dist(a, a) == 0.0);
        REQUIRE(sup_dist(a, b) == sup_dist(b, a));
        REQUIRE(sup_dist(a, c) <= sup_dist(a, b) + sup_dist(b, c) + 1e-15);
        REQUIRE(sup_norm(a) == sup_dist(a, zero));
    }
}

TEST_CASE("blend is the elementwise convex combination", "[funcspace]") {
    const Grid g(1.0, 3);
    const GridFunction a(g, {0.0, 2.0, 4.0});
    const GridFunction b(g, {4.0, 2.0, 0.0});
    const auto c = blend(a, b, 0.25);
    CHECK(c[0] == 1.0);
    CHECK(c[1] == 2.0);
    CHECK(c[2] == 3.0);
    CHECK(blend(a, b, 0.0).values()[2] == 4.0);
}

TEST_CASE("triple states share one grid", "[funcspace]") {
    const Grid g(1.0, 5);
    const Grid h(1.0, 6);
    CHECK_THROWS_AS(TripleState(GridFunction::constant(g, 0), GridFunction::constant(h, 0), GridFunction::constant(g, 0)),
                    ContractViolation);
    const auto s = TripleState::constant(g, 1.5);
    CHECK(s.component(2)[4] == 1.5);
    CHECK_THROWS_AS(s.component(3), DomainError);
    const auto u = TripleState(GridFunction::constant(g, 1.5), GridFunction::constant(g, 0.5), GridFunction::constant(g, 1.5));
    CHECK(max_component_dist(s, u) == 1.0);
}

TEST_CASE("CSV round trip is exact", "[funcspace]") {
    Rng rng(5);
    const Grid g(7.3, 123);
    const auto f = random_smooth_function(g, 3.0, rng);
    std::stringstream ss;
    write_csv(ss, f);
    CHECK(ss.str().rfind("t,value\n", 0) == 0);
    const auto back = read_csv(ss);
    CHECK(back.grid() == g);
    for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(back[i] == f[i]);

    std::stringstream bad("t,value\n0,1\n0.5,2\n2,3\n");
    CHECK_THROWS(read_csv(bad));
    std::stringstream header("time,value\n0,1\n1,2\n");
    CHECK_THROWS(read_csv(header));
}

TEST_CASE("format_real keeps 17 significant digits", "[funcspace]") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_real(M_PI)) == M_PI);
}
