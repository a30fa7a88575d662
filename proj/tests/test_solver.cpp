#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "tripled/solver.hpp"

#include <cmath>

using namespace tripled;
using Catch::Matchers::WithinAbs;

namespace {

SolveConfig traced(int max_iter = 500) {
    SolveConfig c;
    c.retain_trace = true;
    c.max_iter = max_iter;
    return c;
}

}  // namespace

TEST_CASE("decoupled_identity converges in one iteration", "[solver]") {
    const auto rep = picard_solve(get_problem({"decoupled_identity", {}}), Grid(20.0, 2001), SolveConfig{});
    CHECK(rep.converged);
    CHECK(rep.status == SolveStatus::Converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.residuals == std::vector<double>{0.0});
    CHECK(rep.final.y()[100] == -0.5);
}

TEST_CASE("linear_volterra reproduces exp(t)", "[solver]") {
    const Grid g(2.0, 1025);  // step 2^-9
    CHECK(g.step() == std::ldexp(1.0, -9));
    const auto rep = picard_solve(get_problem({"linear_volterra", {}}), g, SolveConfig{});
    INFO(to_string(rep.status) << " " << rep.iterations << " " << rep.residuals.back());
    REQUIRE(rep.converged);
    CHECK(rep.residuals.back() <= 1e-8);
    CHECK(static_cast<int>(rep.residuals.size()) == rep.iterations);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double e = std::exp(g.node(k));
        worst = std::max(worst, std::abs(rep.final.x()[k] - e) / e);
    }
    CHECK(worst < 1e-4);
    CHECK_THAT(rep.final.x()[512], WithinAbs(std::exp(1.0), 1e-5));
    CHECK(rep.extension_hits == 0);
}

TEST_CASE("converged implies the final residual is within tolerance", "[solver][property]") {
    for (double lambda : {-1.0, 0.3, 1.0, 1.5}) {
        const auto p = get_problem({"linear_volterra", {{"lambda", lambda}}});
        const Grid g(2.0, 129);
        const auto rep = picard_solve(p, g, SolveConfig{});
        REQUIRE(rep.converged);
        REQUIRE(rep.residuals.back() <= 1e-8);
        REQUIRE(residual(p, rep.final) == rep.residuals.back());
    }
}

TEST_CASE("iteration cap gives an inconclusive report", "[solver]") {
    SolveConfig c;
    c.max_iter = 2;
    const auto rep = picard_solve(get_problem({"linear_volterra", {}}), Grid(2.0, 65), c);
    CHECK_FALSE(rep.converged);
    CHECK(rep.status == SolveStatus::Inconclusive);
    CHECK(rep.iterations == 2);
    CHECK(rep.residuals.size() == 2);
}

TEST_CASE("time budget stops the iteration", "[solver]") {
    SolveConfig c;
    c.max_seconds = 1e-9;
    const auto rep = picard_solve(get_problem({"linear_volterra", {}}), Grid(2.0, 65), c);
    CHECK_FALSE(rep.converged);
    CHECK(rep.status == SolveStatus::TimeBudget);
    CHECK(rep.iterations == 1);
}

TEST_CASE("divergence guard aborts runaway iteration", "[solver]") {
    // Picard iterates of x = 1 + 50 int x grow like (50 t)^n / n! before they settle.
    const auto p = get_problem({"linear_volterra", {{"lambda", 50.0}}});
    try {
        picard_solve(p, Grid(2.0, 65), SolveConfig{});
        FAIL("expected divergence");
    } catch (const DivergenceError& e) {
        REQUIRE(e.residuals().size() >= 2);
        CHECK(e.residuals().back() > kDivergenceFactor * (1.0 + e.residuals().front()));
    }
}

TEST_CASE("solve config validation", "[solver]") {
    const auto p = get_problem({"decoupled_identity", {}});
    const Grid g(1.0, 11);
    SolveConfig c;
    c.tol = 0.0;
    CHECK_THROWS_AS(picard_solve(p, g, c), ValidationError);
    c = {};
    c.max_iter = 0;
    CHECK_THROWS_AS(picard_solve(p, g, c), ValidationError);
    c = {};
    c.damping = 1.5;
    CHECK_THROWS_AS(picard_solve(p, g, c), ValidationError);
    c = {};
    c.init = InitPolicy::Custom;
    CHECK_THROWS_AS(picard_solve(p, g, c), ValidationError);
    c.custom_init = TripleState::constant(Grid(1.0, 12), 0.0);
    CHECK_THROWS_AS(picard_solve(p, g, c), ContractViolation);
    c.custom_init = TripleState::constant(g, 0.0);
    CHECK(picard_solve(p, g, c).iterations == 2);
    c = {};
    c.init = InitPolicy::Zero;
    CHECK(picard_solve(p, g, c).iterations == 2);
}

TEST_CASE("picard_solve is deterministic", "[solver][property]") {
    const auto p = get_problem({"paper_example", {}});
    const Grid g(3.0, 31);
    SolveConfig c = traced(5);
    const auto a = picard_solve(p, g, c);
    const auto b = picard_solve(p, g, c);
    REQUIRE(a.residuals == b.residuals);
    REQUIRE(a.extension_hits == b.extension_hits);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t k = 0; k < g.size(); ++k) REQUIRE(a.final.component(i)[k] == b.final.component(i)[k]);
    }
}

TEST_CASE("damping does not move the fixed point", "[solver][property]") {
    const auto p = get_problem({"linear_volterra", {{"lambda", 0.5}}});
    const Grid g(2.0, 129);
    const auto plain = picard_solve(p, g, SolveConfig{});
    REQUIRE(plain.converged);
    for (double theta : {0.25, 0.5, 0.9}) {
        SolveConfig c;
        c.damping = theta;
        c.max_iter = 2000;
        const auto damped = picard_solve(p, g, c);
        REQUIRE(damped.converged);
        // Both fixed-point residuals are below tol; the Lipschitz constant of T is <= 1 here,
        // so the states agree to a small multiple of tol.
        REQUIRE(max_component_dist(damped.final, plain.final) < 1e-6);
        REQUIRE(residual(p, plain.final) <= c.tol);
    }
}

TEST_CASE("residuals contract at the probed rate", "[solver][property]") {
    const auto p = get_problem({"linear_volterra", {{"lambda", 0.2}}});
    const Grid g(2.0, 129);
    const auto probe = contraction_probe(p, g, 50, 3);
    REQUIRE(probe.max_ratio < 1.0);
    CHECK(probe.max_ratio <= 0.4 + 1e-9);
    const auto rep = picard_solve(p, g, SolveConfig{});
    REQUIRE(rep.converged);
    for (std::size_t n = 1; n + 1 < rep.residuals.size(); ++n) {
        REQUIRE(rep.residuals[n + 1] <= (probe.max_ratio + 0.05) * rep.residuals[n]);
    }
}

TEST_CASE("contraction_probe examples", "[solver]") {
    const auto d = contraction_probe(get_problem({"decoupled_identity", {}}), Grid(5.0, 51), 20, 42);
    CHECK(d.max_ratio == 0.0);
    CHECK(d.pairs_used == 20);

    const auto v = contraction_probe(get_problem({"linear_volterra", {}}), Grid(2.0, 129), 50, 42);
    CHECK(v.max_ratio <= 2.0);
    CHECK(v.max_ratio > 0.0);
    CHECK(v.witness_component == 1);
    REQUIRE(v.witness_a.has_value());
    CHECK_FALSE(v.bucket_max_ratio.empty());

    const auto again = contraction_probe(get_problem({"linear_volterra", {}}), Grid(2.0, 129), 50, 42);
    CHECK(again.max_ratio == v.max_ratio);

    CHECK_THROWS_AS(contraction_probe(get_problem({"decoupled_identity", {}}), Grid(1.0, 11), 5, 1, {}, 0.0),
                    InsufficientSamples);
    CHECK_THROWS_AS(contraction_probe(get_problem({"decoupled_identity", {}}), Grid(1.0, 11), 0, 1), DomainError);
}

TEST_CASE("iterate_set_diagnostic usage errors", "[solver]") {
    const auto p = get_problem({"linear_volterra", {}});
    const Grid g(2.0, 65);
    SolveConfig c;
    c.max_iter = 6;
    CHECK_THROWS_AS(iterate_set_diagnostic(picard_solve(p, g, c), 3), UsageError);
    c.retain_trace = true;
    const auto rep = picard_solve(p, g, c);
    CHECK(rep.trace.size() == 6);
    CHECK_THROWS_AS(iterate_set_diagnostic(rep, 7), UsageError);
    CHECK(iterate_set_diagnostic(rep, 6).size() == 1);
    CHECK(iterate_set_diagnostic(rep, 2).size() == 5);
}

TEST_CASE("a window of identical states has zero measure", "[solver]") {
    const Grid g(4.0, 41);
    Rng rng(2);
    const auto s = random_state(g, 1.0, rng);
    SolveReport rep{s, {1, 1, 1}, 3, false, SolveStatus::Inconclusive, {}, 0, {s, s, s}};
    const auto w = iterate_set_diagnostic(rep, 3);
    REQUIRE(w.size() == 1);
    CHECK(w[0].product_mu == 0.0);
    for (const auto& r : w[0].components) CHECK(r.mu_est == 0.0);
}

TEST_CASE("linear_volterra window measures decrease", "[solver]") {
    const auto p = get_problem({"linear_volterra", {}});
    const Grid g(2.0, 1025);
    const auto rep = picard_solve(p, g, traced());
    REQUIRE(rep.converged);
    const auto w = iterate_set_diagnostic(rep, 5);
    REQUIRE(w.size() >= 2);
    CHECK(w.back().product_mu <= w.front().product_mu);
    for (std::size_t n = 3; n + 1 < w.size(); ++n) {
        INFO("window " << n);
        CHECK(w[n + 1].product_mu < w[n].product_mu);
    }
    // The estimator agrees with the exhaustive oracle on every window.
    for (const auto& win : w) {
        Family F;
        for (std::size_t m = win.start; m < win.start + 5; ++m) F.push_back(rep.trace[m].x());
        const auto brute = oracle::brute_mnc(F, g.t_max(), 0.01, 0.8 * g.t_max());
        REQUIRE(win.components[0].mu_est == brute.mu);
    }
}

TEST_CASE("later Picard iterates form a smaller set", "[solver][mnc]") {
    const auto p = get_problem({"linear_volterra", {}});
    const Grid g(2.0, 257);
    const auto rep = picard_solve(p, g, traced(10));
    REQUIRE(rep.trace.size() == 10);
    Family early, late;
    for (std::size_t m = 0; m < 5; ++m) early.push_back(rep.trace[m].x());
    for (std::size_t m = 5; m < 10; ++m) late.push_back(rep.trace[m].x());
    const double mu_early = mnc_estimate(early).mu_est;
    const double mu_late = mnc_estimate(late).mu_est;
    CHECK(mu_late < mu_early);
    const auto w = iterate_set_diagnostic(rep, 5);
    CHECK(w.front().components[0].mu_est == mu_early);
    CHECK(w.back().components[0].mu_est == mu_late);
    CHECK(oracle::brute_mnc(late, 2.0, 0.01, 1.6).mu == mu_late);
}
