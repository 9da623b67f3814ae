#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "volput/roots.hpp"

#include <cmath>
#include <stdexcept>

using volput::roots::Bracket;
using volput::roots::RootProblem;

TEST_CASE("bracket and refine a single transcendental root") {
    // x log(x) = 1 has one positive root near 1.7632228343518968.
    RootProblem prob;
    prob.objective = [](double x) { return x * std::log(x) - 1.0; };
    prob.search_lo = 0.01;
    prob.search_hi = 100.0;
    auto brackets = volput::roots::bracket_roots(prob);
    REQUIRE(brackets.size() == 1);
    CHECK(brackets[0].first < 1.7632228343518968);
    CHECK(brackets[0].second > 1.7632228343518968);
    double root = volput::roots::refine_root(prob, brackets[0]);
    CHECK(root == doctest::Approx(1.7632228343518968).epsilon(1e-12));
}

TEST_CASE("multiple roots on a log grid are all bracketed") {
    // sin(pi log10(x)) vanishes at every power of ten; on [0.05, 2000] the
    // crossings are 0.1, 1, 10, 100, 1000.
    RootProblem prob;
    prob.objective = [](double x) { return std::sin(M_PI * std::log10(x)); };
    prob.search_lo = 0.05;
    prob.search_hi = 2000.0;
    auto brackets = volput::roots::bracket_roots(prob, 1000);
    REQUIRE(brackets.size() == 5);
    double expected[] = {0.1, 1.0, 10.0, 100.0, 1000.0};
    for (int i = 0; i < 5; ++i) {
        double root = volput::roots::refine_root(prob, brackets[i]);
        CHECK(root == doctest::Approx(expected[i]).epsilon(1e-10));
    }
}

TEST_CASE("probe failures are skipped, not fatal") {
    // The objective throws on a band in the middle of the search range.
    // Brackets on either side of the band must still be found.
    RootProblem prob;
    prob.objective = [](double x) {
        if (x > 0.8 && x < 1.25) throw std::runtime_error("band");
        return (x - 0.5) * (x - 2.0);
    };
    prob.search_lo = 0.1;
    prob.search_hi = 10.0;
    auto brackets = volput::roots::bracket_roots(prob, 500);
    REQUIRE(brackets.size() == 2);
    CHECK(volput::roots::refine_root(prob, brackets[0]) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(volput::roots::refine_root(prob, brackets[1]) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("non-finite probe values are skipped") {
    RootProblem prob;
    prob.objective = [](double x) {
        if (x < 1.0) return std::numeric_limits<double>::quiet_NaN();
        return x - 3.0;
    };
    prob.search_lo = 0.1;
    prob.search_hi = 10.0;
    auto brackets = volput::roots::bracket_roots(prob);
    REQUIRE(brackets.size() == 1);
    CHECK(volput::roots::refine_root(prob, brackets[0]) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("no sign change yields an empty bracket list") {
    RootProblem prob;
    prob.objective = [](double x) { return 1.0 + x * x; };
    prob.search_lo = 0.1;
    prob.search_hi = 10.0;
    CHECK(volput::roots::bracket_roots(prob).empty());
}

TEST_CASE("refinement stays inside the bracket on hard shapes") {
    // Steep exponential contrast: naive secant steps would shoot far outside.
    RootProblem prob;
    prob.objective = [](double x) { return std::exp(20.0 * x) - 1e6; };
    prob.search_lo = 0.0;  // unused by refine_root
    prob.search_hi = 0.0;
    double root = volput::roots::refine_root(prob, Bracket{0.0, 1.0});
    // Accuracy is bounded by the default rel_tol = 1e-10 stopping rule.
    CHECK(root == doctest::Approx(std::log(1e6) / 20.0).epsilon(1e-9));
}

TEST_CASE("flat-then-jump objective converges by bisection fallback") {
    RootProblem prob;
    prob.objective = [](double x) { return x < 0.7 ? -1.0 + x * 1e-12 : 1.0; };
    prob.search_lo = 0.0;
    prob.search_hi = 0.0;
    double root = volput::roots::refine_root(prob, Bracket{0.0, 1.0});
    CHECK(root == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("iteration cap raises an error") {
    RootProblem prob;
    prob.objective = [](double x) { return x - 0.5; };
    prob.search_lo = 0.0;
    prob.search_hi = 0.0;
    prob.max_iter = 1;
    prob.abs_tol = 1e-300;  // unreachable tolerance forces the cap
    prob.rel_tol = 1e-300;
    CHECK_THROWS_AS(volput::roots::refine_root(prob, Bracket{0.0, 1e8}),
                    std::runtime_error);
}

TEST_CASE("root landing exactly on a probe point is still reported") {
    // With probes at integer powers the function is 0 exactly at x = 1.
    RootProblem prob;
    prob.objective = [](double x) { return std::log(x); };
    prob.search_lo = 0.01;
    prob.search_hi = 100.0;
    auto brackets = volput::roots::bracket_roots(prob, 401);
    REQUIRE(!brackets.empty());
    bool found = false;
    for (const auto& b : brackets) {
        double root = volput::roots::refine_root(prob, b);
        if (std::abs(root - 1.0) < 1e-10) found = true;
    }
    CHECK(found);
}
