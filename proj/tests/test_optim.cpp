#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "tomocal/optim.hpp"

using namespace tomocal::optim;

namespace {

double sphere(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += (v - 0.3) * (v - 0.3);
    return s;
}

double rosenbrock(const std::vector<double>& x) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        s += 100 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1 - x[i], 2);
    return s;
}

}  // namespace

TEST_SUITE("optim") {

TEST_CASE("nelder_mead minimizes a quadratic") {
    const std::vector<double> lo(4, -1.0), hi(4, 1.0);
    const Result r = nelder_mead(sphere, std::vector<double>(4, 0.9), lo, hi);
    CHECK(r.converged);
    CHECK(r.value < 1e-14);
    for (double v : r.x) CHECK(v == doctest::Approx(0.3).epsilon(1e-5));
}

TEST_CASE("nelder_mead follows the rosenbrock valley") {
    const std::vector<double> lo(2, -2.0), hi(2, 2.0);
    NelderMeadOptions opts;
    opts.maxIterations = 10000;
    const Result r = nelder_mead(rosenbrock, {-1.2, 1.0}, lo, hi, opts);
    CHECK(r.value < 1e-10);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("nelder_mead respects bounds") {
    const std::vector<double> lo(3, -0.2), hi(3, 0.2);
    const Result r = nelder_mead(sphere, std::vector<double>(3, 0.0), lo, hi);
    for (double v : r.x) {
        CHECK(v >= -0.2);
        CHECK(v <= 0.2);
        CHECK(v == doctest::Approx(0.2).epsilon(1e-6));  // optimum pinned at the bound
    }
}

TEST_CASE("nelder_mead rejects mismatched bounds") {
    CHECK_THROWS_AS(nelder_mead(sphere, {0.0, 0.0}, {0.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("pattern_search reaches meshMin on a smooth bowl") {
    const std::vector<double> lo(5, -1.0), hi(5, 1.0);
    PatternSearchOptions opts;
    long budget = 100000;
    const Result r = pattern_search(sphere, std::vector<double>(5, -0.8), lo, hi, opts, &budget);
    CHECK(r.converged);
    CHECK(r.value < 1e-8);
    CHECK(budget > 0);
}

TEST_CASE("pattern_search stops when the budget runs out") {
    const std::vector<double> lo(5, -1.0), hi(5, 1.0);
    PatternSearchOptions opts;
    long budget = 20;
    const Result r = pattern_search(sphere, std::vector<double>(5, -0.8), lo, hi, opts, &budget);
    CHECK(!r.converged);
    CHECK(budget <= 0);
}

TEST_CASE("pattern_search never leaves the box") {
    const std::vector<double> lo{0.0, 0.0}, hi{0.1, 0.1};
    long budget = 5000;
    const Result r = pattern_search(sphere, {0.05, 0.05}, lo, hi, PatternSearchOptions{}, &budget);
    CHECK(r.x[0] == doctest::Approx(0.1));
    CHECK(r.x[1] == doctest::Approx(0.1));
}

TEST_CASE("latin_hypercube stratifies every coordinate") {
    const std::vector<double> lo{-0.5, 0.0, 2.0}, hi{0.5, 1.0, 4.0};
    const int n = 40;
    const auto pts = latin_hypercube(lo, hi, n, 99);
    REQUIRE(pts.size() == static_cast<std::size_t>(n));
    for (std::size_t d = 0; d < lo.size(); ++d) {
        std::vector<bool> hit(n, false);
        for (const auto& p : pts) {
            CHECK(p[d] >= lo[d]);
            CHECK(p[d] <= hi[d]);
            const int cell = std::min<int>(n - 1, static_cast<int>((p[d] - lo[d]) /
                                                                   (hi[d] - lo[d]) * n));
            hit[cell] = true;
        }
        for (bool h : hit) CHECK(h);  // exactly one sample per stratum
    }
}

TEST_CASE("latin_hypercube is deterministic per seed") {
    const std::vector<double> lo{0.0}, hi{1.0};
    CHECK(latin_hypercube(lo, hi, 10, 5) == latin_hypercube(lo, hi, 10, 5));
    CHECK(latin_hypercube(lo, hi, 10, 5) != latin_hypercube(lo, hi, 10, 6));
}

}  // TEST_SUITE
