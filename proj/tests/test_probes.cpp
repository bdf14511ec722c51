#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <set>

#include "doctest.h"
#include "tomocal/probes.hpp"

using namespace tomocal;

namespace {
constexpr double kPi = std::numbers::pi;

std::vector<BlochVector> vectors_of(const ProbeSet& set) {
    std::vector<BlochVector> v;
    for (const auto& s : set.states) v.push_back(s.bloch());
    return v;
}

double min_pairwise_angle(const std::vector<BlochVector>& v) {
    double best = kPi;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double dot = v[i].x * v[j].x + v[i].y * v[j].y + v[i].z * v[j].z;
            best = std::min(best, std::acos(std::clamp(dot, -1.0, 1.0)));
        }
    return best;
}

}  // namespace

TEST_SUITE("probes") {

TEST_CASE("pauli6 hits the six axis poles") {
    const auto v = vectors_of(probe_set(ProbeKind::pauli6));
    REQUIRE(v.size() == 6);
    std::set<std::array<int, 3>> seen;
    for (const auto& b : v) {
        const std::array<int, 3> r{static_cast<int>(std::lround(b.x)),
                                   static_cast<int>(std::lround(b.y)),
                                   static_cast<int>(std::lround(b.z))};
        CHECK(std::abs(b.x - r[0]) < 1e-12);
        CHECK(std::abs(b.y - r[1]) < 1e-12);
        CHECK(std::abs(b.z - r[2]) < 1e-12);
        seen.insert(r);
    }
    CHECK(seen.size() == 6);
    CHECK(seen.count({1, 0, 0}) == 1);
    CHECK(seen.count({0, -1, 0}) == 1);
    CHECK(seen.count({0, 0, 1}) == 1);
}

TEST_CASE("cube8 vertices lie at (+-1,+-1,+-1)/sqrt3") {
    const auto v = vectors_of(probe_set(ProbeKind::cube8));
    REQUIRE(v.size() == 8);
    const double c = 1.0 / std::sqrt(3.0);
    std::set<std::array<int, 3>> seen;
    for (const auto& b : v) {
        CHECK(std::abs(std::abs(b.x) - c) < 1e-12);
        CHECK(std::abs(std::abs(b.y) - c) < 1e-12);
        CHECK(std::abs(std::abs(b.z) - c) < 1e-12);
        seen.insert({b.x > 0 ? 1 : -1, b.y > 0 ? 1 : -1, b.z > 0 ? 1 : -1});
    }
    CHECK(seen.size() == 8);
}

TEST_CASE("icosahedron12 pairwise inner products") {
    const auto v = vectors_of(probe_set(ProbeKind::icosahedron12));
    REQUIRE(v.size() == 12);
    const double inv5 = 1.0 / std::sqrt(5.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            const double dot = v[i].x * v[j].x + v[i].y * v[j].y + v[i].z * v[j].z;
            const bool ok = std::abs(dot + 1.0) < 1e-10 || std::abs(std::abs(dot) - inv5) < 1e-10;
            CHECK(ok);
        }
}

TEST_CASE("fibonacci(30) spreads with min pairwise angle > 20 degrees") {
    const auto v = vectors_of(probe_set(ProbeKind::fibonacci, 30));
    REQUIRE(v.size() == 30);
    CHECK(min_pairwise_angle(v) > 20.0 * kPi / 180);
}

TEST_CASE("fibonacci mean resultant stays small") {
    for (int n : {30, 64, 108}) {
        const auto v = vectors_of(probe_set(ProbeKind::fibonacci, n));
        BlochVector sum{0, 0, 0};
        for (const auto& b : v) {
            sum.x += b.x;
            sum.y += b.y;
            sum.z += b.z;
        }
        CHECK(sum.norm() / n < 0.05);
    }
}

TEST_CASE("latlon includes both poles and requested count") {
    for (int n : {14, 22}) {
        const auto v = vectors_of(probe_set(ProbeKind::latlon, n));
        REQUIRE(v.size() == static_cast<std::size_t>(n));
        CHECK(std::any_of(v.begin(), v.end(), [](const BlochVector& b) { return b.z > 1 - 1e-9; }));
        CHECK(std::any_of(v.begin(), v.end(),
                          [](const BlochVector& b) { return b.z < -1 + 1e-9; }));
    }
}

TEST_CASE("all sets give unit pure states with angles attached") {
    for (auto kind : {ProbeKind::pauli6, ProbeKind::cube8, ProbeKind::icosahedron12}) {
        for (const auto& s : probe_set(kind).states) {
            CHECK(std::abs(s.bloch().norm() - 1.0) < 1e-12);
            CHECK(s.angles.has_value());
        }
    }
    for (const auto& s : probe_set(ProbeKind::latlon, 22).states)
        CHECK(std::abs(s.bloch().norm() - 1.0) < 1e-12);
}

TEST_CASE("no duplicate bloch points") {
    for (auto kind : {ProbeKind::latlon, ProbeKind::fibonacci}) {
        const auto v = vectors_of(probe_set(kind, 40));
        CHECK(min_pairwise_angle(v) > 1e-6);
    }
}

TEST_CASE("generation is deterministic") {
    const auto a = probe_set(ProbeKind::fibonacci, 108);
    const auto b = probe_set(ProbeKind::fibonacci, 108);
    REQUIRE(a.states.size() == b.states.size());
    for (std::size_t i = 0; i < a.states.size(); ++i)
        CHECK(std::abs(a.states[i].amp[0] - b.states[i].amp[0]) +
                  std::abs(a.states[i].amp[1] - b.states[i].amp[1]) ==
              0.0);
}

TEST_CASE("name round trip and bad input") {
    for (auto kind : {ProbeKind::pauli6, ProbeKind::cube8, ProbeKind::icosahedron12,
                      ProbeKind::latlon, ProbeKind::fibonacci})
        CHECK(probe_kind_from_name(probe_kind_name(kind)) == kind);
    CHECK_THROWS_AS(probe_kind_from_name("dodecahedron"), std::invalid_argument);
    CHECK_THROWS_AS(probe_set(ProbeKind::fibonacci, 1), std::invalid_argument);
    CHECK_THROWS_AS(probe_set(ProbeKind::latlon), std::invalid_argument);
}

}  // TEST_SUITE
