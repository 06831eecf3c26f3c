#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "relaynet/geometry.hpp"

using namespace relaynet;

namespace {

std::vector<TierSpec> case_study_tiers() {
    return {{6371.0, 0.0, 300}, {6946.0, 575.0, 140}, {7571.0, 1200.0, 720}};
}

ConstraintSet case_study_constraints() {
    return {kPi / 6.0, kPi / 10.0, 4000.0, kPi};
}

Vec3 on_sphere(double r, double polar, double azimuth) {
    return {r * std::sin(polar) * std::cos(azimuth), r * std::sin(polar) * std::sin(azimuth),
            r * std::cos(polar)};
}

}  // namespace

TEST_CASE("dome angle basics") {
    Vec3 a{1.0, 0.0, 0.0};
    CHECK(dome_angle(a, Vec3{2.0, 0.0, 0.0}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(dome_angle(a, Vec3{-3.0, 0.0, 0.0}) == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(dome_angle(a, Vec3{0.0, 5.0, 0.0}) == doctest::Approx(kPi / 2.0).epsilon(1e-12));
    CHECK_THROWS(dome_angle(a, Vec3{0.0, 0.0, 0.0}));
}

TEST_CASE("direction angle is measured between surface bearings") {
    Vec3 cur = on_sphere(6371.0, 0.3, 0.0);
    // Candidate and receiver further along the same meridian: zero deviation.
    Vec3 cand = on_sphere(6946.0, 0.5, 0.0);
    Vec3 rx = on_sphere(6371.0, 1.2, 0.0);
    CHECK(direction_angle(cur, cand, rx) == doctest::Approx(0.0).epsilon(1e-9));
    // Candidate straight back along the meridian: opposite bearing.
    Vec3 back = on_sphere(6946.0, 0.1, 0.0);
    CHECK(std::abs(direction_angle(cur, back, rx) - kPi) < 1e-6);
    // Candidate off the meridian by a quarter turn of azimuth at the same
    // polar angle band: deviation is strictly between 0 and pi.
    Vec3 side = on_sphere(6946.0, 0.5, kPi / 2.0);
    double d = direction_angle(cur, side, rx);
    CHECK(d > 0.0);
    CHECK(d < kPi);
}

TEST_CASE("maximum dome angle on the reference network") {
    auto tiers = case_study_tiers();
    auto c = case_study_constraints();
    CHECK(std::abs(max_dome_angle(0, 1, tiers, c) - 0.409755) < 5e-4);
    CHECK(std::abs(max_dome_angle(0, 2, tiers, c) - 0.556571) < 5e-4);
    CHECK(std::abs(max_dome_angle(2, 2, tiers, c) - 0.534678) < 5e-4);
    // Symmetric in its tier arguments.
    CHECK(max_dome_angle(1, 2, tiers, c) == doctest::Approx(max_dome_angle(2, 1, tiers, c)));
}

TEST_CASE("gateway-to-gateway links are blocked by the horizon") {
    auto tiers = case_study_tiers();
    auto c = case_study_constraints();
    // Two ground devices share no line of sight above the blocking sphere, so
    // the limit collapses to the sentinel and the pair is unreachable.
    CHECK(max_dome_angle(0, 0, tiers, c) == doctest::Approx(c.theta_s));
    CHECK_FALSE(pair_reachable(0, 0, tiers, c));
    CHECK(pair_reachable(0, 1, tiers, c));
    CHECK(pair_reachable(2, 2, tiers, c));
}

TEST_CASE("feasibility window") {
    auto tiers = case_study_tiers();
    auto c = case_study_constraints();
    SpherePoint cur{0, on_sphere(6371.0, 0.0, 0.0)};
    SpherePoint rx{0, on_sphere(6371.0, kPi / 2.0, 0.0)};
    double lim = max_dome_angle(0, 2, tiers, c);
    // Candidate toward the receiver inside the dome window.
    SpherePoint cand{2, on_sphere(7571.0, 0.5 * (c.theta_s + lim), 0.0)};
    CHECK(feasible(cand, cur, rx, c, lim));
    // Too close: inside the surface-device exclusion angle.
    SpherePoint close{2, on_sphere(7571.0, 0.5 * c.theta_s, 0.0)};
    CHECK_FALSE(feasible(close, cur, rx, c, lim));
    // Too far: beyond the dome limit.
    SpherePoint far{2, on_sphere(7571.0, lim + 0.05, 0.0)};
    CHECK_FALSE(feasible(far, cur, rx, c, lim));
    // Right dome angle but pointing away from the receiver.
    SpherePoint behind{2, on_sphere(7571.0, 0.5 * (c.theta_s + lim), kPi)};
    CHECK_FALSE(feasible(behind, cur, rx, c, lim));
}

TEST_CASE("uniform sphere sampler matches cap areas") {
    std::mt19937_64 rng(42);
    const int n = 100000;
    // The normalized cap area of the sampled polar angle must be Uniform(0,1):
    // Kolmogorov-Smirnov test at significance 0.01.
    std::vector<SpherePoint> pts = sample_uniform_sphere(7571.0, 2, n, rng);
    std::vector<double> u;
    u.reserve(n);
    for (const SpherePoint& p : pts) {
        REQUIRE(std::abs(p.position.norm() - 7571.0) < 1e-6);
        double polar = std::acos(clamp_unit(p.position.z / 7571.0));
        u.push_back(cap_fraction(polar));
    }
    std::sort(u.begin(), u.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        d = std::max(d, std::abs(u[i] - (i + 1.0) / n));
        d = std::max(d, std::abs(u[i] - static_cast<double>(i) / n));
    }
    double critical = 1.628 / std::sqrt(static_cast<double>(n));
    CHECK(d < critical);
}

TEST_CASE("tier validation") {
    CHECK_THROWS(validate_tiers({}));
    CHECK_THROWS(validate_tiers({{6371.0, 0.0, 0}}));                       // empty tier
    CHECK_THROWS(validate_tiers({{6371.0, 0.0, 10}, {6371.0, 0.0, 10}}));   // not increasing
    CHECK_THROWS(validate_tiers({{6371.0, 100.0, 10}}));                    // radius mismatch
    CHECK_NOTHROW(validate_tiers(case_study_tiers()));
}
