#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace relaynet {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kEarthRadiusKm = 6371.0;

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
        return {x / n, y / n, z / n};
    }
};

// One spherical shell of relay devices. Tier 1 (index 0) is the gateway layer.
struct TierSpec {
    double radius_km = kEarthRadiusKm;  // = kEarthRadiusKm + height_km
    double height_km = 0.0;
    int count = 1;
};

struct ConstraintSet {
    double theta_r = kPi / 6;   // max direction angle (rad)
    double theta_s = kPi / 10;  // min dome angle (rad)
    double d_th = 4000.0;       // max reliable link distance (km)
    double theta_m = kPi;       // transmitter-receiver dome angle (rad)
};

struct SpherePoint {
    int tier_index = 0;  // 0-based
    Vec3 position;       // scaled by the tier radius
};

inline double clamp_unit(double v) { return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v); }

// Central angle at the sphere center between the two device rays.
inline double dome_angle(const Vec3& p, const Vec3& q) {
    double np = p.norm(), nq = q.norm();
    if (np == 0.0 || nq == 0.0) throw std::invalid_argument("dome_angle: zero-norm input");
    return std::acos(clamp_unit(p.dot(q) / (np * nq)));
}

inline double dome_angle(const SpherePoint& p, const SpherePoint& q) {
    return dome_angle(p.position, q.position);
}

// Angle at `current` between the local horizontal bearings toward `candidate`
// and toward `receiver` (both chords projected onto the tangent plane at
// `current`).  A candidate on the great-circle arc toward the receiver has
// direction angle 0; one straight behind has pi.  The raw chord-to-chord angle
// is useless here: for any ascending hop it exceeds pi/2 regardless of how
// well-aligned the candidate is, so the constraint is evaluated in the
// horizontal projection.
inline double direction_angle(const Vec3& current, const Vec3& candidate, const Vec3& receiver) {
    Vec3 up = current.normalized();
    Vec3 to_c = candidate - current;
    Vec3 to_r = receiver - current;
    if (to_c.norm() == 0.0 || to_r.norm() == 0.0)
        throw std::invalid_argument("direction_angle: coincident points");
    Vec3 hc = to_c - up * to_c.dot(up);
    Vec3 hr = to_r - up * to_r.dot(up);
    double nc = hc.norm(), nr = hr.norm();
    if (nc == 0.0 || nr == 0.0) return 0.0;  // radially aligned: no lateral deviation
    return std::acos(clamp_unit(hc.dot(hr) / (nc * nr)));
}

inline double direction_angle(const SpherePoint& current, const SpherePoint& candidate,
                              const SpherePoint& receiver) {
    return direction_angle(current.position, candidate.position, receiver.position);
}

// Maximum dome angle between devices of tiers i and j (0-based): the smaller
// of the distance limit and the Earth line-of-sight limit, floored at theta_s.
// A result equal to theta_s is the sentinel for "pair cannot communicate".
inline double max_dome_angle(int i, int j, const std::vector<TierSpec>& tiers,
                             const ConstraintSet& c) {
    if (i < 0 || j < 0 || i >= static_cast<int>(tiers.size()) ||
        j >= static_cast<int>(tiers.size()))
        throw std::out_of_range("max_dome_angle: tier index");
    double ri = tiers[i].radius_km, rj = tiers[j].radius_km;
    double r1 = tiers[0].radius_km;
    double a = (ri * ri + rj * rj - c.d_th * c.d_th) / (2.0 * ri * rj);
    double dist_term = std::acos(clamp_unit(a));
    double los_term = std::acos(clamp_unit(r1 / ri)) + std::acos(clamp_unit(r1 / rj));
    return std::max(c.theta_s, std::min(dist_term, los_term));
}

// True when the pair's dome limit is not the theta_s sentinel, i.e. the two
// tiers can actually communicate.
inline bool pair_reachable(int i, int j, const std::vector<TierSpec>& tiers,
                           const ConstraintSet& c) {
    return max_dome_angle(i, j, tiers, c) > c.theta_s;
}

// Relay-selection feasibility: lateral deviation within +-theta_r/2 of the
// receiver bearing and dome angle in [theta_s, theta_max].  The half-width
// theta_r/2 makes the accepted sector's total azimuthal width theta_r, which
// is the width the void-probability formulas integrate over; the empirical
// per-hop void frequencies agree with them only under this convention.
inline bool feasible(const SpherePoint& candidate, const SpherePoint& current,
                     const SpherePoint& receiver, const ConstraintSet& c, double theta_max) {
    double dome = dome_angle(current, candidate);
    if (dome < c.theta_s || dome > theta_max) return false;
    return direction_angle(current, candidate, receiver) <= c.theta_r / 2.0;
}

// n i.i.d. uniform points on the sphere of the given radius (inverse-CDF in
// cos(theta), uniform azimuth).
template <typename Rng>
std::vector<SpherePoint> sample_uniform_sphere(double radius, int tier_index, int n, Rng& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<SpherePoint> pts;
    pts.reserve(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double cz = 2.0 * unit(rng) - 1.0;
        double phi = 2.0 * kPi * unit(rng);
        double sz = std::sqrt(std::max(0.0, 1.0 - cz * cz));
        pts.push_back({tier_index, Vec3{radius * sz * std::cos(phi), radius * sz * std::sin(phi),
                                        radius * cz}});
    }
    return pts;
}

// Fraction of the sphere inside a cap of dome angle theta.
inline double cap_fraction(double theta) { return (1.0 - std::cos(theta)) / 2.0; }

inline void validate_tiers(const std::vector<TierSpec>& tiers) {
    if (tiers.empty()) throw std::invalid_argument("tier list is empty");
    double prev = 0.0;
    for (size_t i = 0; i < tiers.size(); ++i) {
        const TierSpec& t = tiers[i];
        if (t.count < 1) throw std::invalid_argument("tier count must be >= 1");
        if (std::abs(t.radius_km - (tiers[0].radius_km + t.height_km)) > 1e-6 * t.radius_km)
            throw std::invalid_argument("tier radius must equal base radius + height");
        if (i > 0 && t.radius_km <= prev)
            throw std::invalid_argument("tier radii must be strictly increasing");
        prev = t.radius_km;
    }
}

}  // namespace relaynet
