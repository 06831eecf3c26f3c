#pragma once

#include <cmath>
#include <vector>

#include "relaynet/geometry.hpp"

namespace relaynet {

using Matrix = std::vector<std::vector<double>>;

namespace detail {

// (1 - (theta_r/4pi)(cos theta_s - cos theta_ij)) ^ exponent, in log space for
// very large exponents so mega-constellation counts do not underflow.
inline double void_probability(double theta_s, double theta_r, double theta_ij, long exponent) {
    if (theta_ij <= theta_s) return 1.0;  // exact sentinel: zero-area region
    double base = 1.0 - theta_r / (4.0 * kPi) * (std::cos(theta_s) - std::cos(theta_ij));
    if (base <= 0.0) return 0.0;
    if (exponent > 1000) return std::exp(static_cast<double>(exponent) * std::log(base));
    return std::pow(base, static_cast<double>(exponent));
}

}  // namespace detail

// Tier-to-tier interruption probability: chance that a device in tier i finds
// no usable relay in tier j.  Searching the own tier excludes the searcher, so
// the diagonal exponent is N_i - 1.
inline Matrix tier_interruption_matrix(const std::vector<TierSpec>& tiers,
                                       const ConstraintSet& c) {
    size_t k = tiers.size();
    Matrix p(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j) {
            long n = (i == j) ? tiers[j].count - 1 : tiers[j].count;
            p[i][j] = detail::void_probability(
                c.theta_s, c.theta_r, max_dome_angle(static_cast<int>(i), static_cast<int>(j), tiers, c), n);
        }
    return p;
}

// Variant feeding the transition-matrix pipeline: the full tier count is used
// for every entry, own tier included.  The published multi-hop reference
// values (transition matrices, stationary weights, hitting times) are only
// reproduced under this convention, while the displayed per-pair matrix uses
// N_i - 1 on the diagonal; both are exposed so each consumer can match its
// reference.
inline Matrix selection_interruption_matrix(const std::vector<TierSpec>& tiers,
                                            const ConstraintSet& c) {
    size_t k = tiers.size();
    Matrix p(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i)
        for (size_t j = 0; j < k; ++j)
            p[i][j] = detail::void_probability(
                c.theta_s, c.theta_r, max_dome_angle(static_cast<int>(i), static_cast<int>(j), tiers, c),
                tiers[j].count);
    return p;
}

// Single-hop interruption probability per start tier: no tier has any usable
// relay.  Equals the row product of tier_interruption_matrix.
inline std::vector<double> single_hop_vector(const std::vector<TierSpec>& tiers,
                                             const ConstraintSet& c) {
    Matrix p = tier_interruption_matrix(tiers, c);
    std::vector<double> ps(p.size(), 1.0);
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < p.size(); ++j) ps[i] *= p[i][j];
    return ps;
}

// Row product of an arbitrary interruption matrix.
inline std::vector<double> row_products(const Matrix& p) {
    std::vector<double> ps(p.size(), 1.0);
    for (size_t i = 0; i < p.size(); ++i)
        for (size_t j = 0; j < p[i].size(); ++j) ps[i] *= p[i][j];
    return ps;
}

}  // namespace relaynet
