#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "relaynet/markov.hpp"
#include "relaynet/strategy.hpp"

namespace relaynet {

inline constexpr double kSpeedOfLightKmS = 299792.458;  // km/s

struct ShadowedRicianParams {
    double b = 0.158;   // half the scatter power
    double m = 1.29;    // Nakagami shadowing severity
    double omega = 19.4;  // mean line-of-sight power
};

struct LinkBudget {
    double carrier_frequency_hz = 20e9;
    double transmit_power_w = 31.6227766016838;           // 15 dBW
    double antenna_gain = 14791.0838247619;               // 41.7 dBi
    double bandwidth_hz = 100e6;
    double noise_power_w = 3.6e-12;
    double rain_attenuation = 0.630957344480193;          // -2 dB
    double package_size_bits = 100e6;
    ShadowedRicianParams shadowed_rician;
    double snr_threshold = 1.0;                           // 0 dB
    double latency_threshold_s = 4.0;
};

struct FlowSpec {
    std::vector<double> dihedral_angles;  // rad, in [0, pi/2)
};

enum class LinkKind { SatTerrestrial, InterSatellite };

// One Shadowed-Rician power draw via the Gamma-shadowed LOS representation:
// LOS power Gamma(m, omega/m), scatter a complex Gaussian of total power 2b.
template <typename Rng>
double shadowed_rician_sample(const ShadowedRicianParams& p, Rng& rng) {
    std::gamma_distribution<double> los_power(p.m, p.omega / p.m);
    std::normal_distribution<double> gauss(0.0, std::sqrt(p.b));
    double a = std::sqrt(los_power(rng)) + gauss(rng);
    double q = gauss(rng);
    return a * a + q * q;
}

// Linear SNR of a single link at the given distance (km).  Satellite-to-
// ground links carry rain attenuation and Shadowed-Rician fading; links
// between satellites are deterministic free-space.
template <typename Rng>
double snr_sample(LinkKind kind, double distance_km, const LinkBudget& budget, Rng& rng) {
    if (distance_km <= 0.0) throw std::invalid_argument("snr_sample: distance must be > 0");
    double wavelength_term =
        kSpeedOfLightKmS * 1000.0 / (4.0 * kPi * budget.carrier_frequency_hz * distance_km * 1000.0);
    double snr = budget.transmit_power_w * budget.antenna_gain / budget.noise_power_w *
                 wavelength_term * wavelength_term;
    if (kind == LinkKind::SatTerrestrial)
        snr *= budget.rain_attenuation * shadowed_rician_sample(budget.shadowed_rician, rng);
    return snr;
}

// 1 - multi-hop interruption with the distance limit removed, so only Earth
// blockage constrains each pair.
inline double availability(const std::vector<TierSpec>& tiers, const ConstraintSet& c,
                           const PriorityStrategy& s) {
    ConstraintSet open = c;
    open.d_th = 1e30;  // distance never binds; only the line-of-sight term remains
    Matrix p_i = selection_interruption_matrix(tiers, open);
    std::set<int> reach = reachable_tiers(p_i);
    if (reach.empty()) return 0.0;
    Matrix t1 = build_t1(s, p_i);
    Matrix t2 = build_t2(s, p_i);
    Matrix t3 = build_t3(s, p_i);
    std::vector<double> v = stationary_distribution(t1, reach);
    double theta_bar = mean_forward_dome_angle(t1, v, tiers, open);
    int n_h = std::max(2, hops_for_success(open.theta_m, theta_bar));
    return 1.0 - multihop_interruption(t2, t3, n_h);
}

namespace detail {

// Contact-angle CDF on a tier of n devices: F(theta) = 1 - ((1+cos theta)/2)^n.
inline double contact_cdf(double theta, long n) {
    return 1.0 - std::pow((1.0 + std::cos(theta)) / 2.0, static_cast<double>(n));
}

inline double chord_km(double ra, double rb, double theta) {
    return std::sqrt(std::max(0.0, ra * ra + rb * rb - 2.0 * ra * rb * std::cos(theta)));
}

// Sorted fading draws reused across quadrature nodes; exceedance by binary
// search.
struct FadingTable {
    std::vector<double> draws;

    FadingTable(const ShadowedRicianParams& p, int n, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        draws.resize(static_cast<size_t>(n));
        for (double& d : draws) d = shadowed_rician_sample(p, rng);
        std::sort(draws.begin(), draws.end());
    }

    double exceedance(double threshold) const {
        auto it = std::upper_bound(draws.begin(), draws.end(), threshold);
        return static_cast<double>(draws.end() - it) / static_cast<double>(draws.size());
    }
};

// P[SNR > gamma] for a link whose other endpoint is the contact-angle nearest
// device on a tier of n devices at radius rb, seen from radius ra.
// Riemann-Stieltjes sum of the (possibly faded) free-space exceedance against
// the contact-angle CDF.
inline double link_exceedance(double gamma, double ra, double rb, long n, LinkKind kind,
                              const LinkBudget& budget, const FadingTable* fading) {
    auto exceed_at = [&](double theta) {
        double d = chord_km(ra, rb, theta);
        if (d <= 0.0) return 1.0;
        double wavelength_term = kSpeedOfLightKmS * 1000.0 /
                                 (4.0 * kPi * budget.carrier_frequency_hz * d * 1000.0);
        double base = budget.transmit_power_w * budget.antenna_gain / budget.noise_power_w *
                      wavelength_term * wavelength_term;
        if (kind == LinkKind::InterSatellite) return base > gamma ? 1.0 : 0.0;
        base *= budget.rain_attenuation;
        return fading->exceedance(gamma / base);
    };
    const int intervals = 512;  // even; CDF support is [0, pi]
    double h = kPi / intervals;
    double total = 0.0;
    double prev_cdf = contact_cdf(0.0, n), prev_val = exceed_at(0.0);
    for (int i = 1; i <= intervals; ++i) {
        double theta = i * h;
        double cdf = contact_cdf(theta, n);
        double val = exceed_at(theta);
        total += 0.5 * (prev_val + val) * (cdf - prev_cdf);
        prev_cdf = cdf;
        prev_val = val;
    }
    return total;
}

struct CoverageContext {
    std::vector<double> v;
    int n_h = 2;
    double p1 = 0.0;  // P[SNR_1 > gamma], satellite-terrestrial
    double p2 = 0.0;  // P[SNR_2 > gamma], inter-satellite
};

inline CoverageContext coverage_context(double gamma, const std::vector<TierSpec>& tiers,
                                        const ConstraintSet& c, const PriorityStrategy& s,
                                        const LinkBudget& budget) {
    if (gamma <= 0.0) throw std::invalid_argument("coverage: gamma must be > 0 (linear)");
    Matrix p_i = selection_interruption_matrix(tiers, c);
    std::set<int> reach = reachable_tiers(p_i);
    if (reach.empty()) throw std::invalid_argument("coverage: no reachable tier");
    Matrix t1 = build_t1(s, p_i);
    CoverageContext ctx;
    ctx.v = stationary_distribution(t1, reach);
    double theta_bar = mean_forward_dome_angle(t1, ctx.v, tiers, c);
    ctx.n_h = std::max(2, hops_for_success(c.theta_m, theta_bar));

    FadingTable fading(budget.shadowed_rician, 100000, 0x5eedf00dULL);
    double sat_weight = 0.0;
    for (size_t i = 1; i < tiers.size(); ++i) sat_weight += ctx.v[i];
    if (sat_weight <= 0.0) throw std::invalid_argument("coverage: no satellite tier in use");
    for (size_t i = 1; i < tiers.size(); ++i) {
        if (ctx.v[i] == 0.0) continue;
        ctx.p1 += ctx.v[i] / sat_weight *
                  link_exceedance(gamma, tiers[0].radius_km, tiers[i].radius_km, tiers[i].count,
                                  LinkKind::SatTerrestrial, budget, &fading);
    }
    for (size_t i = 1; i < tiers.size(); ++i) {
        if (ctx.v[i] == 0.0) continue;
        for (size_t j = 1; j < tiers.size(); ++j) {
            if (ctx.v[j] == 0.0) continue;
            ctx.p2 += ctx.v[i] * ctx.v[j] / (sat_weight * sat_weight) *
                      link_exceedance(gamma, tiers[i].radius_km, tiers[j].radius_km,
                                      tiers[j].count, LinkKind::InterSatellite, budget, nullptr);
        }
    }
    return ctx;
}

}  // namespace detail

// End-to-end coverage probability: both satellite-terrestrial end hops exceed
// gamma and each of the n_h - 2 middle hops exceeds it under the stationary
// mix of gateway and satellite relays.
inline double coverage_probability(double gamma, const std::vector<TierSpec>& tiers,
                                   const ConstraintSet& c, const PriorityStrategy& s,
                                   const LinkBudget& budget) {
    detail::CoverageContext ctx = detail::coverage_context(gamma, tiers, c, s, budget);
    double middle = ctx.v[0] * ctx.p1 + (1.0 - ctx.v[0]) * ctx.p2;
    return ctx.p1 * ctx.p1 * std::pow(middle, ctx.n_h - 2);
}

// Mean end-hop and middle-hop link distances (km) at the mean forward dome
// angle, stationary-weighted.
inline std::pair<double, double> mean_link_distances(const std::vector<double>& v,
                                                     double theta_bar,
                                                     const std::vector<TierSpec>& tiers) {
    double d1 = 0.0, d2 = 0.0;
    for (size_t i = 0; i < tiers.size(); ++i) {
        d1 += v[i] * detail::chord_km(tiers[0].radius_km, tiers[i].radius_km, theta_bar);
        for (size_t j = 0; j < tiers.size(); ++j)
            d2 += v[i] * v[j] *
                  detail::chord_km(tiers[i].radius_km, tiers[j].radius_km, theta_bar);
    }
    return {d1, d2};
}

// URLLC rate: coverage at gamma jointly with the rate needed to deliver the
// package within the latency budget after subtracting propagation delay.
// The as-printed variant reproduces the published expression verbatim
// (which omits the package size; see README).
inline double urllc_rate(double gamma, double tau_s, const std::vector<TierSpec>& tiers,
                         const ConstraintSet& c, const PriorityStrategy& s,
                         const LinkBudget& budget, bool as_printed = false) {
    detail::CoverageContext ctx = detail::coverage_context(gamma, tiers, c, s, budget);
    Matrix p_i = selection_interruption_matrix(tiers, c);
    Matrix t1 = build_t1(s, p_i);
    std::set<int> reach = reachable_tiers(p_i);
    std::vector<double> v = stationary_distribution(t1, reach);
    double theta_bar = mean_forward_dome_angle(t1, v, tiers, c);
    auto [d1, d2] = mean_link_distances(v, theta_bar, tiers);
    double total_distance_km = 2.0 * d1 + (ctx.n_h - 2) * d2;
    double coverage_g = coverage_probability(gamma, tiers, c, s, budget);

    double gamma2;
    if (as_printed) {
        double exponent = tau_s * std::log(2.0) / (ctx.n_h * budget.bandwidth_hz) -
                          std::log(2.0) * total_distance_km * 1000.0 /
                              (kSpeedOfLightKmS * 1000.0 * ctx.n_h * budget.bandwidth_hz);
        gamma2 = std::exp(exponent) - 1.0;
    } else {
        double propagation_s = total_distance_km / kSpeedOfLightKmS;
        double budget_s = tau_s - propagation_s;
        if (budget_s <= 0.0) return 0.0;
        // n_h transmissions of the package must fit the remaining budget:
        // log2(1 + SNR) >= package * n_h / (B * budget).
        double rate_bits_per_hz = budget.package_size_bits * ctx.n_h /
                                  (budget.bandwidth_hz * budget_s);
        gamma2 = std::exp2(rate_bits_per_hz) - 1.0;
    }
    if (gamma2 <= 0.0) return coverage_g;  // latency constraint vacuous
    return coverage_g * coverage_probability(gamma2, tiers, c, s, budget);
}

// Interruption probability of a single flow routed along the inferior arc at
// dihedral angle theta from the shortest arc.
inline double multiflow_interruption(double theta_dihedral, double base_pm, double theta_m) {
    if (theta_dihedral < 0.0 || theta_dihedral >= kPi / 2.0)
        throw std::invalid_argument("multiflow_interruption: dihedral angle in [0, pi/2)");
    double half = theta_m / 2.0;
    double root = std::sqrt(1.0 - std::pow(std::cos(half) * std::sin(theta_dihedral), 2.0));
    double asin_arg = clamp_unit(std::sin(half) / root);
    return base_pm * (theta_m / (2.0 * root)) / std::asin(asin_arg);
}

// Total interruption of a multi-flow route: the route fails only when every
// flow fails, so the flow interruptions multiply.
inline double multiflow_total(const FlowSpec& flows, const std::vector<TierSpec>& tiers,
                              const ConstraintSet& c, const PriorityStrategy& s) {
    if (flows.dihedral_angles.empty())
        throw std::invalid_argument("multiflow_total: no flows given");
    Matrix p_i = selection_interruption_matrix(tiers, c);
    HopStatistics h = hop_statistics(s, p_i, tiers, c);
    Matrix t2 = build_t2(s, p_i);
    Matrix t3 = build_t3(s, p_i);
    double base_pm = multihop_interruption(t2, t3, std::max(2, h.n_h));
    double total = 1.0;
    for (double theta : flows.dihedral_angles)
        total *= multiflow_interruption(theta, base_pm, c.theta_m);
    return total;
}

}  // namespace relaynet
