#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "relaynet/strategy.hpp"

namespace relaynet {

enum class RouteOutcome { Success, Interrupted };

struct RouteTrace {
    RouteOutcome outcome = RouteOutcome::Interrupted;
    int hops = 0;                     // relay selections completed
    std::vector<int> tier_sequence;   // transmitter tier followed by each relay's tier (1-based)
    std::optional<int> interrupted_at;  // 1-based hop index of the failed selection
};

struct SimulationEstimate {
    double interruption_probability = 0.0;
    double standard_error = 0.0;
    double mean_hops_success = 0.0;
    std::map<int, std::int64_t> hop_histogram;      // hops -> trial count (all outcomes)
    std::vector<std::int64_t> per_hop_interruptions;  // index h-1: failures at hop h
    std::int64_t iterations = 0;
    std::int64_t interrupted = 0;
};

// Precomputed per-run routing context shared by all trials.
struct SimContext {
    std::vector<TierSpec> tiers;
    ConstraintSet constraints;
    PriorityStrategy strategy;
    PriorityStrategy adjusted;       // strategy for the final approach
    std::vector<int> order;          // strategy search order
    std::vector<int> adjusted_order;
    Matrix max_dome;                 // pairwise dome limits
    std::vector<double> reach_rx;    // dome limit toward the receiver tier
    std::vector<char> can_deliver;   // tier can hand off to the receiver
    double theta_bar = 0.0;          // mean hop advance, drives the final-approach switch

    SimContext(std::vector<TierSpec> t, ConstraintSet c, PriorityStrategy s)
        : tiers(std::move(t)), constraints(c), strategy(std::move(s)) {
        validate_tiers(tiers);
        if (!strategy.valid() || strategy.ranks.size() != tiers.size())
            throw std::invalid_argument("SimContext: invalid strategy");
        size_t k = tiers.size();
        Matrix p_i = selection_interruption_matrix(tiers, constraints);
        adjusted = penultimate_adjust(strategy, p_i);
        order = strategy.order();
        adjusted_order = adjusted.order();
        max_dome.assign(k, std::vector<double>(k, 0.0));
        reach_rx.assign(k, 0.0);
        can_deliver.assign(k, 0);
        for (size_t i = 0; i < k; ++i) {
            for (size_t j = 0; j < k; ++j)
                max_dome[i][j] =
                    max_dome_angle(static_cast<int>(i), static_cast<int>(j), tiers, constraints);
            reach_rx[i] = max_dome[i][0];
            can_deliver[i] = reach_rx[i] > constraints.theta_s ? 1 : 0;
        }
        Matrix t1 = build_t1(strategy, p_i);
        std::set<int> reach = reachable_tiers(p_i);
        if (!reach.empty()) {
            std::vector<double> v = stationary_distribution(t1, reach);
            theta_bar = mean_forward_dome_angle(t1, v, tiers, constraints);
        }
        if (theta_bar <= 0.0) theta_bar = constraints.theta_s;
    }
};

namespace detail {

// SplitMix64 scramble for decorrelated per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(trial + 0x5851F42D4C957F2Dull)));
}

}  // namespace detail

// One Monte Carlo routing trial on a fresh device realization.
template <typename Rng>
RouteTrace run_route(const SimContext& ctx, Rng& rng) {
    const size_t k = ctx.tiers.size();
    const ConstraintSet& c = ctx.constraints;
    std::vector<std::vector<SpherePoint>> points(k);
    for (size_t t = 0; t < k; ++t)
        points[t] = sample_uniform_sphere(ctx.tiers[t].radius_km, static_cast<int>(t),
                                          ctx.tiers[t].count, rng);
    const double r1 = ctx.tiers[0].radius_km;
    const SpherePoint receiver{0, Vec3{r1 * std::sin(c.theta_m), 0.0, r1 * std::cos(c.theta_m)}};
    SpherePoint current{0, Vec3{0.0, 0.0, r1}};

    RouteTrace trace;
    trace.tier_sequence.push_back(1);
    const int max_hops = 100000;
    for (int hop = 1; hop <= max_hops; ++hop) {
        double remaining = dome_angle(current, receiver);
        if (ctx.can_deliver[current.tier_index] && remaining <= ctx.reach_rx[current.tier_index]) {
            trace.outcome = RouteOutcome::Success;
            return trace;
        }
        const std::vector<int>& order =
            remaining <= 2.0 * ctx.theta_bar ? ctx.adjusted_order : ctx.order;
        const SpherePoint* picked = nullptr;
        double picked_dome_rx = 0.0;
        for (int tier : order) {
            double limit = ctx.max_dome[current.tier_index][tier];
            for (const SpherePoint& cand : points[tier]) {
                // the current device itself sits at dome 0 and fails theta_s
                if (!feasible(cand, current, receiver, c, limit)) continue;
                double d = dome_angle(cand, receiver);
                if (!picked || d < picked_dome_rx) {
                    picked = &cand;
                    picked_dome_rx = d;
                }
            }
            if (picked) break;
        }
        if (!picked) {
            trace.outcome = RouteOutcome::Interrupted;
            trace.interrupted_at = hop;
            return trace;
        }
        current = *picked;
        trace.tier_sequence.push_back(current.tier_index + 1);
        trace.hops = hop;
    }
    trace.outcome = RouteOutcome::Interrupted;
    trace.interrupted_at = max_hops;
    return trace;
}

// Parallel Monte Carlo aggregate.  Per-trial RNG substreams depend only on
// (seed, trial index) and tallies are integers, so the result is identical
// for any thread count.
inline SimulationEstimate estimate(const SimContext& ctx, std::int64_t iterations,
                                   std::uint64_t seed, int threads = 0) {
    if (iterations < 1) throw std::invalid_argument("estimate: iterations must be >= 1");
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 1;
    threads = static_cast<int>(std::min<std::int64_t>(threads, iterations));

    struct Tally {
        std::int64_t interrupted = 0;
        std::int64_t success_hops = 0;
        std::int64_t successes = 0;
        std::map<int, std::int64_t> histogram;
        std::vector<std::int64_t> per_hop;
    };
    std::vector<Tally> tallies(static_cast<size_t>(threads));
    auto worker = [&](int w) {
        Tally& tally = tallies[static_cast<size_t>(w)];
        for (std::int64_t trial = w; trial < iterations; trial += threads) {
            std::mt19937_64 rng = detail::trial_rng(seed, static_cast<std::uint64_t>(trial));
            RouteTrace trace = run_route(ctx, rng);
            ++tally.histogram[trace.hops];
            if (trace.outcome == RouteOutcome::Interrupted) {
                ++tally.interrupted;
                int at = trace.interrupted_at.value();
                if (static_cast<int>(tally.per_hop.size()) < at) tally.per_hop.resize(at, 0);
                ++tally.per_hop[at - 1];
            } else {
                ++tally.successes;
                tally.success_hops += trace.hops;
            }
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker, w);
        for (std::thread& t : pool) t.join();
    }

    SimulationEstimate est;
    est.iterations = iterations;
    std::int64_t success_hops = 0, successes = 0;
    for (const Tally& tally : tallies) {
        est.interrupted += tally.interrupted;
        successes += tally.successes;
        success_hops += tally.success_hops;
        for (const auto& [hops, n] : tally.histogram) est.hop_histogram[hops] += n;
        if (est.per_hop_interruptions.size() < tally.per_hop.size())
            est.per_hop_interruptions.resize(tally.per_hop.size(), 0);
        for (size_t i = 0; i < tally.per_hop.size(); ++i)
            est.per_hop_interruptions[i] += tally.per_hop[i];
    }
    double p = static_cast<double>(est.interrupted) / static_cast<double>(iterations);
    est.interruption_probability = p;
    est.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(iterations));
    est.mean_hops_success =
        successes > 0 ? static_cast<double>(success_hops) / static_cast<double>(successes) : 0.0;
    return est;
}

// Simulated estimate for every strategy, sorted ascending by interruption
// probability (ties by rank vector).
inline std::vector<std::pair<PriorityStrategy, SimulationEstimate>> exhaustive_search(
    const std::vector<TierSpec>& tiers, const ConstraintSet& c, std::int64_t iterations,
    std::uint64_t seed, int threads = 0) {
    if (tiers.size() > 8)
        throw std::invalid_argument("exhaustive_search: K! budget exceeded for K > 8");
    std::vector<std::pair<PriorityStrategy, SimulationEstimate>> out;
    for (const PriorityStrategy& s : detail::all_strategies(tiers.size())) {
        SimContext ctx(tiers, c, s);
        out.emplace_back(s, estimate(ctx, iterations, seed, threads));
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.second.interruption_probability != b.second.interruption_probability)
            return a.second.interruption_probability < b.second.interruption_probability;
        return a.first.ranks < b.first.ranks;
    });
    return out;
}

}  // namespace relaynet
