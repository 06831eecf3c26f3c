#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "relaynet/markov.hpp"

namespace relaynet {

struct StrategyReport {
    PriorityStrategy strategy;
    std::vector<double> stationary;       // augmented (v, 0)
    std::vector<double> weighted_row;     // w = (v, 0) * T2
    double weighted_interruption = 1.0;   // w's last element
};

namespace detail {

inline std::vector<PriorityStrategy> all_strategies(size_t k) {
    std::vector<int> ranks(k);
    std::iota(ranks.begin(), ranks.end(), 1);
    std::vector<PriorityStrategy> out;
    do {
        out.push_back({ranks});
    } while (std::next_permutation(ranks.begin(), ranks.end()));
    return out;
}

}  // namespace detail

// Stationary weights and weighted single-hop interruption for one strategy.
inline StrategyReport evaluate_strategy(const PriorityStrategy& s, const Matrix& p_i) {
    std::set<int> reach = reachable_tiers(p_i);
    if (reach.empty()) throw std::invalid_argument("evaluate_strategy: no reachable tier");
    Matrix t1 = build_t1(s, p_i);
    Matrix t2 = build_t2(s, p_i);
    std::vector<double> v = stationary_distribution(t1, reach);
    size_t k = p_i.size();
    StrategyReport r;
    r.strategy = s;
    r.stationary = v;
    r.stationary.push_back(0.0);
    r.weighted_row.assign(k + 1, 0.0);
    for (size_t j = 0; j <= k; ++j)
        for (size_t i = 0; i < k; ++i) r.weighted_row[j] += v[i] * t2[i][j];
    r.weighted_interruption = r.weighted_row[k];
    return r;
}

// Exhaustive search over all K! strategies for the minimum weighted
// single-hop interruption; ties break to the lexicographically smallest
// rank vector.
inline PriorityStrategy stationary_optimal(const Matrix& p_i) {
    if (reachable_tiers(p_i).empty())
        throw std::invalid_argument("stationary_optimal: no feasible strategy");
    PriorityStrategy best;
    double best_w = std::numeric_limits<double>::infinity();
    for (const PriorityStrategy& s : detail::all_strategies(p_i.size())) {
        double w = evaluate_strategy(s, p_i).weighted_interruption;
        if (w < best_w || (w == best_w && (best.ranks.empty() || s.ranks < best.ranks))) {
            best_w = w;
            best = s;
        }
    }
    return best;
}

// Rank tiers ascending by single-hop interruption probability; ties go to the
// lower tier index.
inline PriorityStrategy single_hop_inspired(const std::vector<double>& ps) {
    size_t k = ps.size();
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ps[a] < ps[b]; });
    PriorityStrategy s;
    s.ranks.assign(k, 0);
    for (size_t r = 0; r < k; ++r) s.ranks[idx[r]] = static_cast<int>(r) + 1;
    return s;
}

// Rank satellite tiers by decreasing surface density N_i / (4 pi R_i^2); the
// gateway tier and unreachable tiers always rank last (in tier order).
inline PriorityStrategy density_inspired(const std::vector<TierSpec>& tiers,
                                         const std::set<int>& reach) {
    size_t k = tiers.size();
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    auto demoted = [&](int i) { return i == 0 || !reach.count(i); };
    auto density = [&](int i) {
        return tiers[i].count / (4.0 * kPi * tiers[i].radius_km * tiers[i].radius_km);
    };
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (demoted(a) != demoted(b)) return !demoted(a);
        if (demoted(a)) return a < b;
        return density(a) > density(b);
    });
    PriorityStrategy s;
    s.ranks.assign(k, 0);
    for (size_t r = 0; r < k; ++r) s.ranks[idx[r]] = static_cast<int>(r) + 1;
    return s;
}

// Demote every tier that cannot reach tier 1 (exact sentinel) below all tiers
// that can, preserving relative order within each group.  Used for the final
// hops so the last relay can hand off to the receiver.
inline PriorityStrategy penultimate_adjust(const PriorityStrategy& s, const Matrix& p_i) {
    if (!s.valid() || s.ranks.size() != p_i.size())
        throw std::invalid_argument("penultimate_adjust: invalid strategy");
    std::vector<int> order = s.order();
    std::vector<int> can, cannot;
    for (int tier : order)
        (p_i[tier][0] != 1.0 ? can : cannot).push_back(tier);
    PriorityStrategy out;
    out.ranks.assign(s.ranks.size(), 0);
    int rank = 1;
    for (int tier : can) out.ranks[tier] = rank++;
    for (int tier : cannot) out.ranks[tier] = rank++;
    return out;
}

// Strategy minimizing the interruption probability of the remaining route
// from the current tier (0-based), using the final-hop matrix for the last
// two hops.
inline PriorityStrategy dynamic_priority(int current_tier, int remaining_hops, const Matrix& p_i) {
    if (remaining_hops < 1) throw std::invalid_argument("dynamic_priority: remaining_hops >= 1");
    size_t k = p_i.size();
    if (current_tier < 0 || current_tier >= static_cast<int>(k))
        throw std::out_of_range("dynamic_priority: current tier");
    PriorityStrategy best;
    double best_p = std::numeric_limits<double>::infinity();
    for (const PriorityStrategy& s : detail::all_strategies(k)) {
        Matrix t3 = build_t3(s, p_i);
        std::vector<double> row(k + 1, 0.0);
        row[static_cast<size_t>(current_tier)] = 1.0;
        if (remaining_hops > 2) {
            Matrix t2 = build_t2(s, p_i);
            for (int h = 0; h < remaining_hops - 2; ++h) {
                std::vector<double> next(k + 1, 0.0);
                for (size_t i = 0; i <= k; ++i)
                    for (size_t j = 0; j <= k; ++j) next[j] += row[i] * t2[i][j];
                row.swap(next);
            }
        }
        std::vector<double> fin(k + 1, 0.0);
        for (size_t i = 0; i <= k; ++i)
            for (size_t j = 0; j <= k; ++j) fin[j] += row[i] * t3[i][j];
        double p = fin[k];
        if (p < best_p || (p == best_p && (best.ranks.empty() || s.ranks < best.ranks))) {
            best_p = p;
            best = s;
        }
    }
    return best;
}

}  // namespace relaynet
