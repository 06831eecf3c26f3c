#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "relaynet/analytic.hpp"
#include "relaynet/geometry.hpp"

namespace relaynet {

// Tier-priority strategy: ranks[i] is the 1-based rank of tier i; a smaller
// rank means the tier is searched earlier.
struct PriorityStrategy {
    std::vector<int> ranks;

    bool valid() const {
        std::vector<int> sorted = ranks;
        std::sort(sorted.begin(), sorted.end());
        for (size_t i = 0; i < sorted.size(); ++i)
            if (sorted[i] != static_cast<int>(i) + 1) return false;
        return !ranks.empty();
    }

    // Tier indices in search order (highest priority first).
    std::vector<int> order() const {
        std::vector<int> idx(ranks.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return ranks[a] < ranks[b]; });
        return idx;
    }

    bool operator==(const PriorityStrategy& o) const { return ranks == o.ranks; }
    bool operator<(const PriorityStrategy& o) const { return ranks < o.ranks; }
};

struct HopStatistics {
    std::vector<double> mu;  // expected hops before interruption, per start tier
    int n_h = 1;             // expected hops for a successful route
    double theta_bar = 0.0;  // mean forward dome angle per hop (rad)
};

namespace detail {
inline void check_strategy(const PriorityStrategy& s, const Matrix& p_i) {
    if (!s.valid() || s.ranks.size() != p_i.size())
        throw std::invalid_argument("invalid priority strategy");
}
}  // namespace detail

// T1: probability of the next relay being in tier j given the hop succeeds.
// Rows with no usable relay at all are emitted as zero rows.
inline Matrix build_t1(const PriorityStrategy& s, const Matrix& p_i) {
    detail::check_strategy(s, p_i);
    size_t k = p_i.size();
    std::vector<double> ps = row_products(p_i);
    Matrix t1(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
        if (ps[i] >= 1.0) continue;  // tier cannot start a hop
        for (size_t j = 0; j < k; ++j) {
            double value = (1.0 - p_i[i][j]) / (1.0 - ps[i]);
            for (size_t m = 0; m < k; ++m)
                if (s.ranks[j] > s.ranks[m]) value *= p_i[i][m];
            t1[i][j] = value;
        }
    }
    return t1;
}

// T2: the unnormalized transition matrix augmented with the absorbing
// "interrupted" state in row/column K.
inline Matrix build_t2(const PriorityStrategy& s, const Matrix& p_i) {
    detail::check_strategy(s, p_i);
    size_t k = p_i.size();
    std::vector<double> ps = row_products(p_i);
    Matrix t2(k + 1, std::vector<double>(k + 1, 0.0));
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < k; ++j) {
            double value = 1.0 - p_i[i][j];
            for (size_t m = 0; m < k; ++m)
                if (s.ranks[j] > s.ranks[m]) value *= p_i[i][m];
            t2[i][j] = value;
        }
        t2[i][k] = ps[i];
    }
    t2[k][k] = 1.0;
    return t2;
}

// T3: final-hop variant of T2.  Tiers that cannot reach tier 1 (exact
// sentinel p_i[j][0] == 1) cannot deliver, so transitions into them are
// forbidden and their mass joins the absorbing column.
inline Matrix build_t3(const PriorityStrategy& s, const Matrix& p_i) {
    detail::check_strategy(s, p_i);
    size_t k = p_i.size();
    Matrix t3(k + 1, std::vector<double>(k + 1, 0.0));
    for (size_t i = 0; i < k; ++i) {
        double row_sum = 0.0;
        for (size_t j = 0; j < k; ++j) {
            if (p_i[j][0] == 1.0) continue;
            double value = 1.0 - p_i[i][j];
            for (size_t m = 0; m < k; ++m)
                if (s.ranks[j] > s.ranks[m] && p_i[m][0] != 1.0) value *= p_i[i][m];
            t3[i][j] = value;
            row_sum += value;
        }
        t3[i][k] = 1.0 - row_sum;
    }
    t3[k][k] = 1.0;
    return t3;
}

// Tiers reachable from tier 1 through pairs with p_i != 1, by transitive
// closure.  Tier 1 itself is included when some cycle returns to it.
inline std::set<int> reachable_tiers(const Matrix& p_i) {
    size_t k = p_i.size();
    std::set<int> reach;
    std::vector<int> frontier;
    auto try_add = [&](int j) {
        if (!reach.count(j)) {
            reach.insert(j);
            frontier.push_back(j);
        }
    };
    for (size_t j = 0; j < k; ++j)
        if (p_i[0][j] != 1.0) try_add(static_cast<int>(j));
    while (!frontier.empty()) {
        int i = frontier.back();
        frontier.pop_back();
        for (size_t j = 0; j < k; ++j)
            if (p_i[i][j] != 1.0) try_add(static_cast<int>(j));
    }
    return reach;
}

// Stationary distribution v with v T1 = v, solved on the reachable submatrix
// as an augmented least-squares system (T^T - I with a sum-to-one row).
inline std::vector<double> stationary_distribution(const Matrix& t1, const std::set<int>& reach) {
    size_t k = t1.size();
    std::vector<int> idx(reach.begin(), reach.end());
    size_t m = idx.size();
    if (m == 0) throw std::invalid_argument("stationary_distribution: empty reachable set");
    Eigen::MatrixXd a(m + 1, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m + 1);
    for (size_t r = 0; r < m; ++r)
        for (size_t c = 0; c < m; ++c)
            a(r, c) = t1[idx[c]][idx[r]] - (r == c ? 1.0 : 0.0);
    for (size_t c = 0; c < m; ++c) a(m, c) = 1.0;
    b(m) = 1.0;
    Eigen::VectorXd x = a.colPivHouseholderQr().solve(b);
    std::vector<double> v(k, 0.0);
    for (size_t c = 0; c < m; ++c) v[idx[c]] = x(c);
    return v;
}

// Expected hops before absorption: mu = (I - Q)^{-1} 1 on the reachable
// interior block of T2.
inline std::vector<double> hops_before_interruption(const Matrix& t2, const std::set<int>& reach) {
    size_t k = t2.size() - 1;
    std::vector<int> idx(reach.begin(), reach.end());
    size_t m = idx.size();
    std::vector<double> mu(k, 0.0);
    if (m == 0) return mu;
    Eigen::MatrixXd a(m, m);
    for (size_t r = 0; r < m; ++r)
        for (size_t c = 0; c < m; ++c)
            a(r, c) = (r == c ? 1.0 : 0.0) - t2[idx[r]][idx[c]];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible())
        throw std::runtime_error("hops_before_interruption: chain is not absorbing");
    Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(m));
    for (size_t r = 0; r < m; ++r) mu[idx[r]] = x(r);
    return mu;
}

// Wallis product prod_{k=1..n} (2k-1)/(2k), accumulated in log space.
inline double wallis_product(long n) {
    double log_w = 0.0;
    for (long k = 1; k <= n; ++k)
        log_w += std::log(2.0 * k - 1.0) - std::log(2.0 * k);
    return std::exp(log_w);
}

// Mean forward dome angle per hop: contact-angle expectation remapped into
// the search sector, weighted by the stationary tier-transition frequencies.
inline double mean_forward_dome_angle(const Matrix& t1, const std::vector<double>& v,
                                      const std::vector<TierSpec>& tiers, const ConstraintSet& c) {
    size_t k = tiers.size();
    double theta_bar = 0.0;
    for (size_t i = 0; i < k; ++i) {
        if (v[i] == 0.0) continue;
        for (size_t j = 0; j < k; ++j) {
            if (t1[i][j] == 0.0) continue;
            long n = (i == j) ? tiers[j].count - 1 : tiers[j].count;
            if (n < 1) continue;
            double w = wallis_product(n);
            double theta_ij = max_dome_angle(static_cast<int>(i), static_cast<int>(j), tiers, c);
            double arg = 2.0 * kPi / c.theta_r - 2.0 * kPi / c.theta_r * std::cos(kPi * w) +
                         std::cos(theta_ij);
            theta_bar += v[i] * t1[i][j] * std::acos(clamp_unit(arg));
        }
    }
    return theta_bar;
}

// Expected successful-route hop count: theta_m / theta_bar rounded to the
// nearest integer (half up), floored at 1.
inline int hops_for_success(double theta_m, double theta_bar) {
    if (theta_bar <= 0.0) throw std::invalid_argument("hops_for_success: theta_bar must be > 0");
    return std::max(1, static_cast<int>(std::floor(theta_m / theta_bar + 0.5)));
}

// e_1 (T2)^{n_h - 2} T3 e_{K+1}, evaluated by iterated row-vector products.
inline double multihop_interruption(const Matrix& t2, const Matrix& t3, int n_h) {
    if (n_h < 2) throw std::invalid_argument("multihop_interruption: n_h must be >= 2");
    size_t n = t2.size();
    std::vector<double> row(n, 0.0);
    row[0] = 1.0;
    auto step = [&](const Matrix& t) {
        std::vector<double> next(n, 0.0);
        for (size_t i = 0; i < n; ++i) {
            if (row[i] == 0.0) continue;
            for (size_t j = 0; j < n; ++j) next[j] += row[i] * t[i][j];
        }
        row.swap(next);
    };
    for (int h = 0; h < n_h - 2; ++h) step(t2);
    step(t3);
    return row[n - 1];
}

// Interruption probability accumulated over the first n hops of a route whose
// predicted length is n_e.
inline double cumulative_interruption(int n, int n_e, const Matrix& t2, const Matrix& t3) {
    if (n < 0 || n_e < 2) throw std::invalid_argument("cumulative_interruption: bad arguments");
    if (n >= n_e - 1) return multihop_interruption(t2, t3, n_e);
    size_t sz = t2.size();
    std::vector<double> row(sz, 0.0);
    row[0] = 1.0;
    for (int h = 0; h < n; ++h) {
        std::vector<double> next(sz, 0.0);
        for (size_t i = 0; i < sz; ++i) {
            if (row[i] == 0.0) continue;
            for (size_t j = 0; j < sz; ++j) next[j] += row[i] * t2[i][j];
        }
        row.swap(next);
    }
    return row[sz - 1];
}

// Stationary-weighted single-hop interruption probability.
inline double weighted_single_hop(const std::vector<double>& v, const std::vector<double>& ps) {
    double w = 0.0;
    for (size_t i = 0; i < v.size(); ++i) w += v[i] * ps[i];
    return w;
}

// Full per-strategy hop statistics from a selection interruption matrix.
inline HopStatistics hop_statistics(const PriorityStrategy& s, const Matrix& p_i,
                                    const std::vector<TierSpec>& tiers, const ConstraintSet& c) {
    Matrix t1 = build_t1(s, p_i);
    Matrix t2 = build_t2(s, p_i);
    std::set<int> reach = reachable_tiers(p_i);
    std::vector<double> v = stationary_distribution(t1, reach);
    HopStatistics h;
    h.mu = hops_before_interruption(t2, reach);
    h.theta_bar = mean_forward_dome_angle(t1, v, tiers, c);
    h.n_h = hops_for_success(c.theta_m, h.theta_bar);
    return h;
}

}  // namespace relaynet
