// Acceptance gate: every release criterion checked at its stated tolerance,
// one PASS/FAIL line each.  Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "relaynet/analytic.hpp"
#include "relaynet/geometry.hpp"
#include "relaynet/link_metrics.hpp"
#include "relaynet/markov.hpp"
#include "relaynet/simulator.hpp"
#include "relaynet/strategy.hpp"

using namespace relaynet;

namespace {

int failures = 0;

void check(const std::string& name, bool ok, const std::string& detail) {
    std::printf("%s %s (%s)\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    if (!ok) ++failures;
}

bool near(double got, double want, double tol) { return std::abs(got - want) < tol; }

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<TierSpec> case_tiers() {
    return {{6371.0, 0.0, 300}, {6946.0, 575.0, 140}, {7571.0, 1200.0, 720}};
}

ConstraintSet case_constraints() { return {kPi / 6.0, kPi / 10.0, 4000.0, kPi}; }

PriorityStrategy s321() { return PriorityStrategy{{3, 2, 1}}; }

bool matrix_near(const Matrix& got, const Matrix& want, double tol, double* worst) {
    *worst = 0.0;
    if (got.size() != want.size()) return false;
    bool ok = true;
    for (size_t i = 0; i < want.size(); ++i) {
        if (got[i].size() != want[i].size()) return false;
        for (size_t j = 0; j < want[i].size(); ++j) {
            double d = std::abs(got[i][j] - want[i][j]);
            *worst = std::max(*worst, d);
            if (d >= tol) ok = false;
        }
    }
    return ok;
}

void criterion_1() {
    auto tiers = case_tiers();
    auto c = case_constraints();
    double worst = 0.0;

    Matrix pi_got = tier_interruption_matrix(tiers, c);
    Matrix pi_want{{1.0000, 0.8208, 0.0466}, {0.6549, 0.5074, 0.0503}, {0.2787, 0.5591, 0.0659}};
    check("1.1 per-tier interruption matrix", matrix_near(pi_got, pi_want, 5e-4, &worst),
          "max |err| = " + fmt(worst));

    std::vector<double> ps = single_hop_vector(tiers, c);
    std::vector<double> ps_want{0.0383, 0.0166, 0.0102};
    worst = 0.0;
    for (size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(ps[i] - ps_want[i]));
    check("1.2 single-hop interruption vector", worst < 5e-4, "max |err| = " + fmt(worst));

    Matrix p = selection_interruption_matrix(tiers, c);
    Matrix t1 = build_t1(s321(), p);
    Matrix t1_want{{0.0, 0.0087, 0.9913}, {0.0089, 0.0253, 0.9658}, {0.0267, 0.0292, 0.9440}};
    check("1.3 single-hop transition matrix", matrix_near(t1, t1_want, 5e-4, &worst),
          "max |err| = " + fmt(worst));

    Matrix t2 = build_t2(s321(), p);
    Matrix t2_want{{0.0, 0.0084, 0.9534, 0.0383},
                   {0.0088, 0.0249, 0.9497, 0.0166},
                   {0.0265, 0.0289, 0.9344, 0.0102},
                   {0.0, 0.0, 0.0, 1.0}};
    check("1.4 absorbing transition matrix", matrix_near(t2, t2_want, 5e-4, &worst),
          "max |err| = " + fmt(worst));

    Matrix t3 = build_t3(s321(), p);
    Matrix t3_want{{0.0, 0.0084, 0.9534, 0.0383},
                   {0.0, 0.0249, 0.9497, 0.0254},
                   {0.0, 0.0289, 0.9344, 0.0367},
                   {0.0, 0.0, 0.0, 1.0}};
    check("1.5 final-hop transition matrix", matrix_near(t3, t3_want, 5e-4, &worst),
          "max |err| = " + fmt(worst));

    std::vector<std::vector<int>> order{{3, 2, 1}, {2, 3, 1}, {3, 1, 2},
                                        {2, 1, 3}, {1, 3, 2}, {1, 2, 3}};
    Matrix v_want{{0.0255, 0.0286, 0.9459, 0.0}, {0.0454, 0.0082, 0.9464, 0.0},
                  {0.0179, 0.4680, 0.5141, 0.0}, {0.2221, 0.4118, 0.3661, 0.0},
                  {0.4197, 0.0084, 0.5719, 0.0}, {0.3809, 0.1861, 0.4330, 0.0}};
    Matrix w_want{{0.0253, 0.0283, 0.9353, 0.0111}, {0.0449, 0.0081, 0.9354, 0.0116},
                  {0.0177, 0.4616, 0.5070, 0.0137}, {0.2194, 0.4051, 0.3564, 0.0191},
                  {0.4154, 0.0083, 0.5543, 0.0220}, {0.3766, 0.1818, 0.4195, 0.0221}};
    worst = 0.0;
    bool ok = true;
    for (size_t i = 0; i < order.size(); ++i) {
        StrategyReport r = evaluate_strategy(PriorityStrategy{order[i]}, p);
        for (size_t j = 0; j < 4; ++j) {
            double dv = std::abs(r.stationary[j] - v_want[i][j]);
            double dw = std::abs(r.weighted_row[j] - w_want[i][j]);
            worst = std::max({worst, dv, dw});
            if (dv >= 5e-4 || dw >= 5e-4) ok = false;
        }
    }
    check("1.6 strategy table (stationary + weighted rows)", ok, "max |err| = " + fmt(worst));
}

void criterion_2() {
    auto tiers = case_tiers();
    auto c = case_constraints();
    Matrix p = selection_interruption_matrix(tiers, c);
    HopStatistics h = hop_statistics(s321(), p, tiers, c);

    check("2.1 mean forward dome angle 0.4915 +/- 0.0005", near(h.theta_bar, 0.4915, 5e-4),
          "got " + fmt(h.theta_bar));
    check("2.2 expected successful hop count = 6", h.n_h == 6, "got " + std::to_string(h.n_h));

    std::vector<double> mu_want{87.516, 89.4314, 89.9615};
    double worst = 0.0;
    for (size_t i = 0; i < 3; ++i) worst = std::max(worst, std::abs(h.mu[i] - mu_want[i]));
    check("2.3 expected hops before interruption +/- 0.01", worst < 0.01,
          "max |err| = " + fmt(worst));

    Matrix t2 = build_t2(s321(), p);
    Matrix t3 = build_t3(s321(), p);
    double pm = multihop_interruption(t2, t3, std::max(2, h.n_h));
    check("2.4 multi-hop interruption 0.1031 +/- 0.0005", near(pm, 0.1031, 5e-4),
          "got " + fmt(pm));
}

void criterion_3() {
    auto tiers = case_tiers();
    auto c = case_constraints();
    const std::int64_t n = 100000;

    SimContext best(tiers, c, s321());
    SimulationEstimate eb = estimate(best, n, 1, 0);
    double sigma_b = std::sqrt(0.1033 * (1.0 - 0.1033) / n);
    check("3.1 simulated interruption, priority 3-2-1, within 3 sigma of 0.1033",
          std::abs(eb.interruption_probability - 0.1033) < 3.0 * sigma_b,
          "got " + fmt(eb.interruption_probability) + ", band +/- " + fmt(3.0 * sigma_b));

    SimContext worstc(tiers, c, PriorityStrategy{{1, 2, 3}});
    SimulationEstimate ew = estimate(worstc, n, 1, 0);
    double sigma_w = std::sqrt(0.3432 * (1.0 - 0.3432) / n);
    check("3.2 simulated interruption, priority 1-2-3, within 3 sigma of 0.3432",
          std::abs(ew.interruption_probability - 0.3432) < 3.0 * sigma_w,
          "got " + fmt(ew.interruption_probability) + ", band +/- " + fmt(3.0 * sigma_w));

    check("3.3 mean successful hop count in [5.9, 6.3]",
          eb.mean_hops_success > 5.9 && eb.mean_hops_success < 6.3,
          "got " + fmt(eb.mean_hops_success));

    // Simulated ranking across all six priority orders must match the
    // analytic weighted-interruption ranking.
    std::vector<std::vector<int>> order{{3, 2, 1}, {2, 3, 1}, {3, 1, 2},
                                        {2, 1, 3}, {1, 3, 2}, {1, 2, 3}};
    std::vector<double> sim;
    for (const auto& ranks : order) {
        SimContext ctx(tiers, c, PriorityStrategy{ranks});
        sim.push_back(estimate(ctx, n, 1, 0).interruption_probability);
    }
    bool sorted = true;
    std::string detail;
    for (size_t i = 0; i < sim.size(); ++i) {
        if (i && sim[i] < sim[i - 1]) sorted = false;
        if (i) detail += " ";
        detail += fmt(sim[i]);
    }
    check("3.4 simulated strategy ranking matches the analytic order", sorted, detail);
}

void criterion_4() {
    Matrix p = selection_interruption_matrix(case_tiers(), case_constraints());
    PriorityStrategy best = stationary_optimal(p);
    check("4.1 stationary-optimal strategy is 3-2-1", best.ranks == std::vector<int>{3, 2, 1},
          best.ranks.size() == 3 ? std::to_string(best.ranks[0]) + "-" +
                                       std::to_string(best.ranks[1]) + "-" +
                                       std::to_string(best.ranks[2])
                                 : "wrong size");

    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> ks(2, 5);
    int agreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        int k = ks(rng);
        Matrix q(k, std::vector<double>(k, 1.0));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) q[i][j] = unit(rng) < 0.15 ? 1.0 : unit(rng);
        if (q[0][k - 1] == 1.0) q[0][k - 1] = 0.5 * unit(rng);
        if (reachable_tiers(q).empty()) {
            ++agreements;
            continue;
        }
        double w_best = evaluate_strategy(stationary_optimal(q), q).weighted_interruption;
        double w_min = 2.0;
        for (const PriorityStrategy& s : detail::all_strategies(static_cast<size_t>(k)))
            w_min = std::min(w_min, evaluate_strategy(s, q).weighted_interruption);
        if (w_best == w_min) ++agreements;
    }
    check("4.2 search equals exhaustive minimum, 100 random instances", agreements == 100,
          std::to_string(agreements) + "/100");
}

void criterion_5() {
    // 5.1 row-stochasticity over 1000 random (matrix, strategy) pairs.
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> ks(2, 6);
    double worst_row = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        int k = ks(rng);
        Matrix q(k, std::vector<double>(k, 1.0));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) q[i][j] = unit(rng) < 0.2 ? 1.0 : unit(rng);
        PriorityStrategy s;
        s.ranks.resize(k);
        std::iota(s.ranks.begin(), s.ranks.end(), 1);
        std::shuffle(s.ranks.begin(), s.ranks.end(), rng);
        for (const Matrix& t : {build_t2(s, q), build_t3(s, q)}) {
            for (const auto& row : t) {
                double sum = 0.0;
                for (double x : row) sum += x;
                worst_row = std::max(worst_row, std::abs(sum - 1.0));
            }
        }
    }
    check("5.1 row-stochasticity of absorbing matrices to 1e-12", worst_row < 1e-12,
          "max |row sum - 1| = " + fmt(worst_row));

    // 5.2 stationary residual.
    auto tiers = case_tiers();
    auto c = case_constraints();
    Matrix p = selection_interruption_matrix(tiers, c);
    Matrix t1 = build_t1(s321(), p);
    std::vector<double> v = stationary_distribution(t1, reachable_tiers(p));
    double resid = 0.0;
    for (size_t j = 0; j < v.size(); ++j) {
        double vj = 0.0;
        for (size_t i = 0; i < v.size(); ++i) vj += v[i] * t1[i][j];
        resid = std::max(resid, std::abs(vj - v[j]));
    }
    check("5.2 stationary fixed-point residual < 1e-10", resid < 1e-10,
          "residual = " + fmt(resid));

    // 5.3 rank of an unreachable tier cannot matter.
    std::vector<TierSpec> tiers4 = case_tiers();
    tiers4.push_back({6371.0 + 30000.0, 30000.0, 50});
    Matrix p4 = selection_interruption_matrix(tiers4, c);
    auto pm_for = [&](const PriorityStrategy& s) {
        return multihop_interruption(build_t2(s, p4), build_t3(s, p4), 7);
    };
    double diff = std::abs(pm_for(PriorityStrategy{{3, 2, 1, 4}}) -
                           pm_for(PriorityStrategy{{4, 2, 1, 3}}));
    check("5.3 unreachable-tier rank invariance to 1e-12", diff < 1e-12, "diff = " + fmt(diff));

    // 5.4 expected absorption time against one million simulated chains.
    Matrix t2 = build_t2(s321(), p);
    std::vector<double> mu = hops_before_interruption(t2, reachable_tiers(p));
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int chains = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (int t = 0; t < chains; ++t) {
        int state = 0;
        long steps = 0;
        while (state != 3) {
            double u = u01(rng), acc = 0.0;
            int next = 3;
            for (int j = 0; j < 4; ++j) {
                acc += t2[state][j];
                if (u <= acc) {
                    next = j;
                    break;
                }
            }
            state = next;
            ++steps;
        }
        sum += static_cast<double>(steps);
        sumsq += static_cast<double>(steps) * static_cast<double>(steps);
    }
    double mean = sum / chains;
    double se = std::sqrt((sumsq / chains - mean * mean) / chains);
    check("5.4 expected absorption time matches 1e6 simulated chains (3 sigma)",
          std::abs(mean - mu[0]) < 3.0 * se,
          "analytic " + fmt(mu[0]) + ", simulated " + fmt(mean) + " +/- " + fmt(se));

    // 5.5 cap-area KS test for the sphere sampler.
    std::mt19937_64 krng(7);  // fixed, typical draw; the 0.01-level test has a 1% false-alarm rate
    const int ns = 100000;
    std::vector<SpherePoint> pts = sample_uniform_sphere(7571.0, 2, ns, krng);
    std::vector<double> uu;
    uu.reserve(ns);
    for (const SpherePoint& pt : pts)
        uu.push_back(cap_fraction(std::acos(clamp_unit(pt.position.z / 7571.0))));
    std::sort(uu.begin(), uu.end());
    double d = 0.0;
    for (int i = 0; i < ns; ++i) {
        d = std::max(d, std::abs(uu[i] - (i + 1.0) / ns));
        d = std::max(d, std::abs(uu[i] - static_cast<double>(i) / ns));
    }
    double critical = 1.628 / std::sqrt(static_cast<double>(ns));
    check("5.5 sphere sampler cap-area KS test at significance 0.01", d < critical,
          "D = " + fmt(d) + ", critical = " + fmt(critical));
}

void criterion_6() {
    auto tiers = case_tiers();
    auto c = case_constraints();
    Matrix p = selection_interruption_matrix(tiers, c);
    HopStatistics h = hop_statistics(s321(), p, tiers, c);
    Matrix t2 = build_t2(s321(), p);
    Matrix t3 = build_t3(s321(), p);
    double base = multihop_interruption(t2, t3, std::max(2, h.n_h));

    double diff = std::abs(multiflow_interruption(0.0, base, c.theta_m) - base);
    check("6.1 zero-dihedral flow reproduces the single-flow value to 1e-12", diff < 1e-12,
          "diff = " + fmt(diff));

    FlowSpec flows{{0.0, kPi / 8.0, kPi / 4.0}};
    double total = multiflow_total(flows, tiers, c, s321());
    check("6.2 three-flow total interruption below the single-flow value", total < base,
          "total " + fmt(total) + " vs single " + fmt(base));

    LinkBudget budget;
    bool dominated = true;
    double worst_gap = 0.0;
    for (double gdb : {-5.0, 0.0, 5.0, 10.0, 15.0}) {
        double g = std::pow(10.0, gdb / 10.0);
        double pc = coverage_probability(g, tiers, c, s321(), budget);
        for (double tau : {1.0, 2.0, 4.0, 8.0, 16.0}) {
            double pu = urllc_rate(g, tau, tiers, c, s321(), budget);
            worst_gap = std::max(worst_gap, pu - pc);
            if (pu > pc + 1e-12) dominated = false;
        }
    }
    check("6.3 latency-constrained success bounded by coverage on a 5x5 grid", dominated,
          "max (latency - coverage) = " + fmt(worst_gap));

    // 6.4 inverted-pyramid layouts beat mirrored pyramid layouts (10^4 trials).
    auto layout = [](double alpha) {
        std::vector<double> mult{1.0 - 2.0 * alpha, 1.0 - alpha, 1.0, 1.0 + alpha,
                                 1.0 + 2.0 * alpha};
        std::vector<double> heights{0.0, 300.0, 600.0, 900.0, 1200.0};
        std::vector<TierSpec> out;
        for (size_t i = 0; i < 5; ++i)
            out.push_back({kEarthRadiusKm + heights[i], heights[i],
                           std::max(1, static_cast<int>(std::lround(mult[i] * 300.0)))});
        return out;
    };
    bool asym = true;
    std::string detail;
    for (double alpha : {0.1, 0.3, 0.5}) {
        auto sim_at = [&](double a) {
            std::vector<TierSpec> t = layout(a);
            Matrix q = selection_interruption_matrix(t, c);
            SimContext ctx(t, c, stationary_optimal(q));
            return estimate(ctx, 10000, 17, 0).interruption_probability;
        };
        double plus = sim_at(alpha), minus = sim_at(-alpha);
        if (!(plus < minus)) asym = false;
        detail += fmt(plus) + "<" + fmt(minus) + " ";
    }
    check("6.4 inverted-pyramid layouts more reliable at alpha 0.1/0.3/0.5", asym, detail);

    // 6.5 interruption nonincreasing in tier count at 1500 total devices.
    bool monotone = true;
    std::string d12;
    double prev = 1.0;
    for (int k = 2; k <= 5; ++k) {
        std::vector<TierSpec> t;
        for (int i = 0; i < k; ++i) {
            double hkm = i == 0 ? 0.0 : 300.0 + (1200.0 - 300.0) * i / k;
            t.push_back({kEarthRadiusKm + hkm, hkm, std::max(1, 1500 / k)});
        }
        Matrix q = selection_interruption_matrix(t, c);
        double pm;
        if (reachable_tiers(q).empty()) {
            pm = 1.0;
        } else {
            SimContext ctx(t, c, stationary_optimal(q));
            pm = estimate(ctx, 10000, 23, 0).interruption_probability;
        }
        if (pm > prev + 1e-12) monotone = false;
        prev = pm;
        d12 += fmt(pm) + " ";
    }
    check("6.5 interruption nonincreasing in the number of tiers", monotone, d12);
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_3();  // slowest block last
    std::printf("%s: %d criterion check(s) failed\n", failures == 0 ? "OK" : "GATE FAILED",
                failures);
    return failures == 0 ? 0 : 1;
}
