// Command-line front end: analyze, simulate, strategy-search, metrics, sweep.
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relaynet/analytic.hpp"
#include "relaynet/config.hpp"
#include "relaynet/csv.hpp"
#include "relaynet/geometry.hpp"
#include "relaynet/link_metrics.hpp"
#include "relaynet/markov.hpp"
#include "relaynet/simulator.hpp"
#include "relaynet/strategy.hpp"

namespace fs = std::filesystem;
using namespace relaynet;

namespace {

struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::int64_t> iterations;
    std::optional<std::uint64_t> seed;
    std::string strategy_csv;
    int threads = 0;
    std::vector<int> ne;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool config_required = true) {
    auto* c = cmd->add_option("--config", o.config_path, "path to the JSON configuration");
    if (config_required) c->required();
    cmd->add_option("--out", o.out_dir, "output directory for CSV reports");
    cmd->add_option("--iterations", o.iterations, "Monte Carlo trial count override");
    cmd->add_option("--seed", o.seed, "random seed override");
    cmd->add_option("--strategy", o.strategy_csv, "explicit priority ranks, e.g. \"3,2,1\"");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware concurrency)");
    cmd->add_option("--ne", o.ne, "route-length horizons for the cumulative curve");
}

ExperimentConfig load_with_overrides(const CommonOpts& o) {
    ExperimentConfig cfg = load_config(o.config_path);
    if (o.iterations) {
        if (*o.iterations < 1) throw ConfigError("--iterations must be >= 1");
        cfg.iterations = *o.iterations;
    }
    if (o.seed) cfg.seed = *o.seed;
    if (!o.strategy_csv.empty()) {
        PriorityStrategy s;
        std::stringstream ss(o.strategy_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) s.ranks.push_back(std::stoi(tok));
        if (!s.valid() || s.ranks.size() != cfg.tiers.size())
            throw ConfigError("--strategy: not a permutation of 1..K");
        cfg.explicit_strategy = s;
        cfg.strategy_mode = StrategyMode::Explicit;
    }
    return cfg;
}

std::string strategy_label(const PriorityStrategy& s) {
    std::string out;
    for (size_t i = 0; i < s.ranks.size(); ++i) {
        if (i) out += '-';
        out += std::to_string(s.ranks[i]);
    }
    return out;
}

// Throws InfeasibleError with a reachable-set diagnostic when no relay tier
// can be part of any route.
std::set<int> require_reachable(const Matrix& p_sel) {
    std::set<int> reach = reachable_tiers(p_sel);
    if (reach.empty()) {
        std::string msg = "infeasible network: no relay tier is reachable from the gateway tier";
        throw InfeasibleError(msg);
    }
    return reach;
}

void write_matrix(const fs::path& path, const Matrix& m, const std::string& stem) {
    CsvWriter w(path.string());
    std::vector<std::string> cols{"row"};
    size_t ncol = m.empty() ? 0 : m[0].size();
    for (size_t j = 0; j < ncol; ++j) cols.push_back(stem + "_" + std::to_string(j + 1));
    w.header(cols);
    for (size_t i = 0; i < m.size(); ++i) w.row(m[i], std::to_string(i + 1));
}

int cmd_analyze(const CommonOpts& o) {
    ExperimentConfig cfg = load_with_overrides(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);

    Matrix p_tier = tier_interruption_matrix(cfg.tiers, cfg.constraints);
    Matrix p_sel = selection_interruption_matrix(cfg.tiers, cfg.constraints);
    std::vector<double> ps = single_hop_vector(cfg.tiers, cfg.constraints);
    write_matrix(out / "pI.csv", p_tier, "tier");
    {
        CsvWriter w((out / "pS.csv").string());
        std::vector<std::string> cols;
        for (size_t i = 0; i < ps.size(); ++i) cols.push_back("tier_" + std::to_string(i + 1));
        w.header(cols);
        w.row(ps);
    }

    std::set<int> reach = require_reachable(p_sel);
    PriorityStrategy s = resolve_strategy(cfg);
    Matrix t1 = build_t1(s, p_sel);
    Matrix t2 = build_t2(s, p_sel);
    Matrix t3 = build_t3(s, p_sel);
    write_matrix(out / "t1.csv", t1, "tier");
    write_matrix(out / "t2.csv", t2, "state");
    write_matrix(out / "t3.csv", t3, "state");

    std::vector<double> v = stationary_distribution(t1, reach);
    {
        CsvWriter w((out / "stationary.csv").string());
        std::vector<std::string> cols;
        for (size_t i = 0; i < v.size(); ++i) cols.push_back("tier_" + std::to_string(i + 1));
        w.header(cols);
        w.row(v);
    }

    HopStatistics h = hop_statistics(s, p_sel, cfg.tiers, cfg.constraints);
    {
        CsvWriter w((out / "hop_stats.csv").string());
        std::vector<std::string> cols{"theta_bar_o", "n_h"};
        for (size_t i = 0; i < h.mu.size(); ++i) cols.push_back("mu_" + std::to_string(i + 1));
        w.header(cols);
        std::vector<double> row{h.theta_bar, static_cast<double>(h.n_h)};
        row.insert(row.end(), h.mu.begin(), h.mu.end());
        w.row(row);
    }

    int n_h = std::max(2, h.n_h);
    {
        CsvWriter w((out / "multihop.csv").string());
        w.header({"strategy", "n_h", "p_multihop"});
        w.row({static_cast<double>(n_h), multihop_interruption(t2, t3, n_h)}, strategy_label(s));
    }

    std::vector<int> horizons = o.ne;
    if (horizons.empty()) horizons.push_back(n_h);
    {
        CsvWriter w((out / "cumulative.csv").string());
        w.header({"n_e", "n", "p_cumulative"});
        for (int ne : horizons) {
            if (ne < 2) throw ConfigError("--ne: horizons must be >= 2");
            for (int n = 0; n <= ne; ++n)
                w.row({static_cast<double>(n), cumulative_interruption(n, ne, t2, t3)},
                      std::to_string(ne));
        }
    }

    // Every permutation of tier priorities, best first.
    if (cfg.tiers.size() <= 6) {
        std::vector<StrategyReport> reports;
        for (const PriorityStrategy& cand : detail::all_strategies(cfg.tiers.size()))
            reports.push_back(evaluate_strategy(cand, p_sel));
        std::stable_sort(reports.begin(), reports.end(),
                         [](const StrategyReport& a, const StrategyReport& b) {
                             return a.weighted_interruption < b.weighted_interruption;
                         });
        CsvWriter w((out / "strategies.csv").string());
        std::vector<std::string> cols{"strategy"};
        size_t k = cfg.tiers.size();
        for (size_t i = 0; i < k; ++i) cols.push_back("v_" + std::to_string(i + 1));
        for (size_t i = 0; i <= k; ++i) cols.push_back("w_" + std::to_string(i + 1));
        w.header(cols);
        for (const StrategyReport& r : reports) {
            std::vector<double> row(r.stationary.begin(), r.stationary.begin() + k);
            row.insert(row.end(), r.weighted_row.begin(), r.weighted_row.end());
            w.row(row, strategy_label(r.strategy));
        }
    }
    return 0;
}

int cmd_simulate(const CommonOpts& o) {
    ExperimentConfig cfg = load_with_overrides(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    require_reachable(selection_interruption_matrix(cfg.tiers, cfg.constraints));
    PriorityStrategy s = resolve_strategy(cfg);
    SimContext ctx(cfg.tiers, cfg.constraints, s);
    SimulationEstimate est = estimate(ctx, cfg.iterations, cfg.seed, o.threads);

    {
        CsvWriter w((out / "estimate.csv").string());
        w.header({"strategy", "p_hat", "stderr", "mean_hops_success", "iterations", "interrupted"});
        w.row({est.interruption_probability, est.standard_error, est.mean_hops_success,
               static_cast<double>(est.iterations), static_cast<double>(est.interrupted)},
              strategy_label(s));
    }
    {
        CsvWriter w((out / "hop_histogram.csv").string());
        w.header({"hops", "count"});
        for (const auto& [hops, count] : est.hop_histogram)
            w.row({static_cast<double>(count)}, std::to_string(hops));
    }
    {
        CsvWriter w((out / "per_hop_interruptions.csv").string());
        w.header({"hop", "count"});
        for (size_t i = 0; i < est.per_hop_interruptions.size(); ++i)
            w.row({static_cast<double>(est.per_hop_interruptions[i])}, std::to_string(i + 1));
    }
    return 0;
}

int cmd_strategy_search(const CommonOpts& o) {
    ExperimentConfig cfg = load_with_overrides(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    Matrix p_sel = selection_interruption_matrix(cfg.tiers, cfg.constraints);
    require_reachable(p_sel);
    PriorityStrategy best = stationary_optimal(p_sel);
    StrategyReport rep = evaluate_strategy(best, p_sel);
    {
        CsvWriter w((out / "strategy_search.csv").string());
        w.header({"strategy", "weighted_interruption"});
        if (cfg.tiers.size() <= 8) {
            std::vector<StrategyReport> reports;
            for (const PriorityStrategy& cand : detail::all_strategies(cfg.tiers.size()))
                reports.push_back(evaluate_strategy(cand, p_sel));
            std::stable_sort(reports.begin(), reports.end(),
                             [](const StrategyReport& a, const StrategyReport& b) {
                                 return a.weighted_interruption < b.weighted_interruption;
                             });
            for (const StrategyReport& r : reports)
                w.row({r.weighted_interruption}, strategy_label(r.strategy));
        } else {
            w.row({rep.weighted_interruption}, strategy_label(best));
        }
    }
    std::cout << "best strategy: " << strategy_label(best)
              << " weighted_interruption=" << CsvWriter::format(rep.weighted_interruption)
              << "\n";
    return 0;
}

int cmd_metrics(const CommonOpts& o) {
    ExperimentConfig cfg = load_with_overrides(o);
    fs::create_directories(o.out_dir);
    fs::path out(o.out_dir);
    Matrix p_sel = selection_interruption_matrix(cfg.tiers, cfg.constraints);
    require_reachable(p_sel);
    PriorityStrategy s = resolve_strategy(cfg);

    {
        CsvWriter w((out / "availability.csv").string());
        w.header({"availability"});
        w.row({availability(cfg.tiers, cfg.constraints, s)});
    }

    HopStatistics h = hop_statistics(s, p_sel, cfg.tiers, cfg.constraints);
    Matrix t2 = build_t2(s, p_sel);
    Matrix t3 = build_t3(s, p_sel);
    double base_pm = multihop_interruption(t2, t3, std::max(2, h.n_h));

    {
        CsvWriter w((out / "multiflow.csv").string());
        w.header({"theta_dihedral", "p_flow", "p_total_up_to_here"});
        std::vector<double> thetas;
        if (cfg.flows)
            thetas = cfg.flows->dihedral_angles;
        else
            for (int i = 0; i < 8; ++i) thetas.push_back(i * kPi / 16.0);
        double total = 1.0;
        for (double th : thetas) {
            double p = multiflow_interruption(th, base_pm, cfg.constraints.theta_m);
            total *= p;
            w.row({th, p, total});
        }
    }

    if (!cfg.link_budget) {
        std::cerr << "metrics: coverage/URLLC need a link_budget section "
                     "(carrier_frequency_hz, transmit_power_dbw, antenna_gain_dbi, "
                     "bandwidth_hz, noise_power_w, rain_attenuation_db, package_size_bits, "
                     "shadowed_rician{b,m,omega}, snr_threshold_db, latency_threshold_s)\n";
        return 2;
    }
    const LinkBudget& budget = *cfg.link_budget;

    std::vector<double> gamma_db{-10, -5, 0, 5, 10, 15, 20};
    {
        CsvWriter w((out / "coverage.csv").string());
        w.header({"gamma_db", "p_coverage"});
        for (double gdb : gamma_db) {
            double g = std::pow(10.0, gdb / 10.0);
            w.row({gdb, coverage_probability(g, cfg.tiers, cfg.constraints, s, budget)});
        }
    }
    {
        CsvWriter w((out / "urllc.csv").string());
        w.header({"gamma_db", "tau_s", "p_urllc"});
        std::vector<double> taus{1.0, 2.0, budget.latency_threshold_s, 8.0, 16.0};
        for (double gdb : gamma_db) {
            double g = std::pow(10.0, gdb / 10.0);
            for (double tau : taus)
                w.row({gdb, tau, urllc_rate(g, tau, cfg.tiers, cfg.constraints, s, budget)});
        }
    }
    return 0;
}

// Analytic multihop interruption for a given network under the stationary
// optimal strategy; 1.0 when the network is infeasible.
double analytic_interruption(const std::vector<TierSpec>& tiers, const ConstraintSet& c,
                             StrategyMode mode = StrategyMode::StationaryOptimal) {
    Matrix p_sel = selection_interruption_matrix(tiers, c);
    std::set<int> reach = reachable_tiers(p_sel);
    if (reach.empty()) return 1.0;
    PriorityStrategy s;
    switch (mode) {
        case StrategyMode::SingleHop:
            s = single_hop_inspired(single_hop_vector(tiers, c));
            break;
        case StrategyMode::Density:
            s = density_inspired(tiers, reach);
            break;
        default:
            s = stationary_optimal(p_sel);
            break;
    }
    HopStatistics h = hop_statistics(s, p_sel, tiers, c);
    Matrix t2 = build_t2(s, p_sel);
    Matrix t3 = build_t3(s, p_sel);
    return multihop_interruption(t2, t3, std::max(2, h.n_h));
}

std::vector<TierSpec> nonuniform_layout(double alpha) {
    std::vector<double> mult{1.0 - 2.0 * alpha, 1.0 - alpha, 1.0, 1.0 + alpha, 1.0 + 2.0 * alpha};
    std::vector<double> heights{0.0, 300.0, 600.0, 900.0, 1200.0};
    std::vector<TierSpec> tiers;
    for (size_t i = 0; i < 5; ++i) {
        TierSpec t;
        t.height_km = heights[i];
        t.radius_km = kEarthRadiusKm + heights[i];
        t.count = std::max(1, static_cast<int>(std::lround(mult[i] * 300.0)));
        tiers.push_back(t);
    }
    return tiers;
}

std::vector<TierSpec> equidistant_layout(int k, int total_devices) {
    std::vector<TierSpec> tiers;
    int per = std::max(1, total_devices / k);
    for (int i = 0; i < k; ++i) {
        TierSpec t;
        t.height_km = i == 0 ? 0.0 : 300.0 + (1200.0 - 300.0) * i / k;
        t.radius_km = kEarthRadiusKm + t.height_km;
        t.count = per;
        tiers.push_back(t);
    }
    return tiers;
}

int cmd_sweep(const CommonOpts& o) {
    ExperimentConfig cfg = load_with_overrides(o);
    if (!cfg.sweep) throw ConfigError("sweep: config must contain a sweep section");
    fs::create_directories(o.out_dir);
    CsvWriter w((fs::path(o.out_dir) / "sweep.csv").string());
    const SweepSpec& sw = *cfg.sweep;
    const ConstraintSet& c = cfg.constraints;

    if (sw.kind == "nonuniformity") {
        std::vector<double> alphas = sw.values;
        if (alphas.empty())
            for (int i = -5; i <= 5; ++i) alphas.push_back(i / 10.0);
        w.header({"alpha", "strategy_mode", "p_multihop"});
        for (double a : alphas)
            for (StrategyMode m : {StrategyMode::StationaryOptimal, StrategyMode::SingleHop,
                                   StrategyMode::Density})
                w.row({a, analytic_interruption(nonuniform_layout(a), c, m)},
                      CsvWriter::format(a) + "," + detail::mode_name(m));
    } else if (sw.kind == "tier_count") {
        std::vector<double> ks = sw.values;
        if (ks.empty()) ks = {2, 3, 4, 5, 6};
        w.header({"tiers", "strategy_mode", "p_multihop"});
        for (double kd : ks) {
            int k = static_cast<int>(kd);
            for (StrategyMode m : {StrategyMode::StationaryOptimal, StrategyMode::SingleHop,
                                   StrategyMode::Density})
                w.row({static_cast<double>(k),
                       analytic_interruption(equidistant_layout(k, 1500), c, m)},
                      std::to_string(k) + "," + detail::mode_name(m));
        }
    } else if (sw.kind == "count_height") {
        std::vector<double> counts = sw.values;
        if (counts.empty()) counts = {200, 400, 800, 1600, 3200};
        w.header({"height_km", "satellites", "p_multihop"});
        for (double hkm : {300.0, 600.0, 900.0, 1200.0}) {
            for (double n : counts) {
                std::vector<TierSpec> tiers{
                    {kEarthRadiusKm, 0.0, 500},
                    {kEarthRadiusKm + hkm, hkm, static_cast<int>(n)}};
                w.row({hkm, n, analytic_interruption(tiers, c)});
            }
        }
    } else if (sw.kind == "gateway_tradeoff") {
        std::vector<double> gateways = sw.values;
        if (gateways.empty()) gateways = {100, 200, 300, 400, 500, 600, 700, 800, 900};
        w.header({"gateways", "satellites_per_tier", "p_multihop"});
        const double target = 0.1, tol = 0.002;
        for (double gd : gateways) {
            int g = static_cast<int>(gd);
            auto eval = [&](int per_tier) {
                std::vector<TierSpec> tiers{{kEarthRadiusKm, 0.0, g},
                                            {kEarthRadiusKm + 600.0, 600.0, per_tier},
                                            {kEarthRadiusKm + 900.0, 900.0, per_tier},
                                            {kEarthRadiusKm + 1200.0, 1200.0, per_tier}};
                return analytic_interruption(tiers, c);
            };
            int lo = 1, hi = 1 << 20;  // interruption decreases with satellite count
            double p_lo = eval(lo), p_hi = eval(hi);
            if (p_lo < target - tol || p_hi > target + tol) {
                w.row({gd, -1.0, p_lo});
                continue;
            }
            int best = hi;
            double p_best = p_hi;
            while (lo + 1 < hi) {
                int mid = lo + (hi - lo) / 2;
                double p = eval(mid);
                if (std::abs(p - target) <= tol) {
                    best = mid;
                    p_best = p;
                    break;
                }
                if (p > target)
                    lo = mid;
                else {
                    hi = mid;
                    best = mid;
                    p_best = p;
                }
            }
            w.row({gd, static_cast<double>(best), p_best});
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-tier relay network reliability toolkit"};
    app.require_subcommand(1);

    CommonOpts oa, os, ox, om, ow;
    auto* a = app.add_subcommand("analyze", "analytic matrices, hop statistics, strategies");
    add_common(a, oa);
    auto* si = app.add_subcommand("simulate", "Monte Carlo routing simulation");
    add_common(si, os);
    auto* x = app.add_subcommand("strategy-search", "optimal priority strategy search");
    add_common(x, ox);
    auto* m = app.add_subcommand("metrics", "availability, coverage, URLLC, multi-flow");
    add_common(m, om);
    auto* sw = app.add_subcommand("sweep", "parameter sweeps over network layouts");
    add_common(sw, ow);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (a->parsed()) return cmd_analyze(oa);
        if (si->parsed()) return cmd_simulate(os);
        if (x->parsed()) return cmd_strategy_search(ox);
        if (m->parsed()) return cmd_metrics(om);
        if (sw->parsed()) return cmd_sweep(ow);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
