#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "relaynet/link_metrics.hpp"
#include "relaynet/markov.hpp"

namespace relaynet {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class StrategyMode { Explicit, StationaryOptimal, SingleHop, Density, Dynamic };

struct SweepSpec {
    std::string kind;  // "nonuniformity", "tier_count", "count_height", "gateway_tradeoff"
    std::vector<double> values;
};

struct ExperimentConfig {
    std::vector<TierSpec> tiers;
    ConstraintSet constraints;
    StrategyMode strategy_mode = StrategyMode::StationaryOptimal;
    std::optional<PriorityStrategy> explicit_strategy;
    std::int64_t iterations = 100000;
    std::uint64_t seed = 1;
    std::optional<LinkBudget> link_budget;
    std::optional<FlowSpec> flows;
    std::optional<SweepSpec> sweep;
};

namespace detail {

// Accepts a plain number or strings like "pi", "pi/6", "2*pi", "0.5".
inline double parse_angle(const nlohmann::json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ConfigError(field + ": expected number or angle string");
    std::string s = j.get<std::string>();
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    double scale = 1.0;
    size_t star = t.find("*pi");
    size_t pi = t.find("pi");
    try {
        if (star != std::string::npos) {
            double mult = std::stod(t.substr(0, star));
            std::string rest = t.substr(star + 3);
            if (rest.empty()) return mult * kPi;
            if (rest[0] == '/') return mult * kPi / std::stod(rest.substr(1));
        } else if (pi == 0) {
            std::string rest = t.substr(2);
            if (rest.empty()) return kPi;
            if (rest[0] == '/') return kPi / std::stod(rest.substr(1));
        } else if (pi == std::string::npos) {
            return scale * std::stod(t);
        }
    } catch (const std::exception&) {
    }
    throw ConfigError(field + ": cannot parse angle '" + s + "'");
}

inline StrategyMode parse_mode(const std::string& s) {
    if (s == "explicit") return StrategyMode::Explicit;
    if (s == "stationary_optimal") return StrategyMode::StationaryOptimal;
    if (s == "single_hop") return StrategyMode::SingleHop;
    if (s == "density") return StrategyMode::Density;
    if (s == "dynamic") return StrategyMode::Dynamic;
    throw ConfigError("unknown strategy_mode '" + s + "'");
}

inline const char* mode_name(StrategyMode m) {
    switch (m) {
        case StrategyMode::Explicit: return "explicit";
        case StrategyMode::StationaryOptimal: return "stationary_optimal";
        case StrategyMode::SingleHop: return "single_hop";
        case StrategyMode::Density: return "density";
        case StrategyMode::Dynamic: return "dynamic";
    }
    return "?";
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    ExperimentConfig cfg;
    std::vector<std::string> problems;

    if (!j.contains("tiers") || !j["tiers"].is_array() || j["tiers"].empty()) {
        problems.push_back("tiers: non-empty array required");
    } else {
        for (const auto& tj : j["tiers"]) {
            TierSpec t;
            t.height_km = tj.value("height_km", 0.0);
            t.radius_km = tj.value("radius_km", kEarthRadiusKm + t.height_km);
            t.count = tj.value("count", 0);
            cfg.tiers.push_back(t);
        }
        try {
            validate_tiers(cfg.tiers);
        } catch (const std::exception& e) {
            problems.push_back(std::string("tiers: ") + e.what());
        }
    }

    const nlohmann::json cj = j.value("constraints", nlohmann::json::object());
    try {
        if (cj.contains("theta_r")) cfg.constraints.theta_r = detail::parse_angle(cj["theta_r"], "theta_r");
        if (cj.contains("theta_s")) cfg.constraints.theta_s = detail::parse_angle(cj["theta_s"], "theta_s");
        if (cj.contains("theta_m")) cfg.constraints.theta_m = detail::parse_angle(cj["theta_m"], "theta_m");
        cfg.constraints.d_th = cj.value("d_th_km", cfg.constraints.d_th);
    } catch (const ConfigError& e) {
        problems.push_back(e.what());
    }
    const ConstraintSet& c = cfg.constraints;
    if (!(c.theta_r > 0.0 && c.theta_r <= kPi)) problems.push_back("theta_r: must be in (0, pi]");
    if (!(c.theta_s > 0.0 && c.theta_s < kPi)) problems.push_back("theta_s: must be in (0, pi)");
    if (!(c.d_th > 0.0)) problems.push_back("d_th_km: must be > 0");
    if (!(c.theta_m > 0.0 && c.theta_m <= kPi)) problems.push_back("theta_m: must be in (0, pi]");

    cfg.strategy_mode = detail::parse_mode(j.value("strategy_mode", std::string("stationary_optimal")));
    if (j.contains("strategy")) {
        PriorityStrategy s;
        for (const auto& r : j["strategy"]) s.ranks.push_back(r.get<int>());
        cfg.explicit_strategy = s;
        if (!s.valid() || s.ranks.size() != cfg.tiers.size())
            problems.push_back("strategy: not a permutation of 1..K");
    }
    if (cfg.strategy_mode == StrategyMode::Explicit && !cfg.explicit_strategy)
        problems.push_back("strategy_mode=explicit requires a strategy array");
    if (cfg.strategy_mode != StrategyMode::Explicit && cfg.explicit_strategy)
        problems.push_back("strategy array requires strategy_mode=explicit");

    cfg.iterations = j.value("iterations", cfg.iterations);
    if (cfg.iterations < 1) problems.push_back("iterations: must be >= 1");
    cfg.seed = j.value("seed", cfg.seed);

    if (j.contains("link_budget")) {
        const auto& lb = j["link_budget"];
        LinkBudget b;
        b.carrier_frequency_hz = lb.value("carrier_frequency_hz", b.carrier_frequency_hz);
        if (lb.contains("transmit_power_dbw"))
            b.transmit_power_w = std::pow(10.0, lb["transmit_power_dbw"].get<double>() / 10.0);
        if (lb.contains("antenna_gain_dbi"))
            b.antenna_gain = std::pow(10.0, lb["antenna_gain_dbi"].get<double>() / 10.0);
        b.bandwidth_hz = lb.value("bandwidth_hz", b.bandwidth_hz);
        b.noise_power_w = lb.value("noise_power_w", b.noise_power_w);
        if (lb.contains("rain_attenuation_db"))
            b.rain_attenuation = std::pow(10.0, lb["rain_attenuation_db"].get<double>() / 10.0);
        b.package_size_bits = lb.value("package_size_bits", b.package_size_bits);
        if (lb.contains("shadowed_rician")) {
            const auto& sr = lb["shadowed_rician"];
            b.shadowed_rician.b = sr.value("b", b.shadowed_rician.b);
            b.shadowed_rician.m = sr.value("m", b.shadowed_rician.m);
            b.shadowed_rician.omega = sr.value("omega", b.shadowed_rician.omega);
        }
        if (lb.contains("snr_threshold_db"))
            b.snr_threshold = std::pow(10.0, lb["snr_threshold_db"].get<double>() / 10.0);
        b.latency_threshold_s = lb.value("latency_threshold_s", b.latency_threshold_s);
        if (b.shadowed_rician.m < 0.5) problems.push_back("shadowed_rician.m: must be >= 0.5");
        cfg.link_budget = b;
    }

    if (j.contains("flows")) {
        FlowSpec f;
        for (const auto& a : j["flows"])
            f.dihedral_angles.push_back(detail::parse_angle(a, "flows"));
        for (double a : f.dihedral_angles)
            if (a < 0.0 || a >= kPi / 2.0) problems.push_back("flows: dihedral angle in [0, pi/2)");
        cfg.flows = f;
    }

    if (j.contains("sweep")) {
        SweepSpec sw;
        sw.kind = j["sweep"].value("kind", std::string());
        if (j["sweep"].contains("values"))
            for (const auto& v : j["sweep"]["values"]) sw.values.push_back(v.get<double>());
        if (sw.kind != "nonuniformity" && sw.kind != "tier_count" && sw.kind != "count_height" &&
            sw.kind != "gateway_tradeoff")
            problems.push_back("sweep.kind: unknown kind '" + sw.kind + "'");
        cfg.sweep = sw;
    }

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        throw ConfigError(msg);
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

inline nlohmann::json serialize_config(const ExperimentConfig& cfg) {
    nlohmann::json j;
    for (const TierSpec& t : cfg.tiers)
        j["tiers"].push_back({{"height_km", t.height_km},
                              {"radius_km", t.radius_km},
                              {"count", t.count}});
    j["constraints"] = {{"theta_r", cfg.constraints.theta_r},
                        {"theta_s", cfg.constraints.theta_s},
                        {"theta_m", cfg.constraints.theta_m},
                        {"d_th_km", cfg.constraints.d_th}};
    j["strategy_mode"] = detail::mode_name(cfg.strategy_mode);
    if (cfg.explicit_strategy) j["strategy"] = cfg.explicit_strategy->ranks;
    j["iterations"] = cfg.iterations;
    j["seed"] = cfg.seed;
    if (cfg.flows) {
        for (double a : cfg.flows->dihedral_angles) j["flows"].push_back(a);
    }
    if (cfg.sweep) j["sweep"] = {{"kind", cfg.sweep->kind}, {"values", cfg.sweep->values}};
    if (cfg.link_budget) {
        const LinkBudget& b = *cfg.link_budget;
        j["link_budget"] = {
            {"carrier_frequency_hz", b.carrier_frequency_hz},
            {"transmit_power_dbw", 10.0 * std::log10(b.transmit_power_w)},
            {"antenna_gain_dbi", 10.0 * std::log10(b.antenna_gain)},
            {"bandwidth_hz", b.bandwidth_hz},
            {"noise_power_w", b.noise_power_w},
            {"rain_attenuation_db", 10.0 * std::log10(b.rain_attenuation)},
            {"package_size_bits", b.package_size_bits},
            {"shadowed_rician",
             {{"b", b.shadowed_rician.b}, {"m", b.shadowed_rician.m}, {"omega", b.shadowed_rician.omega}}},
            {"snr_threshold_db", 10.0 * std::log10(b.snr_threshold)},
            {"latency_threshold_s", b.latency_threshold_s}};
    }
    return j;
}

// Resolve the strategy the config asks for.
inline PriorityStrategy resolve_strategy(const ExperimentConfig& cfg) {
    Matrix p_i = selection_interruption_matrix(cfg.tiers, cfg.constraints);
    switch (cfg.strategy_mode) {
        case StrategyMode::Explicit:
            return *cfg.explicit_strategy;
        case StrategyMode::StationaryOptimal:
        case StrategyMode::Dynamic:
            return stationary_optimal(p_i);
        case StrategyMode::SingleHop:
            return single_hop_inspired(single_hop_vector(cfg.tiers, cfg.constraints));
        case StrategyMode::Density:
            return density_inspired(cfg.tiers, reachable_tiers(p_i));
    }
    throw ConfigError("unreachable strategy mode");
}

}  // namespace relaynet
