#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "rbis/errors.hpp"
#include "rbis/scenario.hpp"

namespace rbis {

namespace detail {

using json = nlohmann::json;

inline void require_object(const json& node, const std::string& ctx) {
    if (!node.is_object())
        throw ConfigError(ctx + " must be a JSON object");
}

// Unknown keys are rejected: a misspelled unit suffix silently ignored is
// exactly the kind of bug this tool exists to catch.
inline void check_keys(const json& obj, const std::string& ctx, std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) { ok = true; break; }
        if (!ok)
            throw ConfigError("unknown config field '" + (ctx.empty() ? key : ctx + "." + key) + "'");
    }
}

inline double num_or(const json& obj, const std::string& ctx, const char* key, double fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("config field '" + ctx + key + "' must be a number");
    return v.get<double>();
}

inline std::uint64_t uint_or(const json& obj, const std::string& ctx, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_unsigned())
        throw ConfigError("config field '" + ctx + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

inline bool bool_or(const json& obj, const std::string& ctx, const char* key, bool fallback) {
    if (!obj.contains(key))
        return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean())
        throw ConfigError("config field '" + ctx + key + "' must be a boolean");
    return v.get<bool>();
}

inline TimeSpan span_ms(const json& obj, const std::string& ctx, const char* key, TimeSpan fallback) {
    if (!obj.contains(key))
        return fallback;
    return TimeSpan::from_seconds(num_or(obj, ctx, key, 0.0) * 1e-3);
}

inline TimeSpan span_ns(const json& obj, const std::string& ctx, const char* key, TimeSpan fallback) {
    if (!obj.contains(key))
        return fallback;
    return TimeSpan::from_seconds(num_or(obj, ctx, key, 0.0) * 1e-9);
}

inline ClockParams clock_from_json(const json& obj, const std::string& ctx) {
    require_object(obj, ctx);
    check_keys(obj, ctx,
               {"initial_offset_ns", "skew_ppm", "timestamp_jitter_sigma_ns",
                "drift_random_walk_ppm_per_sqrt_s", "quantization_ps"});
    const std::string p = ctx + ".";
    ClockParams c;
    c.initial_offset = span_ns(obj, p, "initial_offset_ns", TimeSpan());
    c.skew_ppm = num_or(obj, p, "skew_ppm", 0.0);
    c.timestamp_jitter_sigma = span_ns(obj, p, "timestamp_jitter_sigma_ns", TimeSpan());
    c.drift_random_walk_sigma = num_or(obj, p, "drift_random_walk_ppm_per_sqrt_s", 0.0);
    c.quantization_ps = static_cast<std::int64_t>(uint_or(obj, p, "quantization_ps", 0));
    return c;
}

} // namespace detail

/// Builds a ScenarioConfig from parsed JSON. Field names carry their units;
/// unknown or mistyped fields are an error. The result is not yet validated
/// (callers run cfg.validate() so invariant violations are reported the same
/// way for every config source).
inline ScenarioConfig scenario_from_json(const nlohmann::json& root) {
    using detail::json;
    detail::require_object(root, "config");
    detail::check_keys(root, "",
                       {"seed", "duration_s", "protocol", "followup_loss_prob", "master_clock", "slave_clock",
                        "geometry", "ta", "edges", "series", "filter_sweep", "steering_window_n", "grandmaster"});

    ScenarioConfig cfg;
    cfg.seed = detail::uint_or(root, "", "seed", cfg.seed);
    if (root.contains("duration_s"))
        cfg.duration = TimeSpan::from_seconds(detail::num_or(root, "", "duration_s", 0.0));
    cfg.followup_loss_prob = detail::num_or(root, "", "followup_loss_prob", 0.0);

    if (root.contains("protocol")) {
        const json& p = root.at("protocol");
        detail::require_object(p, "protocol");
        detail::check_keys(p, "protocol", {"sync_period_ms", "followup_period_ms", "followup_latency_ms"});
        cfg.protocol.sync_period = detail::span_ms(p, "protocol.", "sync_period_ms", cfg.protocol.sync_period);
        cfg.protocol.followup_period =
            detail::span_ms(p, "protocol.", "followup_period_ms", cfg.protocol.followup_period);
        cfg.protocol.followup_latency =
            detail::span_ms(p, "protocol.", "followup_latency_ms", cfg.protocol.followup_latency);
    }
    if (root.contains("master_clock"))
        cfg.master.clock = detail::clock_from_json(root.at("master_clock"), "master_clock");
    if (root.contains("slave_clock"))
        cfg.slave.clock = detail::clock_from_json(root.at("slave_clock"), "slave_clock");
    if (root.contains("geometry")) {
        const json& g = root.at("geometry");
        detail::require_object(g, "geometry");
        detail::check_keys(g, "geometry", {"master_distance_m", "slave_distance_m"});
        cfg.master.distance_m = detail::num_or(g, "geometry.", "master_distance_m", 0.0);
        cfg.slave.distance_m = detail::num_or(g, "geometry.", "slave_distance_m", 0.0);
    }
    if (root.contains("ta")) {
        const json& t = root.at("ta");
        detail::require_object(t, "ta");
        detail::check_keys(t, "ta", {"enabled", "unit_ns"});
        cfg.ta.enabled = detail::bool_or(t, "ta.", "enabled", false);
        cfg.ta.unit = detail::span_ns(t, "ta.", "unit_ns", TimeSpan());
    }
    if (root.contains("edges")) {
        const json& e = root.at("edges");
        detail::require_object(e, "edges");
        detail::check_keys(e, "edges", {"period_ms", "scope_jitter_sigma_ns", "scope_quantization_ps"});
        cfg.edge.period = detail::span_ms(e, "edges.", "period_ms", cfg.edge.period);
        cfg.edge.scope_jitter_sigma = detail::span_ns(e, "edges.", "scope_jitter_sigma_ns", TimeSpan());
        cfg.edge.scope_quantization_ps =
            static_cast<std::int64_t>(detail::uint_or(e, "edges.", "scope_quantization_ps", 0));
    }
    if (root.contains("series")) {
        const json& s = root.at("series");
        detail::require_object(s, "series");
        detail::check_keys(s, "series", {"skew_samples", "edge_samples"});
        cfg.series.skew_samples = detail::uint_or(s, "series.", "skew_samples", cfg.series.skew_samples);
        cfg.series.edge_samples = detail::uint_or(s, "series.", "edge_samples", cfg.series.edge_samples);
    }
    if (root.contains("filter_sweep")) {
        const json& f = root.at("filter_sweep");
        if (!f.is_array() || f.empty())
            throw ConfigError("filter_sweep must be a non-empty array of integers");
        cfg.filter_sweep.clear();
        for (const json& v : f) {
            if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0)
                throw ConfigError("filter_sweep entries must be integers >= 1");
            cfg.filter_sweep.push_back(static_cast<std::uint32_t>(v.get<std::uint64_t>()));
        }
    }
    if (root.contains("steering_window_n"))
        cfg.steering_window_n = static_cast<std::uint32_t>(detail::uint_or(root, "", "steering_window_n", 1));
    if (root.contains("grandmaster")) {
        const json& g = root.at("grandmaster");
        detail::require_object(g, "grandmaster");
        detail::check_keys(g, "grandmaster", {"enabled", "tuple_period_ms", "wired_noise_sigma_ns", "window_n"});
        cfg.grandmaster.enabled = detail::bool_or(g, "grandmaster.", "enabled", false);
        cfg.grandmaster.tuple_period =
            detail::span_ms(g, "grandmaster.", "tuple_period_ms", cfg.grandmaster.tuple_period);
        cfg.grandmaster.wired_noise_sigma =
            detail::span_ns(g, "grandmaster.", "wired_noise_sigma_ns", TimeSpan());
        cfg.grandmaster.window_n =
            static_cast<std::uint32_t>(detail::uint_or(g, "grandmaster.", "window_n", cfg.grandmaster.window_n));
    }
    return cfg;
}

/// Parses scenario JSON text. Syntax errors raise ParseError; semantic field
/// errors raise ConfigError.
inline ScenarioConfig parse_scenario_text(const std::string& text) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config parse error: ") + e.what());
    }
    return scenario_from_json(root);
}

} // namespace rbis
