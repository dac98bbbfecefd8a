#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "rbis/clock.hpp"
#include "rbis/compensation.hpp"
#include "rbis/errors.hpp"
#include "rbis/protocol.hpp"
#include "rbis/time.hpp"

namespace rbis {

struct DeviceConfig {
    ClockParams clock;
    double distance_m = 0.0;
};

struct TaConfig {
    bool enabled = false;
    TimeSpan unit;
};

struct EdgeConfig {
    TimeSpan period = TimeSpan::milliseconds(10);
    TimeSpan scope_jitter_sigma;
    std::int64_t scope_quantization_ps = 0;
};

struct SeriesConfig {
    std::size_t skew_samples = 1000;
    std::size_t edge_samples = 500;
};

struct GrandmasterConfig {
    bool enabled = false;
    TimeSpan tuple_period = TimeSpan::milliseconds(100);
    TimeSpan wired_noise_sigma;
    std::uint32_t window_n = 16;
};

/// Everything a deterministic run needs: protocol timing, the two device
/// clocks and their geometry, noise knobs, series lengths, the filter sweep,
/// and the seed.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::optional<TimeSpan> duration;
    ProtocolConfig protocol;
    double followup_loss_prob = 0.0;
    DeviceConfig master;
    DeviceConfig slave;
    TaConfig ta;
    EdgeConfig edge;
    SeriesConfig series;
    std::vector<std::uint32_t> filter_sweep = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    std::optional<std::uint32_t> steering_window_n;
    GrandmasterConfig grandmaster;

    /// Window size steering the corrected edges; the largest sweep entry
    /// unless overridden.
    std::uint32_t steering_n() const {
        if (steering_window_n)
            return *steering_window_n;
        return *std::max_element(filter_sweep.begin(), filter_sweep.end());
    }

    /// Sorted, de-duplicated sweep.
    std::vector<std::uint32_t> sweep() const {
        std::vector<std::uint32_t> s = filter_sweep;
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        return s;
    }

    /// Generous lower bound on the run length needed to fill both series:
    /// tuple collection, steering warm-up, then the edge series, plus the
    /// worst-case initial offset. Event generation stops here; the loop
    /// itself stops as soon as all series are full.
    TimeSpan required_duration() const {
        std::int64_t tuples_needed = static_cast<std::int64_t>(series.skew_samples) + 1;
        if (series.edge_samples > 0)
            tuples_needed = std::max(tuples_needed, static_cast<std::int64_t>(steering_n()) + 2);

        TimeSpan span = protocol.sync_period * tuples_needed + protocol.followup_period * 2 +
                        protocol.followup_latency;
        if (series.edge_samples > 0)
            span += edge.period * static_cast<std::int64_t>(series.edge_samples + 2);
        const std::int64_t worst_offset =
            std::max(std::abs(master.clock.initial_offset.ps()), std::abs(slave.clock.initial_offset.ps()));
        return span + TimeSpan::picoseconds(worst_offset) + TimeSpan::seconds(1);
    }

    TimeSpan effective_duration() const { return duration ? *duration : required_duration(); }

    void validate() const {
        protocol.validate();
        master.clock.validate();
        slave.clock.validate();
        if (std::abs(master.clock.initial_offset.ps()) >= kMaxInitialOffset.ps())
            throw ConfigError("master_clock.initial_offset_ns must satisfy |theta0| < 5.12 s");
        if (std::abs(slave.clock.initial_offset.ps()) >= kMaxInitialOffset.ps())
            throw ConfigError("slave_clock.initial_offset_ns must satisfy |theta0| < 5.12 s");
        if (!std::isfinite(followup_loss_prob) || followup_loss_prob < 0.0 || followup_loss_prob > 1.0)
            throw ConfigError("followup_loss_prob must be within [0, 1]");
        if (!(master.distance_m >= 0.0) || !std::isfinite(master.distance_m))
            throw ConfigError("geometry.master_distance_m must be >= 0");
        if (!(slave.distance_m >= 0.0) || !std::isfinite(slave.distance_m))
            throw ConfigError("geometry.slave_distance_m must be >= 0");
        if (ta.enabled && ta.unit.ps() <= 0)
            throw ConfigError("ta.unit_ns must be > 0 when ta.enabled is true");
        if (edge.period.ps() <= 0)
            throw ConfigError("edges.period_ms must be > 0");
        if (edge.scope_jitter_sigma.ps() < 0)
            throw ConfigError("edges.scope_jitter_sigma_ns must be >= 0");
        if (edge.scope_quantization_ps < 0)
            throw ConfigError("edges.scope_quantization_ps must be >= 0");
        if (series.skew_samples == 0)
            throw ConfigError("series.skew_samples must be >= 1");
        if (filter_sweep.empty())
            throw ConfigError("filter_sweep must be non-empty");
        for (const std::uint32_t n : filter_sweep)
            if (n == 0)
                throw ConfigError("filter_sweep entries must be >= 1");
        if (steering_window_n && *steering_window_n == 0)
            throw ConfigError("steering_window_n must be >= 1");
        if (grandmaster.enabled) {
            if (grandmaster.tuple_period.ps() <= 0)
                throw ConfigError("grandmaster.tuple_period_ms must be > 0");
            if (grandmaster.wired_noise_sigma.ps() < 0)
                throw ConfigError("grandmaster.wired_noise_sigma_ns must be >= 0");
            if (grandmaster.window_n == 0)
                throw ConfigError("grandmaster.window_n must be >= 1");
        }
        if (duration && *duration < required_duration())
            throw ConfigError("duration_s does not cover the requested sample counts");
    }
};

/// One-way propagation delay for a device, rounded to the picosecond.
inline TimeSpan propagation_delay(double distance_m) {
    return TimeSpan::from_seconds(distance_m / kSpeedOfLight);
}

} // namespace rbis
