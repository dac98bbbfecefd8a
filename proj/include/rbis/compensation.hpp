#pragma once

#include <cmath>
#include <cstdint>

#include "rbis/errors.hpp"
#include "rbis/estimator.hpp"
#include "rbis/time.hpp"

namespace rbis {

/// Speed of light in vacuum, m/s.
inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Timing Advance as delivered by the base station: a round-trip delay in
/// units of a configured granularity. No numerology constant is assumed; the
/// unit duration must come from the scenario.
struct TimingAdvance {
    std::uint32_t ta_units = 0;
    TimeSpan unit_duration;

    TimeSpan round_trip_delay() const {
        return TimeSpan::picoseconds(detail::checked_mul(static_cast<std::int64_t>(ta_units), unit_duration.ps()));
    }
};

/// Half the TA round trip, rounded to the nearest picosecond.
inline TimeSpan one_way_delay(TimingAdvance ta) {
    const std::int64_t rtt = ta.round_trip_delay().ps();
    return TimeSpan::picoseconds((rtt + 1) / 2);
}

/// Quantizes a known round-trip propagation delay to TA units (nearest).
inline TimingAdvance ta_from_round_trip(TimeSpan round_trip, TimeSpan unit_duration) {
    if (unit_duration.ps() <= 0)
        throw ConfigError("ta unit_duration must be > 0");
    if (round_trip.ps() < 0)
        throw ConfigError("round-trip delay must be >= 0");
    const double units = static_cast<double>(round_trip.ps()) / static_cast<double>(unit_duration.ps());
    return {static_cast<std::uint32_t>(std::llround(units)), unit_duration};
}

/// Shifts each timestamp earlier by its own device's one-way delay, so both
/// refer to the common transmission instant instead of the staggered
/// reception instants. Equal delays cancel in the offset either way.
inline TimestampTuple compensate_tuple(const TimestampTuple& tuple, TimingAdvance ta_master, TimingAdvance ta_slave) {
    return {tuple.t_master - one_way_delay(ta_master), tuple.t_slave - one_way_delay(ta_slave)};
}

} // namespace rbis
