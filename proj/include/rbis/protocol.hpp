#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "rbis/errors.hpp"
#include "rbis/estimator.hpp"
#include "rbis/time.hpp"

namespace rbis {

inline constexpr std::uint32_t kSfnModulus = 1024;
inline constexpr TimeSpan kFrameDuration = TimeSpan::picoseconds(10'000'000'000);        // 10 ms
inline constexpr TimeSpan kSfnWrapPeriod = TimeSpan::picoseconds(10'240'000'000'000);    // 10.24 s
inline constexpr TimeSpan kMaxInitialOffset = TimeSpan::picoseconds(5'120'000'000'000);  // 5.12 s

/// System frame number, the cyclic 10-bit identifier carried by the broadcast.
struct Sfn {
    std::uint32_t value = 0;

    explicit Sfn(std::uint32_t v) : value(v) {
        if (v >= kSfnModulus)
            throw ConfigError("Sfn value must be in [0, 1023]");
    }
};

/// Unwrapped, monotone event counter behind the cyclic SFN.
struct EventId {
    std::uint64_t absolute_index = 0;

    friend constexpr auto operator<=>(EventId, EventId) = default;
};

/// One broadcast SYNC anchor. The true broadcast time is simulation ground
/// truth; protocol logic only ever sees the SFN.
struct SyncEvent {
    Sfn sfn;
    Instant true_broadcast_time;
};

struct FollowUpEntry {
    EventId event_id;
    Instant master_timestamp;
};

/// Master timestamp publication. Entries are strictly increasing in event id
/// and in timestamp.
struct FollowUp {
    std::vector<FollowUpEntry> entries;
};

/// Broadcast-side protocol timing.
struct ProtocolConfig {
    TimeSpan sync_period = kFrameDuration;
    TimeSpan followup_period = kFrameDuration;
    TimeSpan followup_latency;

    std::uint32_t stride() const {
        return static_cast<std::uint32_t>(sync_period.ps() / kFrameDuration.ps());
    }

    void validate() const {
        if (sync_period < TimeSpan::milliseconds(5) || sync_period > TimeSpan::milliseconds(160))
            throw ConfigError("sync_period_ms must be within [5, 160]");
        if (sync_period.ps() % kFrameDuration.ps() != 0)
            throw ConfigError("sync_period_ms must be a multiple of the 10 ms frame so every SYNC carries a distinct SFN");
        if (followup_period.ps() <= 0)
            throw ConfigError("followup_period_ms must be > 0");
        if (followup_latency.ps() < 0)
            throw ConfigError("followup_latency_ms must be >= 0");
    }
};

namespace detail {

inline std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t m) {
    // extended Euclid; gcd(a, m) == 1 guaranteed by the caller
    std::int64_t t = 0, new_t = 1, r = m, new_r = a;
    while (new_r != 0) {
        const std::int64_t q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    return static_cast<std::uint32_t>(t < 0 ? t + m : t);
}

} // namespace detail

/// Maps an observed SFN to the absolute event index nearest to an expected
/// position on the broadcast timeline. `expected_pos` and `period` are in the
/// same unit (picoseconds for time-based expectations, or 1 for event-index
/// expectations). Candidates repeat every 1024/gcd(stride,1024) events; an
/// exact tie between the two nearest candidates, or a best candidate before
/// event 0, raises AmbiguityError — both signal a violated initial-offset
/// bound.
inline EventId resolve_sfn(Sfn observed, std::int64_t expected_pos, std::int64_t period, std::uint32_t stride) {
    if (stride == 0 || stride > kSfnModulus)
        throw ConfigError("sfn stride must be in [1, 1024]");
    if (period <= 0)
        throw ConfigError("sfn period must be positive");

    const std::uint32_t g = std::gcd(stride, kSfnModulus);
    if (observed.value % g != 0)
        throw AmbiguityError("sfn " + std::to_string(observed.value) + " is not reachable with stride " +
                             std::to_string(stride));
    const std::uint32_t wrap_events = kSfnModulus / g;
    const std::uint32_t base =
        static_cast<std::uint32_t>((static_cast<std::uint64_t>(observed.value / g) *
                                    detail::mod_inverse(stride / g, wrap_events)) % wrap_events);

    const __int128 span = static_cast<__int128>(wrap_events) * period;
    const __int128 diff = static_cast<__int128>(expected_pos) - static_cast<__int128>(base) * period;
    __int128 m = diff / span;
    if (diff % span != 0 && diff < 0) --m;

    const __int128 k_low = base + m * wrap_events;
    const __int128 k_high = k_low + wrap_events;
    const __int128 d_low = static_cast<__int128>(expected_pos) - k_low * period;
    const __int128 d_high = k_high * period - static_cast<__int128>(expected_pos);

    if (d_low == d_high)
        throw AmbiguityError("sfn " + std::to_string(observed.value) +
                             " is equidistant from two wrap candidates; initial offset bound violated");
    const __int128 k = d_low < d_high ? k_low : k_high;
    if (k < 0)
        throw AmbiguityError("sfn " + std::to_string(observed.value) +
                             " resolves before the first broadcast; initial offset bound violated");
    return EventId{static_cast<std::uint64_t>(k)};
}

/// Next-event form: resolves `observed` against the extrapolated expectation
/// `last_event + 1`, measuring distance in whole events.
inline EventId unwrap_sfn(Sfn observed, EventId last_event, std::uint32_t stride) {
    return resolve_sfn(observed, static_cast<std::int64_t>(last_event.absolute_index) + 1, 1, stride);
}

/// Per-device SFN unwrapping state. Before the first observation the
/// expectation comes from the device's own clock (its local epoch is aligned
/// to the broadcast epoch within the initial-offset bound); afterwards it is
/// extrapolated from the last resolved event by elapsed local time.
class SfnTracker {
public:
    SfnTracker() = default;

    SfnTracker(TimeSpan sync_period, std::uint32_t stride)
        : sync_period_(sync_period), stride_(stride) {
        if (sync_period.ps() <= 0)
            throw ConfigError("sync_period must be > 0");
    }

    EventId observe(Sfn observed, Instant local_ts) {
        std::int64_t expected_ps = 0;
        if (anchor_) {
            const __int128 pos = static_cast<__int128>(anchor_->first.absolute_index) * sync_period_.ps() +
                                 (local_ts - anchor_->second).ps();
            expected_ps = static_cast<std::int64_t>(pos);
        } else {
            expected_ps = local_ts.ps();
        }
        const EventId id = resolve_sfn(observed, expected_ps, sync_period_.ps(), stride_);
        anchor_ = {id, local_ts};
        return id;
    }

    const std::optional<std::pair<EventId, Instant>>& anchor() const { return anchor_; }

private:
    TimeSpan sync_period_ = kFrameDuration;
    std::uint32_t stride_ = 1;
    std::optional<std::pair<EventId, Instant>> anchor_;
};

/// Master role: timestamps SYNC receptions and batches them for FOLLOW_UP.
struct MasterState {
    SfnTracker tracker;
    std::vector<FollowUpEntry> pending;
    std::size_t capacity = 1024;
    std::uint64_t evictions = 0;
};

/// Timestamps one SYNC reception on the master. Returns the resolved event
/// id; on a full batch the oldest entry is evicted and counted.
inline EventId master_on_sync(MasterState& state, Sfn observed, Instant local_ts) {
    const EventId id = state.tracker.observe(observed, local_ts);
    state.pending.push_back({id, local_ts});
    if (state.pending.size() > state.capacity) {
        state.pending.erase(state.pending.begin());
        ++state.evictions;
    }
    return id;
}

/// Drains the pending batch into a FOLLOW_UP message (legal when empty).
inline FollowUp master_emit_followup(MasterState& state) {
    FollowUp fu;
    fu.entries.swap(state.pending);
    return fu;
}

/// Slave role: pending local timestamps awaiting FOLLOW_UP matches, plus the
/// estimator state steered by the matched tuples.
struct SlaveState {
    SfnTracker tracker;
    std::map<std::uint64_t, Instant> pending;
    TimeSpan expiry_horizon;            ///< unmatched entries older than this are dropped
    std::size_t capacity = 4096;
    std::uint64_t expired = 0;
    std::uint64_t evictions = 0;
    SyncState estimator;

    SlaveState() = default;

    SlaveState(SfnTracker t, TimeSpan horizon, FilterConfig steering)
        : tracker(t), expiry_horizon(horizon), estimator(steering) {}
};

/// Timestamps one SYNC reception on a slave. Ambiguity errors from the SFN
/// resolution propagate.
inline EventId slave_on_sync(SlaveState& state, Sfn observed, Instant local_ts) {
    const EventId id = state.tracker.observe(observed, local_ts);
    state.pending.insert_or_assign(id.absolute_index, local_ts);
    if (state.pending.size() > state.capacity) {
        state.pending.erase(state.pending.begin());
        ++state.evictions;
    }
    return id;
}

/// Matches FOLLOW_UP entries against pending local timestamps. Each match
/// emits one (master, slave) tuple; unmatched FOLLOW_UP entries are dropped
/// (that SYNC was missed) and pending entries older than the expiry horizon
/// behind the most recent SYNC are discarded. Loss never produces a wrong
/// tuple, only fewer tuples.
inline std::vector<TimestampTuple> slave_on_followup(SlaveState& state, const FollowUp& fu) {
    std::vector<TimestampTuple> tuples;
    tuples.reserve(fu.entries.size());
    for (const FollowUpEntry& entry : fu.entries) {
        const auto it = state.pending.find(entry.event_id.absolute_index);
        if (it == state.pending.end())
            continue;
        tuples.push_back({entry.master_timestamp, it->second});
        state.pending.erase(it);
    }
    if (state.tracker.anchor() && state.expiry_horizon.ps() > 0) {
        const Instant newest = state.tracker.anchor()->second;
        for (auto it = state.pending.begin(); it != state.pending.end();) {
            if (it->second < newest - state.expiry_horizon) {
                it = state.pending.erase(it);
                ++state.expired;
            } else {
                ++it;
            }
        }
    }
    return tuples;
}

} // namespace rbis
