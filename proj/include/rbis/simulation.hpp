#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "rbis/clock.hpp"
#include "rbis/compensation.hpp"
#include "rbis/errors.hpp"
#include "rbis/estimator.hpp"
#include "rbis/protocol.hpp"
#include "rbis/random.hpp"
#include "rbis/scenario.hpp"
#include "rbis/stats.hpp"
#include "rbis/time.hpp"
#include "rbis/tsn_bridge.hpp"

namespace rbis {

/// One oscilloscope reading: signed slave-minus-master edge time difference.
struct EdgeMeasurement {
    TimeSpan theta_measured;
    Instant at_true_time;
};

/// Compares the two validation-signal edges of one period and adds the
/// scope's measurement noise (and optional sampling quantization). Edges
/// farther apart than half a period cannot belong to the same period.
inline EdgeMeasurement measure_edge_offset(Instant master_edge, Instant slave_edge,
                                           TimeSpan scope_jitter_sigma, RandomStream& stream,
                                           TimeSpan edge_period, std::int64_t scope_quantization_ps = 0) {
    TimeSpan theta = slave_edge - master_edge;
    if (2 * std::abs(theta.ps()) >= edge_period.ps())
        throw SimulationError("edge offset " + std::to_string(theta.ps()) +
                              " ps exceeds half the validation period; edges belong to different periods");
    if (scope_jitter_sigma.ps() > 0) {
        const double noise = stream.gaussian() * static_cast<double>(scope_jitter_sigma.ps());
        theta += TimeSpan::picoseconds(std::llround(noise));
    }
    if (scope_quantization_ps > 0) {
        const std::int64_t q = scope_quantization_ps;
        theta = TimeSpan::picoseconds(detail::floor_div(theta.ps() + q / 2, q) * q);
    }
    return {theta, master_edge};
}

/// Edge measurement plus its ground-truth decomposition:
/// theta_measured == true_residual + scope_noise, exactly.
struct EdgeRecord {
    Instant at_true_time;
    TimeSpan theta_measured;
    TimeSpan true_residual;
    TimeSpan scope_noise;
};

struct RunCounters {
    std::uint64_t syncs_broadcast = 0;
    std::uint64_t followups_emitted = 0;
    std::uint64_t followups_lost = 0;
    std::uint64_t tuples_matched = 0;
    std::uint64_t pending_expired = 0;
    std::uint64_t batch_evictions = 0;
};

/// Everything a run produces: the measurement tuple log (first
/// skew_samples+1 tuples), the per-window filtered-skew series recomputed
/// from that one log, the edge series with ground truth, and counters.
struct SimulationReport {
    std::vector<TimestampTuple> tuples;
    std::vector<SkewSeriesResult> skew_series;
    std::vector<EdgeRecord> edges;
    std::vector<TimestampTuple> gm_tuples;
    RunCounters counters;
};

namespace detail {

enum class EventKind : int {
    sync_broadcast = 0,
    rx_master = 1,
    rx_slave = 2,
    followup_emit = 3,
    followup_deliver = 4,
    gm_tuple = 5,
    edge_tick = 6,
};

struct SimEvent {
    Instant at;
    EventKind kind;
    std::uint64_t seq = 0;     // tie-break: FIFO among equal (at, kind)
    std::uint64_t index = 0;   // sync index or edge index
    FollowUp payload;
};

struct SimEventLater {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
        if (a.at != b.at) return a.at > b.at;
        if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.seq > b.seq;
    }
};

// Clock plus the bookkeeping for random-walk drift advances.
struct DriftedClock {
    SimulatedClock clock;
    Instant last_advance = Instant::epoch();

    void advance_to(Instant t) {
        if (clock.params().drift_random_walk_sigma == 0.0)
            return;
        if (t > last_advance) {
            clock.advance_drift(t - last_advance);
            last_advance = t;
        }
    }
};

} // namespace detail

/// Executes one deterministic run of the broadcast-synchronization scenario:
/// SYNC broadcasts stamped with the frame counter, per-device reception with
/// propagation delay, FOLLOW_UP batching with loss, estimator updates
/// (TA-compensated when enabled), and corrected validation edges captured on
/// the simulated scope. Identical configs (including the seed) produce
/// bit-identical reports.
inline SimulationReport run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    using detail::EventKind;
    using detail::SimEvent;

    // One independent stream per noise consumer.
    RandomStream loss_stream(cfg.seed, 5);
    RandomStream scope_stream(cfg.seed, 6);
    RandomStream gm_stream(cfg.seed, 7);
    detail::DriftedClock master_clock{SimulatedClock(cfg.master.clock, RandomStream(cfg.seed, 1))};
    detail::DriftedClock slave_clock{SimulatedClock(cfg.slave.clock, RandomStream(cfg.seed, 2))};

    const std::uint32_t stride = cfg.protocol.stride();
    const TimeSpan prop_master = propagation_delay(cfg.master.distance_m);
    const TimeSpan prop_slave = propagation_delay(cfg.slave.distance_m);

    TimingAdvance ta_master{0, TimeSpan::picoseconds(1)};
    TimingAdvance ta_slave{0, TimeSpan::picoseconds(1)};
    if (cfg.ta.enabled) {
        ta_master = ta_from_round_trip(prop_master * 2, cfg.ta.unit);
        ta_slave = ta_from_round_trip(prop_slave * 2, cfg.ta.unit);
    }

    MasterState master;
    master.tracker = SfnTracker(cfg.protocol.sync_period, stride);
    SlaveState slave(SfnTracker(cfg.protocol.sync_period, stride), cfg.protocol.followup_period * 2,
                     FilterConfig{cfg.steering_n()});
    GrandmasterLink gm_link(FilterConfig{cfg.grandmaster.window_n}, cfg.grandmaster.wired_noise_sigma);

    SimulationReport report;
    const std::size_t tuples_target = cfg.series.skew_samples + 1;
    const std::size_t edges_target = cfg.series.edge_samples;
    report.tuples.reserve(tuples_target);
    report.edges.reserve(edges_target);

    const Instant end = Instant::epoch() + cfg.effective_duration();

    std::priority_queue<SimEvent, std::vector<SimEvent>, detail::SimEventLater> queue;
    std::uint64_t seq = 0;
    auto push = [&](Instant at, EventKind kind, std::uint64_t index = 0, FollowUp payload = {}) {
        if (at > end)
            return;
        queue.push(SimEvent{at, kind, seq++, index, std::move(payload)});
    };

    push(Instant::epoch(), EventKind::sync_broadcast, 0);
    push(Instant::epoch() + cfg.protocol.followup_period, EventKind::followup_emit);
    if (cfg.grandmaster.enabled)
        push(Instant::epoch() + cfg.grandmaster.tuple_period, EventKind::gm_tuple);

    bool edges_started = false;
    const auto done = [&] {
        return report.tuples.size() >= tuples_target && report.edges.size() >= edges_target;
    };

    while (!queue.empty() && !done()) {
        SimEvent ev = queue.top();
        queue.pop();

        switch (ev.kind) {
        case EventKind::sync_broadcast: {
            ++report.counters.syncs_broadcast;
            push(ev.at + prop_master, EventKind::rx_master, ev.index);
            push(ev.at + prop_slave, EventKind::rx_slave, ev.index);
            push(ev.at + cfg.protocol.sync_period, EventKind::sync_broadcast, ev.index + 1);
            break;
        }
        case EventKind::rx_master: {
            master_clock.advance_to(ev.at);
            const Sfn sfn(static_cast<std::uint32_t>((ev.index * stride) % kSfnModulus));
            const Instant ts = master_clock.clock.local_time(ev.at);
            try {
                master_on_sync(master, sfn, ts);
            } catch (const AmbiguityError& e) {
                throw SimulationError("sync event " + std::to_string(ev.index) + " on master: " + e.what());
            }
            report.counters.batch_evictions = master.evictions;
            break;
        }
        case EventKind::rx_slave: {
            slave_clock.advance_to(ev.at);
            const Sfn sfn(static_cast<std::uint32_t>((ev.index * stride) % kSfnModulus));
            const Instant ts = slave_clock.clock.local_time(ev.at);
            try {
                slave_on_sync(slave, sfn, ts);
            } catch (const AmbiguityError& e) {
                throw SimulationError("sync event " + std::to_string(ev.index) + " on slave: " + e.what());
            }
            break;
        }
        case EventKind::followup_emit: {
            FollowUp fu = master_emit_followup(master);
            if (!fu.entries.empty()) {
                ++report.counters.followups_emitted;
                if (loss_stream.bernoulli(cfg.followup_loss_prob))
                    ++report.counters.followups_lost;
                else
                    push(ev.at + cfg.protocol.followup_latency, EventKind::followup_deliver, 0, std::move(fu));
            }
            push(ev.at + cfg.protocol.followup_period, EventKind::followup_emit);
            break;
        }
        case EventKind::followup_deliver: {
            const std::vector<TimestampTuple> tuples = slave_on_followup(slave, ev.payload);
            report.counters.pending_expired = slave.expired;
            for (TimestampTuple tuple : tuples) {
                if (cfg.ta.enabled)
                    tuple = compensate_tuple(tuple, ta_master, ta_slave);
                ++report.counters.tuples_matched;
                if (report.tuples.size() < tuples_target)
                    report.tuples.push_back(tuple);
                try {
                    slave.estimator.update(tuple);
                } catch (const OrderingError& e) {
                    throw SimulationError("tuple update on slave: " + std::string(e.what()));
                }
            }
            if (!edges_started && edges_target > 0 &&
                slave.estimator.skew_window().size() >= cfg.steering_n()) {
                edges_started = true;
                // First edge two periods ahead on the master-local grid.
                const Instant master_now = master_clock.clock.local_time_deterministic(ev.at);
                const std::int64_t k0 = detail::floor_div(master_now.ps(), cfg.edge.period.ps()) + 2;
                push(master_clock.clock.true_time_of_local(
                         Instant::picoseconds(detail::checked_mul(k0, cfg.edge.period.ps()))),
                     EventKind::edge_tick, static_cast<std::uint64_t>(k0));
            }
            break;
        }
        case EventKind::gm_tuple: {
            master_clock.advance_to(ev.at);
            Instant ue_ts = master_clock.clock.local_time_deterministic(ev.at);
            if (cfg.grandmaster.wired_noise_sigma.ps() > 0) {
                const double noise =
                    gm_stream.gaussian() * static_cast<double>(cfg.grandmaster.wired_noise_sigma.ps());
                ue_ts += TimeSpan::picoseconds(std::llround(noise));
            }
            const TimestampTuple tuple{ev.at, ue_ts}; // grandmaster keeps true time
            report.gm_tuples.push_back(tuple);
            gm_ingest(gm_link, tuple);
            push(ev.at + cfg.grandmaster.tuple_period, EventKind::gm_tuple);
            break;
        }
        case EventKind::edge_tick: {
            // Master pulses on its own local grid; the slave steers its pulse
            // onto the same master-local instant through the prediction.
            const Instant x =
                Instant::picoseconds(detail::checked_mul(static_cast<std::int64_t>(ev.index), cfg.edge.period.ps()));
            const Instant master_edge = master_clock.clock.true_time_of_local(x);
            const Instant slave_local = slave.estimator.slave_time_for_master_time(x);
            const Instant slave_edge = slave_clock.clock.true_time_of_local(slave_local);
            const EdgeMeasurement m = measure_edge_offset(master_edge, slave_edge, cfg.edge.scope_jitter_sigma,
                                                          scope_stream, cfg.edge.period,
                                                          cfg.edge.scope_quantization_ps);
            const TimeSpan residual = slave_edge - master_edge;
            if (report.edges.size() < edges_target)
                report.edges.push_back({m.at_true_time, m.theta_measured, residual, m.theta_measured - residual});
            push(ev.at + cfg.edge.period, EventKind::edge_tick, ev.index + 1);
            break;
        }
        }
    }

    for (const std::uint32_t n : cfg.sweep())
        report.skew_series.push_back(filtered_skew_series(report.tuples, n));
    return report;
}

/// One Table-II shaped row: filtered-skew statistics for one window size.
struct SweepRow {
    std::uint32_t window_n = 1;
    StatsSummary stats;
};

inline std::vector<SweepRow> summarize_skew_series(const SimulationReport& report) {
    std::vector<SweepRow> rows;
    rows.reserve(report.skew_series.size());
    for (const SkewSeriesResult& series : report.skew_series)
        rows.push_back({series.window_n, stats_summary(series.filtered_ppm, Unit::ppm)});
    return rows;
}

inline StatsSummary summarize_edges_ns(const SimulationReport& report) {
    std::vector<double> ns;
    ns.reserve(report.edges.size());
    for (const EdgeRecord& e : report.edges)
        ns.push_back(e.theta_measured.nanoseconds_f());
    return stats_summary(ns, Unit::ns);
}

/// Runs the scenario once and reports per-window statistics, every row
/// derived from the same tuple log so rows differ only through N.
inline std::vector<SweepRow> sweep_filter_sizes(const ScenarioConfig& cfg) {
    return summarize_skew_series(run_scenario(cfg));
}

} // namespace rbis
