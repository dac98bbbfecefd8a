#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "rbis/errors.hpp"
#include "rbis/time.hpp"

namespace rbis {

/// One matched (master, slave) timestamp pair for the same SYNC event.
struct TimestampTuple {
    Instant t_master;
    Instant t_slave;
};

/// Measured offset theta = t_slave - t_master, anchored at the master time.
struct OffsetSample {
    TimeSpan theta;
    Instant at_master_time;
};

/// Skew estimate from two consecutive offsets, in ppm, over the master-time
/// interval that produced it.
struct SkewSample {
    double gamma_ppm = 0.0;
    TimeSpan interval;
};

/// Moving-average window size for skew filtering.
struct FilterConfig {
    std::uint32_t window_n = 1;

    void validate() const {
        if (window_n == 0)
            throw ConfigError("filter window_n must be >= 1");
    }
};

inline OffsetSample offset_of(const TimestampTuple& tuple) {
    return {tuple.t_slave - tuple.t_master, tuple.t_master};
}

inline SkewSample skew_of(const OffsetSample& prev, const OffsetSample& cur) {
    if (cur.at_master_time <= prev.at_master_time)
        throw OrderingError("master timestamps must be strictly increasing");
    const TimeSpan interval = cur.at_master_time - prev.at_master_time;
    const double gamma =
        static_cast<double>((cur.theta - prev.theta).ps()) / static_cast<double>(interval.ps()) * 1e6;
    return {gamma, interval};
}

/// Incremental offset/skew estimator: the raw offset of the newest tuple is
/// the anchor, and the skew is the arithmetic mean of the last N consecutive
/// skew samples. Until the window fills the mean runs over however many
/// samples exist, so the estimate is never biased toward zero during warm-up.
class SyncState {
public:
    SyncState() = default;

    explicit SyncState(FilterConfig cfg) : cfg_(cfg) { cfg_.validate(); }

    /// Feeds one tuple: computes the offset, extends the skew window, and
    /// refreshes the filtered skew. Tuples must arrive in strictly increasing
    /// master time.
    void update(const TimestampTuple& tuple) {
        const OffsetSample offset = offset_of(tuple);
        if (last_) {
            const SkewSample sample = skew_of(*last_, offset);
            push_sample(sample);
        }
        last_ = offset;
        ++tuple_count_;
    }

    /// Predicted offset at a master time at or after the last tuple: the last
    /// measured offset plus the filtered drift integrated over the horizon,
    /// rounded to the nearest picosecond.
    TimeSpan predict_offset(Instant at_master_time) const {
        if (!last_)
            throw UninitializedError("predict_offset: no tuple processed yet");
        return last_->theta + scale_by_ppm(filtered_skew_ppm_, at_master_time - last_->at_master_time);
    }

    /// Master-clock time corresponding to a slave-local reading: solves the
    /// fixed point x + predict_offset(x) = slave_local to within 1 ps.
    Instant corrected_local_time(Instant slave_local) const {
        if (!last_)
            throw UninitializedError("corrected_local_time: no tuple processed yet");
        Instant x = slave_local - last_->theta;
        for (int iter = 0; iter < 4; ++iter) {
            const TimeSpan err = slave_local - (x + predict_offset(x));
            if (err.ps() == 0) break;
            x += err;
        }
        Instant best = x;
        std::int64_t best_err = std::abs((best + predict_offset(best) - slave_local).ps());
        for (const Instant cand : {x - TimeSpan::picoseconds(1), x + TimeSpan::picoseconds(1)}) {
            const std::int64_t e = std::abs((cand + predict_offset(cand) - slave_local).ps());
            if (e < best_err || (e == best_err && cand < best)) {
                best = cand;
                best_err = e;
            }
        }
        return best;
    }

    /// Slave-local reading at which this slave's clock shows the given master
    /// time; the exact inverse of corrected_local_time's fixed point.
    Instant slave_time_for_master_time(Instant master_time) const {
        return master_time + predict_offset(master_time);
    }

    double filtered_skew_ppm() const { return filtered_skew_ppm_; }
    const std::optional<OffsetSample>& last_offset() const { return last_; }
    const std::deque<SkewSample>& skew_window() const { return window_; }
    std::uint64_t tuple_count() const { return tuple_count_; }
    const FilterConfig& filter() const { return cfg_; }

private:
    void push_sample(const SkewSample& sample) {
        window_.push_back(sample);
        kahan_add(sample.gamma_ppm);
        if (window_.size() > cfg_.window_n) {
            kahan_add(-window_.front().gamma_ppm);
            window_.pop_front();
        }
        filtered_skew_ppm_ = window_.empty() ? 0.0 : sum_ / static_cast<double>(window_.size());
    }

    // Compensated running sum keeps the incremental mean within 1e-12
    // relative of a from-scratch recomputation over arbitrarily long runs.
    void kahan_add(double value) {
        const double y = value - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    FilterConfig cfg_;
    std::deque<SkewSample> window_;
    double sum_ = 0.0;
    double comp_ = 0.0;
    double filtered_skew_ppm_ = 0.0;
    std::optional<OffsetSample> last_;
    std::uint64_t tuple_count_ = 0;
};

/// Filtered-skew series over a whole tuple log for one window size: value k
/// is the filtered skew right after tuple k+1, warm-up included — the shape
/// of one measurement-series column. Used both by the simulation report and
/// by offline log analysis, so a log re-analysed per window size differs only
/// through N, never through randomness.
struct SkewSeriesResult {
    std::uint32_t window_n = 1;
    std::vector<Instant> at_master_time;
    std::vector<double> filtered_ppm;
};

inline SkewSeriesResult filtered_skew_series(const std::vector<TimestampTuple>& tuples, std::uint32_t window_n) {
    SkewSeriesResult out;
    out.window_n = window_n;
    if (tuples.size() < 2)
        return out;
    out.at_master_time.reserve(tuples.size() - 1);
    out.filtered_ppm.reserve(tuples.size() - 1);
    SyncState state(FilterConfig{window_n});
    state.update(tuples.front());
    for (std::size_t i = 1; i < tuples.size(); ++i) {
        state.update(tuples[i]);
        out.at_master_time.push_back(tuples[i].t_master);
        out.filtered_ppm.push_back(state.filtered_skew_ppm());
    }
    return out;
}

} // namespace rbis
