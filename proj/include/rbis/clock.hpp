#pragma once

#include <cmath>
#include <cstdint>

#include "rbis/errors.hpp"
#include "rbis/random.hpp"
#include "rbis/time.hpp"

namespace rbis {

/// Parameters of one simulated device clock.
struct ClockParams {
    TimeSpan initial_offset;              ///< local - true at the epoch
    double skew_ppm = 0.0;                ///< rate error, parts per million
    TimeSpan timestamp_jitter_sigma;      ///< additive Gaussian read noise, std. dev.
    double drift_random_walk_sigma = 0.0; ///< skew random walk, ppm per sqrt(second)
    std::int64_t quantization_ps = 0;     ///< optional read quantization step, 0 = off

    void validate() const {
        if (!std::isfinite(skew_ppm) || std::abs(skew_ppm) >= 1e5)
            throw ConfigError("skew_ppm must be finite with |skew_ppm| < 1e5");
        if (timestamp_jitter_sigma.ps() < 0)
            throw ConfigError("timestamp_jitter_sigma must be >= 0");
        if (!std::isfinite(drift_random_walk_sigma) || drift_random_walk_sigma < 0)
            throw ConfigError("drift_random_walk_sigma must be >= 0");
        if (quantization_ps < 0)
            throw ConfigError("quantization_ps must be >= 0");
    }
};

/// A drifting local clock: an affine map from true time to local time plus
/// optional Gaussian read jitter and a random-walk skew. The map is anchored
/// at the epoch; advance_drift() moves the anchor forward and perturbs the
/// skew, so the deterministic map is piecewise affine over drift segments.
///
/// With zero jitter and zero random walk the mapping is
///   local(t) = t + initial_offset + skew_ppm * 1e-6 * (t - epoch)
/// exact up to 1 ps quantization, and strictly monotone for |skew| < 1e5 ppm.
class SimulatedClock {
public:
    SimulatedClock(ClockParams params, RandomStream stream)
        : params_(params),
          stream_(stream),
          anchor_true_(Instant::epoch()),
          anchor_offset_(params.initial_offset),
          skew_ppm_(params.skew_ppm) {
        params_.validate();
    }

    /// Timestamp of true time `t` on this clock. Draws one jitter sample per
    /// call when jitter is configured; repeated calls from the same stream
    /// position reproduce identical values.
    Instant local_time(Instant true_t) {
        Instant local = local_time_deterministic(true_t);
        if (params_.timestamp_jitter_sigma.ps() > 0) {
            const double noise = stream_.gaussian() * static_cast<double>(params_.timestamp_jitter_sigma.ps());
            local += TimeSpan::picoseconds(std::llround(noise));
        }
        if (params_.quantization_ps > 0) {
            const std::int64_t q = params_.quantization_ps;
            const std::int64_t ticks = detail::floor_div(local.ps() + q / 2, q);
            local = Instant::picoseconds(detail::checked_mul(ticks, q));
        }
        return local;
    }

    /// The affine part of the mapping, no jitter and no quantization.
    Instant local_time_deterministic(Instant true_t) const {
        return true_t + anchor_offset_ + scale_by_ppm(skew_ppm_, true_t - anchor_true_);
    }

    /// Inverts the deterministic affine part: finds the true time whose
    /// deterministic local reading is nearest `local_t` (within 1 ps for
    /// |skew| <= 100 ppm).
    Instant true_time_of_local(Instant local_t) const {
        const std::int64_t target = (local_t - anchor_true_ - anchor_offset_).ps();
        const double slope = 1.0 + skew_ppm_ * 1e-6;

        std::int64_t u = std::llround(static_cast<double>(target) / slope);
        for (int iter = 0; iter < 4; ++iter) {
            const std::int64_t err = target - forward(u);
            if (err == 0) break;
            u += std::llround(static_cast<double>(err) / slope);
        }
        // settle on the argmin of |forward(u) - target| among neighbours
        std::int64_t best = u;
        std::int64_t best_err = std::abs(forward(u) - target);
        for (std::int64_t cand : {u - 1, u + 1}) {
            const std::int64_t e = std::abs(forward(cand) - target);
            if (e < best_err || (e == best_err && cand < best)) {
                best = cand;
                best_err = e;
            }
        }
        return anchor_true_ + TimeSpan::picoseconds(best);
    }

    /// Advances the random-walk skew by `dt`. The affine map is re-anchored
    /// at the new position using the pre-step skew; a no-op when the walk
    /// sigma is zero, so plain affine clocks are left bit-identical.
    void advance_drift(TimeSpan dt) {
        if (dt.ps() <= 0)
            throw ConfigError("advance_drift requires dt > 0");
        if (params_.drift_random_walk_sigma == 0.0)
            return;
        anchor_offset_ += scale_by_ppm(skew_ppm_, dt);
        anchor_true_ += dt;
        const double step_sigma = params_.drift_random_walk_sigma * std::sqrt(dt.seconds_f());
        skew_ppm_ += stream_.gaussian() * step_sigma;
    }

    double skew_ppm() const { return skew_ppm_; }
    const ClockParams& params() const { return params_; }

private:
    std::int64_t forward(std::int64_t u) const {
        const TimeSpan du = TimeSpan::picoseconds(u);
        return (du + scale_by_ppm(skew_ppm_, du)).ps();
    }

    ClockParams params_;
    RandomStream stream_;
    Instant anchor_true_;
    TimeSpan anchor_offset_;
    double skew_ppm_;
};

} // namespace rbis
