#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rbis/estimator.hpp"
#include "rbis/time.hpp"

namespace rbis::test {

inline std::string fixture_path(const std::string& name) {
    return std::string(RBIS_FIXTURE_DIR) + "/" + name;
}

inline double round4(double x) {
    return std::floor(x * 1e4 + 0.5) / 1e4;
}

/// Brute-force reference for the estimator: recomputes offset, skew samples
/// and the window mean from the whole log, with prefix-sum arithmetic that is
/// independent of the incremental implementation.
struct EstimatorOracle {
    std::vector<std::int64_t> theta_ps;
    std::vector<Instant> at_master;
    std::vector<double> gamma_ppm;
    std::vector<double> gamma_prefix{0.0};

    void feed(const TimestampTuple& t) {
        theta_ps.push_back((t.t_slave - t.t_master).ps());
        at_master.push_back(t.t_master);
        if (theta_ps.size() >= 2) {
            const std::size_t k = theta_ps.size() - 1;
            const double dtheta = static_cast<double>(theta_ps[k] - theta_ps[k - 1]);
            const double dt = static_cast<double>((at_master[k] - at_master[k - 1]).ps());
            gamma_ppm.push_back(dtheta / dt * 1e6);
            gamma_prefix.push_back(gamma_prefix.back() + gamma_ppm.back());
        }
    }

    double filtered_mean(std::uint32_t window_n) const {
        if (gamma_ppm.empty())
            return 0.0;
        const std::size_t k = gamma_ppm.size();
        const std::size_t w = std::min<std::size_t>(window_n, k);
        return (gamma_prefix[k] - gamma_prefix[k - w]) / static_cast<double>(w);
    }
};

inline bool close_rel(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Deterministic pseudo-random tuple log: integer-ps random-walk offsets over
/// random strictly increasing master times.
inline std::vector<TimestampTuple> random_tuple_log(std::mt19937_64& rng, std::size_t length,
                                                    std::int64_t max_interval_ps = 1'000'000'000) {
    std::uniform_int_distribution<std::int64_t> interval(1, max_interval_ps);
    std::uniform_int_distribution<std::int64_t> step(-1'000'000, 1'000'000);
    std::vector<TimestampTuple> log;
    log.reserve(length);
    std::int64_t tm = 0;
    std::int64_t theta = step(rng);
    for (std::size_t i = 0; i < length; ++i) {
        log.push_back({Instant::picoseconds(tm), Instant::picoseconds(tm + theta)});
        tm += interval(rng);
        theta += step(rng);
    }
    return log;
}

} // namespace rbis::test
