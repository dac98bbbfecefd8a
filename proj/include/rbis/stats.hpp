#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "rbis/errors.hpp"

namespace rbis {

enum class Unit { ppm, ns };

inline std::string_view unit_name(Unit u) { return u == Unit::ppm ? "ppm" : "ns"; }

/// Median / mean / population sigma of a measurement series, with the derived
/// 2-sigma and 3-sigma intervals. The median is the lower-middle element for
/// even counts.
struct StatsSummary {
    double median = 0.0;
    double mean = 0.0;
    double sigma = 0.0;
    double two_sigma = 0.0;
    double three_sigma = 0.0;
    std::size_t count = 0;
    Unit unit = Unit::ppm;
};

inline StatsSummary stats_summary(std::span<const double> series, Unit unit) {
    if (series.empty())
        throw ConfigError("stats_summary: series must be non-empty");
    StatsSummary s;
    s.count = series.size();
    s.unit = unit;

    double acc = 0.0;
    for (double v : series) acc += v;
    s.mean = acc / static_cast<double>(series.size());

    double var = 0.0;
    for (double v : series) var += (v - s.mean) * (v - s.mean);
    s.sigma = std::sqrt(var / static_cast<double>(series.size()));
    s.two_sigma = 2.0 * s.sigma;
    s.three_sigma = 3.0 * s.sigma;

    std::vector<double> sorted(series.begin(), series.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    s.median = (n % 2 == 0) ? sorted[n / 2 - 1] : sorted[n / 2];
    return s;
}

/// Fractions of samples within mean +/- 1, 2, 3 empirical sigma.
struct Coverage {
    double within_1sigma = 0.0;
    double within_2sigma = 0.0;
    double within_3sigma = 0.0;
};

/// Empirical sigma-interval coverage of a series. A constant series (sigma 0)
/// counts every sample as inside all three intervals. Requires at least 100
/// samples to be statistically meaningful.
inline Coverage coverage_check(std::span<const double> series) {
    if (series.size() < 100)
        throw ConfigError("coverage_check: series must have at least 100 samples");
    const StatsSummary s = stats_summary(series, Unit::ns);
    if (s.sigma == 0.0)
        return {1.0, 1.0, 1.0};
    std::size_t in1 = 0, in2 = 0, in3 = 0;
    for (double v : series) {
        const double d = std::abs(v - s.mean);
        if (d <= s.sigma) ++in1;
        if (d <= s.two_sigma) ++in2;
        if (d <= s.three_sigma) ++in3;
    }
    const auto n = static_cast<double>(series.size());
    return {in1 / n, in2 / n, in3 / n};
}

} // namespace rbis
