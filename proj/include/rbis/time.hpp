#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>

#include "rbis/errors.hpp"

namespace rbis {

namespace detail {

inline std::int64_t checked_add(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_add_overflow(a, b, &r))
        throw RangeError("picosecond arithmetic overflow");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_sub_overflow(a, b, &r))
        throw RangeError("picosecond arithmetic overflow");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r))
        throw RangeError("picosecond arithmetic overflow");
    return r;
}

// Nearest-integer division, halves away from zero. den > 0.
inline __int128 round_div(__int128 num, __int128 den) {
    const __int128 half = den / 2;
    return num >= 0 ? (num + half) / den : (num - half) / den;
}

inline std::int64_t floor_div(std::int64_t num, std::int64_t den) {
    std::int64_t q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

} // namespace detail

/// Signed time interval counted in integer picoseconds. All arithmetic is
/// exact; overflow of the 64-bit count raises RangeError. The usable range
/// (about +/-9.2e6 seconds) comfortably covers the +/-1e6 s contract.
class TimeSpan {
public:
    constexpr TimeSpan() = default;

    static constexpr TimeSpan picoseconds(std::int64_t ps) { return TimeSpan(ps); }
    static TimeSpan nanoseconds(std::int64_t ns) { return TimeSpan(detail::checked_mul(ns, 1'000)); }
    static TimeSpan microseconds(std::int64_t us) { return TimeSpan(detail::checked_mul(us, 1'000'000)); }
    static TimeSpan milliseconds(std::int64_t ms) { return TimeSpan(detail::checked_mul(ms, 1'000'000'000)); }
    static TimeSpan seconds(std::int64_t s) { return TimeSpan(detail::checked_mul(s, 1'000'000'000'000)); }

    /// Rounds to the nearest picosecond.
    static TimeSpan from_seconds(double s) {
        const double ps = s * 1e12;
        if (!(std::abs(ps) < 9.2e18))
            throw RangeError("TimeSpan::from_seconds out of range");
        return TimeSpan(static_cast<std::int64_t>(std::llround(ps)));
    }

    constexpr std::int64_t ps() const { return ps_; }
    double seconds_f() const { return static_cast<double>(ps_) * 1e-12; }
    double nanoseconds_f() const { return static_cast<double>(ps_) * 1e-3; }

    TimeSpan operator+(TimeSpan rhs) const { return TimeSpan(detail::checked_add(ps_, rhs.ps_)); }
    TimeSpan operator-(TimeSpan rhs) const { return TimeSpan(detail::checked_sub(ps_, rhs.ps_)); }
    constexpr TimeSpan operator-() const { return TimeSpan(-ps_); }
    TimeSpan& operator+=(TimeSpan rhs) { ps_ = detail::checked_add(ps_, rhs.ps_); return *this; }
    TimeSpan& operator-=(TimeSpan rhs) { ps_ = detail::checked_sub(ps_, rhs.ps_); return *this; }
    TimeSpan operator*(std::int64_t k) const { return TimeSpan(detail::checked_mul(ps_, k)); }

    constexpr auto operator<=>(const TimeSpan&) const = default;

private:
    explicit constexpr TimeSpan(std::int64_t ps) : ps_(ps) {}
    std::int64_t ps_ = 0;
};

/// Absolute point on a time axis, picoseconds since the epoch (true time 0).
/// Instant - Instant yields a TimeSpan exactly; Instants cannot be added.
class Instant {
public:
    constexpr Instant() = default;

    static constexpr Instant epoch() { return Instant(); }
    static constexpr Instant picoseconds(std::int64_t ps) { return Instant(ps); }
    static Instant from_seconds(double s) { return Instant(TimeSpan::from_seconds(s).ps()); }

    constexpr std::int64_t ps() const { return ps_; }
    double seconds_f() const { return static_cast<double>(ps_) * 1e-12; }

    Instant operator+(TimeSpan d) const { return Instant(detail::checked_add(ps_, d.ps())); }
    Instant operator-(TimeSpan d) const { return Instant(detail::checked_sub(ps_, d.ps())); }
    TimeSpan operator-(Instant rhs) const { return TimeSpan::picoseconds(detail::checked_sub(ps_, rhs.ps_)); }
    Instant& operator+=(TimeSpan d) { ps_ = detail::checked_add(ps_, d.ps()); return *this; }

    constexpr auto operator<=>(const Instant&) const = default;

private:
    explicit constexpr Instant(std::int64_t ps) : ps_(ps) {}
    std::int64_t ps_ = 0;
};

/// round(ppm * 1e-6 * interval), evaluated exactly.
///
/// The double `ppm` is decomposed into its dyadic mantissa/exponent so the
/// product with the integer picosecond count can be formed in 128-bit
/// arithmetic and divided by 1e6 (shifted) with a single nearest rounding.
/// This is what makes the drifting-clock map exact to 1 ps, which the
/// estimator exactness checks depend on.
inline TimeSpan scale_by_ppm(double ppm, TimeSpan interval) {
    if (!std::isfinite(ppm))
        throw RangeError("scale_by_ppm: non-finite ppm");
    if (ppm == 0.0 || interval.ps() == 0)
        return TimeSpan();

    int exp2 = 0;
    const double frac = std::frexp(ppm, &exp2);          // ppm = frac * 2^exp2
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53)); // exact
    exp2 -= 53;

    __int128 num = static_cast<__int128>(mant) * interval.ps(); // <= 117 bits

    if (exp2 >= 0) {
        if (exp2 > 10)
            throw RangeError("scale_by_ppm: ppm magnitude out of range");
        num <<= exp2;
        const __int128 q = detail::round_div(num, 1'000'000);
        if (q > std::numeric_limits<std::int64_t>::max() || q < std::numeric_limits<std::int64_t>::min())
            throw RangeError("scale_by_ppm overflow");
        return TimeSpan::picoseconds(static_cast<std::int64_t>(q));
    }

    const int shift = -exp2;
    if (shift >= 107)
        return TimeSpan(); // |result| < 0.5 ps, rounds to zero
    const __int128 den = static_cast<__int128>(1'000'000) << shift;
    const __int128 q = detail::round_div(num, den);
    return TimeSpan::picoseconds(static_cast<std::int64_t>(q));
}

} // namespace rbis
