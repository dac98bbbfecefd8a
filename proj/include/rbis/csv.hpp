#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "rbis/errors.hpp"
#include "rbis/estimator.hpp"
#include "rbis/simulation.hpp"
#include "rbis/stats.hpp"

namespace rbis {

namespace detail {

inline void open_for_write(std::ofstream& out, const std::filesystem::path& path) {
    out.open(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot open " + path.string() + " for writing");
}

inline std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

inline std::int64_t parse_i64(std::string_view field, const std::string& where) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError(where + ": expected integer, got '" + std::string(field) + "'");
    return value;
}

} // namespace detail

inline void write_tuples_csv(const std::filesystem::path& path, const std::vector<TimestampTuple>& tuples) {
    std::ofstream out;
    detail::open_for_write(out, path);
    out << "t_master_ps,t_slave_ps\n";
    for (const TimestampTuple& t : tuples)
        out << t.t_master.ps() << ',' << t.t_slave.ps() << '\n';
}

/// Strict tuple-log reader: exact header, integer fields, strictly
/// increasing master timestamps. Parse problems carry the line number.
inline std::vector<TimestampTuple> read_tuples_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line))
        throw ParseError(path.string() + ":1: empty file, expected header t_master_ps,t_slave_ps");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != "t_master_ps,t_slave_ps")
        throw ParseError(path.string() + ":1: expected header t_master_ps,t_slave_ps");

    std::vector<TimestampTuple> tuples;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ParseError(where + ": expected two comma-separated fields");
        const std::int64_t tm = detail::parse_i64(std::string_view(line).substr(0, comma), where);
        const std::int64_t ts = detail::parse_i64(std::string_view(line).substr(comma + 1), where);
        if (!tuples.empty() && tm <= tuples.back().t_master.ps())
            throw OrderingError(where + ": t_master_ps not strictly increasing");
        tuples.push_back({Instant::picoseconds(tm), Instant::picoseconds(ts)});
    }
    return tuples;
}

inline void write_skew_series_csv(const std::filesystem::path& path, const SkewSeriesResult& series) {
    std::ofstream out;
    detail::open_for_write(out, path);
    out << "k,t_master_ps,filtered_skew_ppm\n";
    for (std::size_t i = 0; i < series.filtered_ppm.size(); ++i)
        out << (i + 1) << ',' << series.at_master_time[i].ps() << ','
            << detail::fixed(series.filtered_ppm[i], 9) << '\n';
}

inline void write_edges_csv(const std::filesystem::path& path, const std::vector<EdgeRecord>& edges) {
    std::ofstream out;
    detail::open_for_write(out, path);
    out << "k,at_true_time_ps,theta_measured_ps,true_residual_ps,scope_noise_ps\n";
    for (std::size_t i = 0; i < edges.size(); ++i)
        out << (i + 1) << ',' << edges[i].at_true_time.ps() << ',' << edges[i].theta_measured.ps() << ','
            << edges[i].true_residual.ps() << ',' << edges[i].scope_noise.ps() << '\n';
}

struct SummaryRow {
    std::string kind;          // "skew" or "edge_offset"
    std::uint32_t window_n = 0; // 0 = not applicable
    StatsSummary stats;
};

inline constexpr std::string_view kSummaryHeader =
    "kind,window_n,unit,count,median,mean,sigma,two_sigma,three_sigma";

inline std::string format_summary_row(const SummaryRow& row) {
    std::string out = row.kind;
    out += ',';
    if (row.window_n > 0)
        out += std::to_string(row.window_n);
    out += ',';
    out += unit_name(row.stats.unit);
    out += ',';
    out += std::to_string(row.stats.count);
    for (const double v : {row.stats.median, row.stats.mean, row.stats.sigma, row.stats.two_sigma,
                           row.stats.three_sigma}) {
        out += ',';
        out += detail::fixed(v, 4);
    }
    return out;
}

inline void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
    std::ofstream out;
    detail::open_for_write(out, path);
    out << kSummaryHeader << '\n';
    for (const SummaryRow& row : rows)
        out << format_summary_row(row) << '\n';
}

/// Long-format sweep series for plotting: one line per (seed, N, sample).
inline void write_sweep_series_csv(const std::filesystem::path& path,
                                   const std::vector<std::pair<std::uint64_t, const SimulationReport*>>& runs) {
    std::ofstream out;
    detail::open_for_write(out, path);
    out << "seed,window_n,k,filtered_skew_ppm\n";
    for (const auto& [seed, report] : runs)
        for (const SkewSeriesResult& series : report->skew_series)
            for (std::size_t i = 0; i < series.filtered_ppm.size(); ++i)
                out << seed << ',' << series.window_n << ',' << (i + 1) << ','
                    << detail::fixed(series.filtered_ppm[i], 9) << '\n';
}

} // namespace rbis
