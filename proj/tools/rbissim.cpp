#include <atomic>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "rbis/rbis.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParseError = 2;
constexpr int kExitConfigError = 3;
constexpr int kExitSimulationError = 4;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw rbis::ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string skew_series_filename(std::uint32_t n) {
    return "skew_estimates_N" + std::to_string(n) + ".csv";
}

/// Writes the per-run result files next to an already-written manifest.
void write_simulation_outputs(const fs::path& out_dir, const rbis::SimulationReport& report) {
    rbis::write_tuples_csv(out_dir / "tuples.csv", report.tuples);
    for (const rbis::SkewSeriesResult& series : report.skew_series)
        rbis::write_skew_series_csv(out_dir / skew_series_filename(series.window_n), series);
    rbis::write_edges_csv(out_dir / "edge_offsets.csv", report.edges);

    std::vector<rbis::SummaryRow> rows;
    for (const rbis::SweepRow& row : rbis::summarize_skew_series(report))
        rows.push_back({"skew", row.window_n, row.stats});
    if (!report.edges.empty())
        rows.push_back({"edge_offset", 0, rbis::summarize_edges_ns(report)});
    rbis::write_summary_csv(out_dir / "summary.csv", rows);
}

void warn_on_shortfall(const rbis::ScenarioConfig& cfg, const rbis::SimulationReport& report) {
    if (report.tuples.size() < cfg.series.skew_samples + 1)
        std::cerr << "warning: collected " << report.tuples.size() << " tuples, requested "
                  << cfg.series.skew_samples + 1 << " (losses? extend duration_s)\n";
    if (report.edges.size() < cfg.series.edge_samples)
        std::cerr << "warning: collected " << report.edges.size() << " edge measurements, requested "
                  << cfg.series.edge_samples << "\n";
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

rbis::ScenarioConfig load_config(const CommonArgs& args, std::string& raw_bytes) {
    raw_bytes = read_file(args.config_path);
    rbis::ScenarioConfig cfg = rbis::parse_scenario_text(raw_bytes);
    if (args.seed_given)
        cfg.seed = args.seed;
    cfg.validate();
    return cfg;
}

int cmd_simulate(const CommonArgs& args) {
    std::string raw;
    const rbis::ScenarioConfig cfg = load_config(args, raw);
    fs::create_directories(args.out_dir);
    rbis::write_manifest(args.out_dir, {"simulate", args.config_path, rbis::fnv1a64_hex(raw), cfg.seed,
                                        args.out_dir});
    const rbis::SimulationReport report = rbis::run_scenario(cfg);
    write_simulation_outputs(args.out_dir, report);
    warn_on_shortfall(cfg, report);
    return kExitOk;
}

int cmd_analyze(const std::string& tuples_path, const std::string& out_dir,
                const std::vector<std::uint32_t>& sweep) {
    const std::vector<rbis::TimestampTuple> tuples = rbis::read_tuples_csv(tuples_path);
    if (tuples.size() < 2)
        throw rbis::ConfigError("tuple log must contain at least 2 rows");
    for (const std::uint32_t n : sweep)
        if (n == 0)
            throw rbis::ConfigError("filter sweep entries must be >= 1");

    fs::create_directories(out_dir);
    rbis::write_manifest(out_dir,
                         {"analyze", tuples_path, rbis::fnv1a64_hex(read_file(tuples_path)), 0, out_dir});

    std::vector<rbis::SummaryRow> rows;
    for (const std::uint32_t n : sweep) {
        const rbis::SkewSeriesResult series = rbis::filtered_skew_series(tuples, n);
        rbis::write_skew_series_csv(fs::path(out_dir) / skew_series_filename(n), series);
        rows.push_back({"skew", n, rbis::stats_summary(series.filtered_ppm, rbis::Unit::ppm)});
    }
    rbis::write_summary_csv(fs::path(out_dir) / "summary.csv", rows);
    return kExitOk;
}

int cmd_sweep(const CommonArgs& args, std::vector<std::uint64_t> seeds, unsigned jobs) {
    std::string raw;
    const rbis::ScenarioConfig base = load_config(args, raw);
    if (seeds.empty())
        seeds.push_back(base.seed);
    if (jobs == 0)
        jobs = 1;

    fs::create_directories(args.out_dir);
    rbis::write_manifest(args.out_dir,
                         {"sweep", args.config_path, rbis::fnv1a64_hex(raw), base.seed, args.out_dir});

    std::vector<rbis::SimulationReport> reports(seeds.size());
    std::vector<std::string> failures(seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1)) {
            rbis::ScenarioConfig cfg = base;
            cfg.seed = seeds[i];
            try {
                reports[i] = rbis::run_scenario(cfg);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned worker_count = std::min<unsigned>(jobs, static_cast<unsigned>(seeds.size()));
    for (unsigned i = 0; i + 1 < worker_count; ++i)
        pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool)
        t.join();
    for (std::size_t i = 0; i < seeds.size(); ++i)
        if (!failures[i].empty())
            throw rbis::SimulationError("seed " + std::to_string(seeds[i]) + ": " + failures[i]);

    if (seeds.size() == 1) {
        std::vector<rbis::SummaryRow> rows;
        for (const rbis::SweepRow& row : rbis::summarize_skew_series(reports[0]))
            rows.push_back({"skew", row.window_n, row.stats});
        rbis::write_summary_csv(fs::path(args.out_dir) / "summary.csv", rows);
    } else {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            const fs::path dir = fs::path(args.out_dir) / ("seed_" + std::to_string(seeds[i]));
            fs::create_directories(dir);
            std::vector<rbis::SummaryRow> rows;
            for (const rbis::SweepRow& row : rbis::summarize_skew_series(reports[i]))
                rows.push_back({"skew", row.window_n, row.stats});
            rbis::write_summary_csv(dir / "summary.csv", rows);
        }
    }
    std::vector<std::pair<std::uint64_t, const rbis::SimulationReport*>> runs;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        runs.emplace_back(seeds[i], &reports[i]);
    rbis::write_sweep_series_csv(fs::path(args.out_dir) / "sweep_series.csv", runs);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rbissim: broadcast-reference time synchronization simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    unsigned jobs = 1;
    std::vector<std::uint64_t> seeds;
    std::string tuples_path;
    std::vector<std::uint32_t> analyze_sweep = {1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario and write its result bundle");
    simulate->add_option("--config", args.config_path, "scenario config (JSON)")->required();
    simulate->add_option("--out", args.out_dir, "output directory")->required();
    simulate->add_option("--seed", args.seed, "seed override");

    CLI::App* analyze = app.add_subcommand("analyze", "recompute skew statistics from a tuple log");
    analyze->add_option("--tuples", tuples_path, "tuple log CSV (t_master_ps,t_slave_ps)")->required();
    analyze->add_option("--out", args.out_dir, "output directory")->required();
    analyze->add_option("--filter-sweep", analyze_sweep, "window sizes, comma separated")->delimiter(',');

    CLI::App* sweep = app.add_subcommand("sweep", "run the filter-size sweep, optionally over several seeds");
    sweep->add_option("--config", args.config_path, "scenario config (JSON)")->required();
    sweep->add_option("--out", args.out_dir, "output directory")->required();
    sweep->add_option("--seed", args.seed, "seed override");
    sweep->add_option("--seeds", seeds, "seed list, comma separated")->delimiter(',');
    sweep->add_option("--jobs", jobs, "parallel seed runs");

    CLI11_PARSE(app, argc, argv);
    args.seed_given = simulate->count("--seed") > 0 || sweep->count("--seed") > 0;

    try {
        if (simulate->parsed())
            return cmd_simulate(args);
        if (analyze->parsed())
            return cmd_analyze(tuples_path, args.out_dir, analyze_sweep);
        return cmd_sweep(args, seeds, jobs);
    } catch (const rbis::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParseError;
    } catch (const rbis::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const rbis::OrderingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSimulationError;
    }
}
