// Subcommand bodies behind the CLI: each returns a process exit code and
// performs all of its own file I/O, so they are directly callable from tests.
//
// Exit codes: 0 success, 1 failure, 3 partial sweep failure (some runs
// completed, some did not).
#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "netcomm/analysis.hpp"
#include "netcomm/config_io.hpp"
#include "netcomm/experiment.hpp"
#include "netcomm/plot.hpp"

namespace netcomm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPartial = 3;

namespace detail {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

} // namespace detail

struct SimulateOptions {
    std::string config_path;              // optional; defaults when empty
    std::optional<std::uint64_t> seed;    // overrides config master_seed
    std::string out_dir = "out";
    bool write_episodes = false;
    bool write_timeseries = false;
};

// Runs one simulation and writes results.csv (single row), network.txt, and
// optionally episodes.jsonl / timeseries.csv.
inline int cmd_simulate(const SimulateOptions& opt) {
    try {
        SimulationConfig cfg;
        if (!opt.config_path.empty()) {
            cfg = parse_simulation_config(load_json_file(opt.config_path));
        }
        if (opt.seed) cfg.master_seed = *opt.seed;
        cfg.keep_episodes = opt.write_episodes;
        if (opt.write_timeseries) cfg.record_timeseries = true;
        cfg.validate();

        const RunResult result = run_simulation(cfg);

        detail::ensure_dir(opt.out_dir);
        {
            auto out = detail::open_out(opt.out_dir + "/results.csv");
            out << kResultsCsvHeader << '\n';
            write_result_row(out, "single", 0, result);
        }
        {
            auto out = detail::open_out(opt.out_dir + "/network.txt");
            write_edge_list(result.network, out);
        }
        if (opt.write_episodes) {
            auto out = detail::open_out(opt.out_dir + "/episodes.jsonl");
            write_episodes_jsonl(result.episodes, out);
        }
        if (opt.write_timeseries) {
            auto out = detail::open_out(opt.out_dir + "/timeseries.csv");
            write_timeseries_csv(result.timeseries, out);
        }
        std::cerr << "simulate: seed " << cfg.master_seed << ", " << cfg.rounds
                  << " rounds, avg reward " << fmt_double(result.report.avg_reward) << " ("
                  << fmt_double(result.wall_seconds) << "s)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulate: error: " << e.what() << "\n";
        return kExitFailure;
    }
}

struct SweepOptions {
    std::string experiment = "1"; // "1" | "2" | "3" | "custom"
    std::string scale = "desk";   // "full" | "desk"
    std::string config_path;      // required for custom sweeps
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out_dir = "out";
    bool quiet = false;
};

// Runs a sweep preset (or a custom sweep from a config file) and writes
// results.csv plus a sweep_manifest.json echo of the executed spec.
inline int cmd_sweep(const SweepOptions& opt) {
    try {
        SweepSpec spec;
        if (opt.experiment == "custom") {
            if (opt.config_path.empty()) {
                throw std::invalid_argument("custom sweeps require --config");
            }
            spec = parse_sweep_spec(load_json_file(opt.config_path));
            spec.master_seed = opt.seed ? opt.seed : spec.master_seed;
        } else if (opt.experiment == "1" || opt.experiment == "2" || opt.experiment == "3") {
            if (opt.scale != "full" && opt.scale != "desk") {
                throw std::invalid_argument("--scale must be full or desk");
            }
            spec = make_experiment_sweep(std::stoi(opt.experiment), opt.scale == "desk",
                                         opt.seed);
        } else {
            throw std::invalid_argument("--experiment must be 1, 2, 3, or custom");
        }

        const std::size_t total = plan_sweep(spec).size();
        std::atomic<int> done{0};
        auto progress = [&](const RunRecord& rec) {
            const int i = ++done;
            if (opt.quiet) return;
            std::ostringstream line;
            line << "[" << i << "/" << total << "] cell " << rec.plan.cell_index << " rep "
                 << rec.plan.repetition;
            if (rec.error.empty()) {
                line << " ok (" << fmt_double(rec.result->wall_seconds) << "s)";
            } else {
                line << " FAILED: " << rec.error;
            }
            line << "\n";
            std::cerr << line.str(); // single write keeps lines intact across workers
        };

        const SweepOutcome outcome = run_sweep(spec, opt.jobs, progress);

        detail::ensure_dir(opt.out_dir);
        {
            auto out = detail::open_out(opt.out_dir + "/results.csv");
            write_results_csv(outcome, out);
        }
        {
            auto out = detail::open_out(opt.out_dir + "/sweep_manifest.json");
            out << to_json(spec).dump(2) << "\n";
        }

        const int failed = outcome.failures();
        if (failed == static_cast<int>(outcome.runs.size())) {
            std::cerr << "sweep: all " << failed << " runs failed\n";
            return kExitFailure;
        }
        if (failed > 0) {
            std::cerr << "sweep: " << failed << "/" << outcome.runs.size() << " runs failed\n";
            return kExitPartial;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "sweep: error: " << e.what() << "\n";
        return kExitFailure;
    }
}

struct AnalyzeOptions {
    std::string in_dir;
    std::string out_dir;
};

// Aggregates results.csv into per-condition summary.csv (mean + 95% CI) and
// fits the preset regressions into regressions.csv.
inline int cmd_analyze(const AnalyzeOptions& opt) {
    try {
        const auto rows = parse_result_rows(read_csv_file(opt.in_dir + "/results.csv"));
        if (rows.empty()) throw std::runtime_error("no data: results.csv has no rows");
        const auto summaries = aggregate_ci(rows);
        const auto regressions = standard_regressions(rows);

        detail::ensure_dir(opt.out_dir);
        {
            auto out = detail::open_out(opt.out_dir + "/summary.csv");
            write_summary_csv(summaries, out);
        }
        {
            auto out = detail::open_out(opt.out_dir + "/regressions.csv");
            write_regressions_csv(regressions, out);
        }
        std::cerr << "analyze: " << rows.size() << " runs -> " << summaries.size()
                  << " conditions, " << regressions.size() << " regressions\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "analyze: error: " << e.what() << "\n";
        return kExitFailure;
    }
}

struct PlotOptions {
    std::string in_dir;
    std::string out_dir;
};

// Re-reads a ConditionSummary list from summary.csv.
inline std::vector<ConditionSummary> read_summary_csv(const std::string& path) {
    const CsvTable table = read_csv_file(path);
    std::vector<ConditionSummary> summaries;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        ConditionSummary cs;
        cs.experiment_id = table.cell(r, "experiment_id");
        cs.topology_kind = table.cell(r, "topology_kind");
        cs.topology_param = table.number(r, "topology_param");
        cs.supervision_rate = table.number(r, "supervision_rate");
        cs.n_runs = static_cast<int>(table.number(r, "n_runs"));
        for (const auto& name : summary_metric_names()) {
            MetricStat stat;
            stat.mean = table.number(r, name + "_mean");
            const std::string& ci = table.cell(r, name + "_ci_half");
            if (ci != "NA") {
                stat.ci_half = table.number(r, name + "_ci_half");
                stat.ci_available = true;
            }
            cs.stats[name] = stat;
        }
        summaries.push_back(std::move(cs));
    }
    return summaries;
}

inline int cmd_plot(const PlotOptions& opt) {
    try {
        const auto summaries = read_summary_csv(opt.in_dir + "/summary.csv");
        detail::ensure_dir(opt.out_dir);
        const auto files = emit_plots(summaries, opt.out_dir);
        std::cerr << "plot: wrote " << files.size() << " file(s) to " << opt.out_dir << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "plot: error: " << e.what() << "\n";
        return kExitFailure;
    }
}

struct ValidateOptions {
    std::string config_path;
    std::string kind = "auto"; // "simulation" | "sweep" | "auto"
};

// Parses and validates a config file, printing what it found.
inline int cmd_validate_config(const ValidateOptions& opt) {
    try {
        const json j = load_json_file(opt.config_path);
        const bool looks_like_sweep = j.contains("cells");
        if (opt.kind == "sweep" || (opt.kind == "auto" && looks_like_sweep)) {
            const SweepSpec spec = parse_sweep_spec(j);
            std::cout << "valid sweep config: " << spec.cells.size() << " cells x "
                      << spec.repetitions << " repetitions = "
                      << spec.cells.size() * static_cast<std::size_t>(spec.repetitions)
                      << " runs\n";
        } else {
            const SimulationConfig cfg = parse_simulation_config(j);
            std::cout << "valid simulation config: " << to_string(cfg.topology.kind) << " n="
                      << cfg.topology.n_agents << ", " << cfg.rounds << " rounds\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "validate-config: error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace netcomm
