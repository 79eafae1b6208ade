// netcomm command-line interface: simulate | sweep | analyze | plot |
// validate-config. See README.md for usage examples.
#include <CLI11.hpp>

#include "netcomm/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Decentralized multi-agent communication learning on social networks"};
    app.require_subcommand(1);

    netcomm::SimulateOptions sim;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    auto* simulate = app.add_subcommand("simulate", "Run one simulation");
    simulate->add_option("--config", sim.config_path, "Simulation config JSON")
        ->check(CLI::ExistingFile);
    simulate->add_option("--seed", sim_seed, "Master seed (overrides config)")
        ->each([&sim_seed_set](const std::string&) { sim_seed_set = true; });
    simulate->add_option("--out", sim.out_dir, "Output directory")
        ->envname("NETCOMM_OUT")
        ->capture_default_str();
    simulate->add_flag("--episodes", sim.write_episodes, "Also write episodes.jsonl");
    simulate->add_flag("--timeseries", sim.write_timeseries, "Also write timeseries.csv");

    netcomm::SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment sweep");
    sweep_cmd->add_option("--experiment", sweep.experiment, "Preset: 1, 2, 3, or custom")
        ->capture_default_str();
    sweep_cmd->add_option("--scale", sweep.scale, "Grid scale: full or desk")
        ->capture_default_str();
    sweep_cmd->add_option("--config", sweep.config_path, "Custom sweep config JSON")
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--seed", sweep.seed, "Master seed")->capture_default_str();
    sweep_cmd->add_option("--jobs", sweep.jobs, "Parallel runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sweep_cmd->add_option("--out", sweep.out_dir, "Output directory")
        ->envname("NETCOMM_OUT")
        ->capture_default_str();
    sweep_cmd->add_flag("--quiet", sweep.quiet, "Suppress per-run progress lines");

    netcomm::AnalyzeOptions analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Aggregate sweep results");
    analyze_cmd->add_option("--in", analyze.in_dir, "Directory containing results.csv")
        ->required();
    analyze_cmd->add_option("--out", analyze.out_dir, "Output directory")
        ->envname("NETCOMM_OUT")
        ->required();

    netcomm::PlotOptions plot;
    auto* plot_cmd = app.add_subcommand("plot", "Render SVG figures from summaries");
    plot_cmd->add_option("--in", plot.in_dir, "Directory containing summary.csv")->required();
    plot_cmd->add_option("--out", plot.out_dir, "Output directory")
        ->envname("NETCOMM_OUT")
        ->required();

    netcomm::ValidateOptions validate;
    auto* validate_cmd = app.add_subcommand("validate-config", "Check a config file");
    validate_cmd->add_option("--config", validate.config_path, "Config JSON to validate")
        ->required();
    validate_cmd->add_option("--kind", validate.kind, "simulation, sweep, or auto")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (simulate->parsed()) {
        if (sim_seed_set) sim.seed = sim_seed;
        return netcomm::cmd_simulate(sim);
    }
    if (sweep_cmd->parsed()) return netcomm::cmd_sweep(sweep);
    if (analyze_cmd->parsed()) return netcomm::cmd_analyze(analyze);
    if (plot_cmd->parsed()) return netcomm::cmd_plot(plot);
    if (validate_cmd->parsed()) return netcomm::cmd_validate_config(validate);
    return netcomm::kExitFailure;
}
