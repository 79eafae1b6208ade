// Deterministic simulation loop and the experiment sweeps.
//
// A run is fully determined by its SimulationConfig: the master seed is split
// into independent streams (topology, pair sampling, role coin, and one
// exploration/noise plus one replay stream per agent), so any single
// component can be ablated without perturbing the draws of the others.
// Sweep runs are independent tasks whose seeds derive from
// (master_seed, cell index, repetition index); results are collected in run
// order, which makes sweep output invariant to the worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "netcomm/agent.hpp"
#include "netcomm/csv.hpp"
#include "netcomm/game.hpp"
#include "netcomm/metrics.hpp"
#include "netcomm/rng.hpp"
#include "netcomm/topology.hpp"

namespace netcomm {

struct SimulationConfig {
    TopologySpec topology;
    double supervision_rate = 0.0;
    long rounds = 120000;
    GameConfig game;
    AgentHyperparams agent;
    std::uint64_t master_seed = 0;
    // Metrics are estimated over the final metric_window rounds.
    int metric_window = 10000;
    bool record_timeseries = false;
    bool keep_episodes = false;

    void validate() const {
        topology.validate();
        game.validate();
        agent.validate();
        if (!(supervision_rate >= 0.0 && supervision_rate <= 1.0)) {
            throw std::invalid_argument("supervision_rate must be in [0,1], got " +
                                        std::to_string(supervision_rate));
        }
        if (metric_window < 1) throw std::invalid_argument("metric_window must be >= 1");
        if (rounds < metric_window) {
            throw std::invalid_argument("rounds (" + std::to_string(rounds) +
                                        ") must cover the metric window (" +
                                        std::to_string(metric_window) + "): window empty");
        }
    }
};

struct TimeseriesPoint {
    long round = 0; // last round covered by this sample
    MetricsReport report;
};

struct RunResult {
    SimulationConfig config;
    SocialNetwork network;
    GraphStats stats;
    MetricsReport report;
    double wall_seconds = 0.0; // informational; never serialized
    std::vector<TimeseriesPoint> timeseries;
    std::vector<EpisodeRecord> episodes; // populated only with keep_episodes
};

// Stream ids within one run; seeds are derive_seed(master_seed, id, 0).
namespace stream {
inline constexpr std::uint64_t kTopology = 0;
inline constexpr std::uint64_t kPairing = 1;
inline constexpr std::uint64_t kRoles = 2;
inline constexpr std::uint64_t kAgentInit = 100;   // + agent id
inline constexpr std::uint64_t kAgentAct = 200;    // + agent id
inline constexpr std::uint64_t kAgentReplay = 300; // + agent id
} // namespace stream

inline RunResult run_simulation(const SimulationConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();

    RunResult result;
    result.config = cfg;

    RngStream topology_rng(derive_seed(cfg.master_seed, stream::kTopology, 0));
    result.network = generate(cfg.topology, topology_rng);
    result.stats = graph_stats(result.network);

    const int n = cfg.topology.n_agents;
    std::vector<AgentState> agents;
    agents.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const std::uint64_t id = static_cast<std::uint64_t>(i);
        agents.push_back(make_agent(
            i, cfg.game, cfg.agent,
            RngStream(derive_seed(cfg.master_seed, stream::kAgentInit + id, 0)),
            RngStream(derive_seed(cfg.master_seed, stream::kAgentAct + id, 0)),
            RngStream(derive_seed(cfg.master_seed, stream::kAgentReplay + id, 0))));
    }

    RngStream pairing_rng(derive_seed(cfg.master_seed, stream::kPairing, 0));
    RngStream roles_rng(derive_seed(cfg.master_seed, stream::kRoles, 0));

    std::vector<EpisodeRecord> log;
    log.reserve(static_cast<std::size_t>(cfg.rounds));
    constexpr long kTimeseriesEvery = 2000;

    for (long round = 0; round < cfg.rounds; ++round) {
        const double eps = epsilon_schedule(round, cfg.rounds, cfg.agent.epsilon_start,
                                            cfg.agent.epsilon_floor,
                                            cfg.agent.epsilon_decay_fraction);
        const auto [a, b] = sample_pair(result.network, pairing_rng);
        const bool a_speaks = roles_rng.bernoulli(0.5);
        AgentState& speaker = agents[static_cast<std::size_t>(a_speaks ? a : b)];
        AgentState& listener = agents[static_cast<std::size_t>(a_speaks ? b : a)];
        speaker.epsilon = eps;
        listener.epsilon = eps;

        const PlayedRound played = play_round(speaker, listener, cfg.game, round);
        const auto& out = played.outcome;

        const bool sup_s = record_and_supervise(speaker, out, played.speaker_input,
                                                cfg.supervision_rate, speaker.rng);
        const bool sup_l = record_and_supervise(listener, out, played.listener_input,
                                                cfg.supervision_rate, listener.rng);
        train_step(speaker, cfg.agent.batch_size);
        train_step(listener, cfg.agent.batch_size);

        EpisodeRecord rec;
        rec.round = round;
        rec.speaker_id = static_cast<std::int16_t>(out.speaker_id);
        rec.listener_id = static_cast<std::int16_t>(out.listener_id);
        rec.message = static_cast<std::int8_t>(out.message);
        rec.message_heard = static_cast<std::int8_t>(played.message_heard);
        rec.speaker_action = static_cast<std::int8_t>(out.speaker_action);
        rec.listener_action = static_cast<std::int8_t>(out.listener_action);
        rec.speaker_supervised = sup_s;
        rec.listener_supervised = sup_l;
        rec.speaker_reward = out.speaker_reward;
        rec.listener_reward = out.listener_reward;
        log.push_back(rec);

        if (cfg.record_timeseries && (round + 1) % kTimeseriesEvery == 0) {
            const auto set = accumulate(log, n, round + 1 - kTimeseriesEvery, round);
            result.timeseries.push_back({round, compute_report(set)});
        }
    }

    const auto final_set = accumulate(log, n, cfg.rounds - cfg.metric_window, cfg.rounds - 1);
    result.report = compute_report(final_set);

    if (cfg.keep_episodes) result.episodes = std::move(log);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepCell {
    TopologySpec topology;
    double supervision_rate = 0.0;
};

struct SweepSpec {
    std::string experiment_id = "custom"; // "1" | "2" | "3" | "custom"
    std::vector<SweepCell> cells;
    int repetitions = 1;
    long rounds = 120000;
    GameConfig game;
    AgentHyperparams agent;
    std::uint64_t master_seed = 0;
    int metric_window = 10000;

    void validate() const {
        if (cells.empty()) throw std::invalid_argument("sweep has no cells");
        if (repetitions < 1) throw std::invalid_argument("sweep repetitions must be >= 1");
        for (const auto& c : cells) c.topology.validate();
    }
};

// The paper-scale grids and the reduced desk-scale grids used by CI.
//
//   experiment 1: topology type {ring, random p=.2, small-world p=.2, clique}
//                 full: s in 0.0..0.9 x 10 reps; desk: s in {0, .5} x 5 reps
//   experiment 2: random p, full: 0.2..0.9 x s 0.0..0.9 x 5 reps
//                 desk: p in {.2, .5, .9} x s in {0, .5} x 3 reps
//   experiment 3: small-world p, full: 0.0..0.9 x s 0.0..0.9 x 5 reps
//                 desk: p in {0, .4, .9} x s in {0, .5} x 3 reps
inline SweepSpec make_experiment_sweep(int experiment, bool desk_scale,
                                       std::uint64_t master_seed) {
    SweepSpec spec;
    spec.experiment_id = std::to_string(experiment);
    spec.master_seed = master_seed;
    spec.rounds = 120000;

    const std::vector<double> full_s = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const std::vector<double> desk_s = {0.0, 0.5};
    const auto& s_grid = desk_scale ? desk_s : full_s;

    auto add_cells = [&spec, &s_grid](const std::vector<TopologySpec>& topologies) {
        for (const auto& topo : topologies) {
            for (double s : s_grid) spec.cells.push_back({topo, s});
        }
    };

    switch (experiment) {
        case 1: {
            add_cells({{TopologyKind::Ring, 10, 0.0},
                       {TopologyKind::Random, 10, 0.2},
                       {TopologyKind::SmallWorld, 10, 0.2},
                       {TopologyKind::Clique, 10, 0.0}});
            spec.repetitions = desk_scale ? 5 : 10;
            break;
        }
        case 2: {
            std::vector<TopologySpec> topologies;
            const std::vector<double> full_p = {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
            const std::vector<double> desk_p = {0.2, 0.5, 0.9};
            for (double p : (desk_scale ? desk_p : full_p)) {
                topologies.push_back({TopologyKind::Random, 10, p});
            }
            add_cells(topologies);
            spec.repetitions = desk_scale ? 3 : 5;
            break;
        }
        case 3: {
            std::vector<TopologySpec> topologies;
            const std::vector<double> full_p = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
            const std::vector<double> desk_p = {0.0, 0.4, 0.9};
            for (double p : (desk_scale ? desk_p : full_p)) {
                topologies.push_back({TopologyKind::SmallWorld, 10, p});
            }
            add_cells(topologies);
            spec.repetitions = desk_scale ? 3 : 5;
            break;
        }
        default:
            throw std::invalid_argument("experiment preset must be 1, 2, or 3");
    }
    return spec;
}

struct RunPlan {
    int run_index = 0;
    int cell_index = 0;
    int repetition = 0;
    SimulationConfig config;
};

inline std::vector<RunPlan> plan_sweep(const SweepSpec& spec) {
    spec.validate();
    std::vector<RunPlan> plans;
    plans.reserve(spec.cells.size() * static_cast<std::size_t>(spec.repetitions));
    int run_index = 0;
    for (std::size_t cell = 0; cell < spec.cells.size(); ++cell) {
        for (int rep = 0; rep < spec.repetitions; ++rep) {
            RunPlan plan;
            plan.run_index = run_index++;
            plan.cell_index = static_cast<int>(cell);
            plan.repetition = rep;
            plan.config.topology = spec.cells[cell].topology;
            plan.config.supervision_rate = spec.cells[cell].supervision_rate;
            plan.config.rounds = spec.rounds;
            plan.config.game = spec.game;
            plan.config.agent = spec.agent;
            plan.config.metric_window = spec.metric_window;
            plan.config.master_seed =
                derive_seed(spec.master_seed, static_cast<std::uint64_t>(cell),
                            static_cast<std::uint64_t>(rep));
            plans.push_back(std::move(plan));
        }
    }
    return plans;
}

struct RunRecord {
    RunPlan plan;
    std::optional<RunResult> result;
    std::string error; // nonempty when the run failed
};

struct SweepOutcome {
    SweepSpec spec;
    std::vector<RunRecord> runs;

    int failures() const {
        int n = 0;
        for (const auto& r : runs) {
            if (!r.error.empty()) ++n;
        }
        return n;
    }
};

// Executes all planned runs with at most `parallelism` worker threads.
// Individual failures are recorded and the sweep continues. The progress
// callback, when set, is invoked from worker threads after each run.
inline SweepOutcome run_sweep(const SweepSpec& spec, int parallelism,
                              const std::function<void(const RunRecord&)>& progress = {}) {
    auto plans = plan_sweep(spec);
    SweepOutcome outcome;
    outcome.spec = spec;
    outcome.runs.resize(plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) outcome.runs[i].plan = plans[i];

    if (parallelism < 1) parallelism = 1;
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plans.size()) return;
            RunRecord& rec = outcome.runs[i];
            try {
                rec.result = run_simulation(rec.plan.config);
            } catch (const std::exception& e) {
                rec.error = e.what();
            }
            if (progress) progress(rec);
        }
    };

    const int n_workers = std::min<int>(parallelism, static_cast<int>(plans.size()));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// Serialization

inline constexpr const char* kResultsCsvHeader =
    "experiment_id,topology_kind,topology_param,realized_avg_degree,"
    "realized_degree_variance,n_global_edges,supervision_rate,repetition,seed,"
    "avg_reward,speaking_consistency,listening_consistency,"
    "between_agent_divergence,within_agent_divergence,signaling_divergence,"
    "action_predictability,message_predictability";

inline void write_result_row(std::ostream& out, const std::string& experiment_id,
                             int repetition, const RunResult& r) {
    const auto& cfg = r.config;
    out << experiment_id << ',' << to_string(cfg.topology.kind) << ','
        << fmt_double(cfg.topology.param) << ',' << fmt_double(r.stats.avg_degree) << ','
        << fmt_double(r.stats.degree_variance) << ',' << r.stats.n_global_edges << ','
        << fmt_double(cfg.supervision_rate) << ',' << repetition << ',' << cfg.master_seed
        << ',' << fmt_double(r.report.avg_reward) << ','
        << fmt_double(r.report.speaking_consistency) << ','
        << fmt_double(r.report.listening_consistency) << ','
        << fmt_double(r.report.between_agent_divergence) << ','
        << fmt_double(r.report.within_agent_divergence) << ','
        << fmt_double(r.report.signaling_divergence) << ','
        << fmt_double(r.report.action_predictability) << ','
        << fmt_double(r.report.message_predictability) << '\n';
}

// One row per successful run, in run order. Failed runs are omitted here and
// reported through SweepOutcome::failures().
inline void write_results_csv(const SweepOutcome& outcome, std::ostream& out) {
    out << kResultsCsvHeader << '\n';
    for (const auto& rec : outcome.runs) {
        if (rec.result) write_result_row(out, outcome.spec.experiment_id,
                                         rec.plan.repetition, *rec.result);
    }
}

inline void write_episodes_jsonl(const std::vector<EpisodeRecord>& episodes, std::ostream& out) {
    for (const auto& e : episodes) {
        out << "{\"round\":" << e.round << ",\"speaker\":" << e.speaker_id
            << ",\"listener\":" << e.listener_id << ",\"message\":" << static_cast<int>(e.message)
            << ",\"speaker_action\":" << static_cast<int>(e.speaker_action)
            << ",\"listener_action\":" << static_cast<int>(e.listener_action)
            << ",\"speaker_reward\":" << fmt_double(e.speaker_reward)
            << ",\"listener_reward\":" << fmt_double(e.listener_reward)
            << ",\"speaker_supervised\":" << (e.speaker_supervised ? "true" : "false")
            << ",\"listener_supervised\":" << (e.listener_supervised ? "true" : "false") << "}\n";
    }
}

inline void write_timeseries_csv(const std::vector<TimeseriesPoint>& series, std::ostream& out) {
    out << "round,avg_reward,speaking_consistency,listening_consistency,"
           "between_agent_divergence,within_agent_divergence,signaling_divergence,"
           "action_predictability,message_predictability\n";
    for (const auto& p : series) {
        out << p.round << ',' << fmt_double(p.report.avg_reward) << ','
            << fmt_double(p.report.speaking_consistency) << ','
            << fmt_double(p.report.listening_consistency) << ','
            << fmt_double(p.report.between_agent_divergence) << ','
            << fmt_double(p.report.within_agent_divergence) << ','
            << fmt_double(p.report.signaling_divergence) << ','
            << fmt_double(p.report.action_predictability) << ','
            << fmt_double(p.report.message_predictability) << '\n';
    }
}

} // namespace netcomm
