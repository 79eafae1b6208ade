// JSON (de)serialization of simulation and sweep configurations. Parsing is
// strict: unknown keys and out-of-range values are rejected with a diagnostic
// naming the offending field.
#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "netcomm/experiment.hpp"

namespace netcomm {

using json = nlohmann::json;

namespace detail {

inline void check_keys(const json& j, const std::string& ctx,
                       std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw std::invalid_argument(ctx + " must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) { ok = true; break; }
        }
        if (!ok) throw std::invalid_argument("unknown field \"" + ctx + "." + key + "\"");
    }
}

template <class T>
T get_or(const json& j, const std::string& ctx, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("field \"" + ctx + "." + key + "\" has the wrong type");
    }
}

} // namespace detail

inline TopologySpec parse_topology(const json& j, const std::string& ctx) {
    detail::check_keys(j, ctx, {"kind", "n_agents", "param"});
    TopologySpec spec;
    if (j.contains("kind")) {
        try {
            spec.kind = topology_kind_from_string(j.at("kind").get<std::string>());
        } catch (const std::exception& e) {
            throw std::invalid_argument("field \"" + ctx + ".kind\": " + e.what());
        }
    }
    spec.n_agents = detail::get_or(j, ctx, "n_agents", spec.n_agents);
    spec.param = detail::get_or(j, ctx, "param", spec.param);
    try {
        spec.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument("in \"" + ctx + "\": " + e.what());
    }
    return spec;
}

inline GameConfig parse_game(const json& j, const std::string& ctx) {
    detail::check_keys(j, ctx, {"coordination_reward", "history_length", "ablate_channel"});
    GameConfig game;
    game.coordination_reward =
        detail::get_or(j, ctx, "coordination_reward", game.coordination_reward);
    game.history_length = detail::get_or(j, ctx, "history_length", game.history_length);
    game.ablate_channel = detail::get_or(j, ctx, "ablate_channel", game.ablate_channel);
    try {
        game.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument("in \"" + ctx + "\": " + e.what());
    }
    return game;
}

inline AgentHyperparams parse_agent(const json& j, const std::string& ctx) {
    detail::check_keys(j, ctx,
                       {"replay_capacity", "batch_size", "optimizer", "learning_rate",
                        "epsilon_start", "epsilon_floor", "epsilon_decay_fraction"});
    AgentHyperparams hp;
    hp.replay_capacity = detail::get_or(j, ctx, "replay_capacity", hp.replay_capacity);
    hp.batch_size = detail::get_or(j, ctx, "batch_size", hp.batch_size);
    if (j.contains("optimizer")) {
        const auto name = detail::get_or<std::string>(j, ctx, "optimizer", "adam");
        if (name == "adam") {
            hp.optimizer = OptimizerKind::Adam;
        } else if (name == "sgd") {
            hp.optimizer = OptimizerKind::Sgd;
        } else {
            throw std::invalid_argument("field \"" + ctx +
                                        ".optimizer\" must be \"adam\" or \"sgd\"");
        }
    }
    hp.learning_rate = detail::get_or(j, ctx, "learning_rate", hp.learning_rate);
    hp.epsilon_start = detail::get_or(j, ctx, "epsilon_start", hp.epsilon_start);
    hp.epsilon_floor = detail::get_or(j, ctx, "epsilon_floor", hp.epsilon_floor);
    hp.epsilon_decay_fraction =
        detail::get_or(j, ctx, "epsilon_decay_fraction", hp.epsilon_decay_fraction);
    try {
        hp.validate();
    } catch (const std::exception& e) {
        throw std::invalid_argument("in \"" + ctx + "\": " + e.what());
    }
    return hp;
}

inline SimulationConfig parse_simulation_config(const json& j) {
    detail::check_keys(j, "config",
                       {"topology", "supervision_rate", "rounds", "game", "agent",
                        "master_seed", "metric_window", "record_timeseries"});
    SimulationConfig cfg;
    if (j.contains("topology")) cfg.topology = parse_topology(j.at("topology"), "config.topology");
    cfg.supervision_rate = detail::get_or(j, "config", "supervision_rate", cfg.supervision_rate);
    cfg.rounds = detail::get_or(j, "config", "rounds", cfg.rounds);
    if (j.contains("game")) cfg.game = parse_game(j.at("game"), "config.game");
    if (j.contains("agent")) cfg.agent = parse_agent(j.at("agent"), "config.agent");
    cfg.master_seed = detail::get_or(j, "config", "master_seed", cfg.master_seed);
    cfg.metric_window = detail::get_or(j, "config", "metric_window", cfg.metric_window);
    cfg.record_timeseries =
        detail::get_or(j, "config", "record_timeseries", cfg.record_timeseries);
    cfg.validate();
    return cfg;
}

inline SweepSpec parse_sweep_spec(const json& j) {
    detail::check_keys(j, "sweep",
                       {"experiment_id", "cells", "repetitions", "rounds", "game", "agent",
                        "master_seed", "metric_window"});
    SweepSpec spec;
    spec.experiment_id = detail::get_or<std::string>(j, "sweep", "experiment_id", "custom");
    spec.repetitions = detail::get_or(j, "sweep", "repetitions", spec.repetitions);
    spec.rounds = detail::get_or(j, "sweep", "rounds", spec.rounds);
    if (j.contains("game")) spec.game = parse_game(j.at("game"), "sweep.game");
    if (j.contains("agent")) spec.agent = parse_agent(j.at("agent"), "sweep.agent");
    spec.master_seed = detail::get_or(j, "sweep", "master_seed", spec.master_seed);
    spec.metric_window = detail::get_or(j, "sweep", "metric_window", spec.metric_window);
    if (!j.contains("cells")) throw std::invalid_argument("field \"sweep.cells\" is required");
    if (!j.at("cells").is_array()) {
        throw std::invalid_argument("field \"sweep.cells\" must be an array");
    }
    int idx = 0;
    for (const auto& cj : j.at("cells")) {
        const std::string ctx = "sweep.cells[" + std::to_string(idx++) + "]";
        detail::check_keys(cj, ctx, {"topology", "supervision_rate"});
        SweepCell cell;
        if (cj.contains("topology")) cell.topology = parse_topology(cj.at("topology"), ctx + ".topology");
        cell.supervision_rate = detail::get_or(cj, ctx, "supervision_rate", 0.0);
        if (!(cell.supervision_rate >= 0.0 && cell.supervision_rate <= 1.0)) {
            throw std::invalid_argument("field \"" + ctx + ".supervision_rate\" must be in [0,1]");
        }
        spec.cells.push_back(std::move(cell));
    }
    spec.validate();
    return spec;
}

inline json to_json(const TopologySpec& spec) {
    return json{{"kind", to_string(spec.kind)}, {"n_agents", spec.n_agents}, {"param", spec.param}};
}

inline json to_json(const GameConfig& game) {
    return json{{"coordination_reward", game.coordination_reward},
                {"history_length", game.history_length},
                {"ablate_channel", game.ablate_channel}};
}

inline json to_json(const AgentHyperparams& hp) {
    return json{{"replay_capacity", hp.replay_capacity},
                {"batch_size", hp.batch_size},
                {"optimizer", hp.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
                {"learning_rate", hp.learning_rate},
                {"epsilon_start", hp.epsilon_start},
                {"epsilon_floor", hp.epsilon_floor},
                {"epsilon_decay_fraction", hp.epsilon_decay_fraction}};
}

inline json to_json(const SimulationConfig& cfg) {
    return json{{"topology", to_json(cfg.topology)},
                {"supervision_rate", cfg.supervision_rate},
                {"rounds", cfg.rounds},
                {"game", to_json(cfg.game)},
                {"agent", to_json(cfg.agent)},
                {"master_seed", cfg.master_seed},
                {"metric_window", cfg.metric_window},
                {"record_timeseries", cfg.record_timeseries}};
}

inline json to_json(const SweepSpec& spec) {
    json cells = json::array();
    for (const auto& c : spec.cells) {
        cells.push_back(json{{"topology", to_json(c.topology)},
                             {"supervision_rate", c.supervision_rate}});
    }
    return json{{"experiment_id", spec.experiment_id}, {"cells", cells},
                {"repetitions", spec.repetitions},    {"rounds", spec.rounds},
                {"game", to_json(spec.game)},         {"agent", to_json(spec.agent)},
                {"master_seed", spec.master_seed},    {"metric_window", spec.metric_window}};
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config file " + path + " is not valid JSON: " + e.what());
    }
}

} // namespace netcomm
