// The two-step speaker/listener coordination episode: reward computation,
// action-diversity penalty, and per-agent action-history bookkeeping.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "netcomm/rng.hpp"

namespace netcomm {

inline constexpr int kNumActions = 4;
inline constexpr int kNumMessages = 4;

// Agent observation layout: role bit, message slot, action proportions.
inline constexpr int kInputDim = 1 + kNumMessages + kNumActions;
using InputVector = std::array<double, kInputDim>;

enum class Role { Speaker, Listener };

struct GameConfig {
    int n_actions = kNumActions;
    int n_messages = kNumMessages;
    double coordination_reward = 1.0; // R_c
    int history_length = 100;         // H
    // Channel ablation: the listener observes a uniformly random symbol
    // instead of the sent message. Used for chance-level baselines.
    bool ablate_channel = false;

    void validate() const {
        if (n_actions != kNumActions || n_messages != kNumMessages) {
            throw std::invalid_argument("game.n_actions and game.n_messages are fixed at 4");
        }
        if (!(coordination_reward > 0.0)) {
            throw std::invalid_argument("game.coordination_reward must be > 0");
        }
        if (history_length < 1) {
            throw std::invalid_argument("game.history_length must be >= 1");
        }
    }
};

// Bounded window over the agent's last <= H chosen actions with O(1)
// incremental proportions. Empty window reports uniform proportions.
class ActionHistory {
public:
    ActionHistory() : ActionHistory(100) {}
    explicit ActionHistory(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("history capacity must be >= 1");
        window_.reserve(static_cast<std::size_t>(capacity));
    }

    int size() const { return static_cast<int>(window_.size()); }
    int capacity() const { return capacity_; }

    void push(int action) {
        if (static_cast<int>(window_.size()) < capacity_) {
            window_.push_back(static_cast<std::uint8_t>(action));
            ++counts_[static_cast<std::size_t>(action)];
        } else {
            --counts_[window_[head_]];
            window_[head_] = static_cast<std::uint8_t>(action);
            ++counts_[static_cast<std::size_t>(action)];
            head_ = (head_ + 1) % static_cast<std::size_t>(capacity_);
        }
    }

    double proportion(int action) const {
        if (window_.empty()) return 1.0 / kNumActions;
        return static_cast<double>(counts_[static_cast<std::size_t>(action)]) /
               static_cast<double>(window_.size());
    }

    std::array<double, kNumActions> proportions() const {
        std::array<double, kNumActions> p{};
        for (int a = 0; a < kNumActions; ++a) p[static_cast<std::size_t>(a)] = proportion(a);
        return p;
    }

private:
    int capacity_;
    std::vector<std::uint8_t> window_;
    std::size_t head_ = 0;
    std::array<int, kNumActions> counts_{};
};

// min(0, 1/4 - p_hat_A): zero while the action is underused, increasingly
// negative once its recent share exceeds a quarter.
inline double diversity_penalty(double p_hat_a) {
    return std::min(0.0, 0.25 - p_hat_a);
}

struct EpisodeOutcome {
    int speaker_id = -1;
    int listener_id = -1;
    int message = -1;
    int speaker_action = -1;
    int listener_action = -1;
    bool coordinated = false;
    double speaker_reward = 0.0;
    double listener_reward = 0.0;
    long round = 0;
};

// What the simulation needs beyond the outcome: each agent's observed input
// (for experience storage) and the symbol the listener actually heard (equal
// to the sent message unless the channel is ablated).
struct PlayedRound {
    EpisodeOutcome outcome;
    InputVector speaker_input{};
    InputVector listener_input{};
    int message_heard = -1;
};

// One episode between two distinct agents. AgentT must provide `history`
// (ActionHistory), `rng` (RngStream), `id`, and be accepted by the free
// functions build_input and select_outputs (found via ADL at instantiation).
//
// Sequence: the speaker observes (role=1, noise, own proportions) and picks
// an action and a message; the listener observes (role=0, one-hot message,
// own proportions) and picks an action. Rewards use each agent's own
// proportions as they were before this round; histories update afterwards.
template <class AgentT>
PlayedRound play_round(AgentT& speaker, AgentT& listener, const GameConfig& cfg, long round) {
    if (&speaker == &listener) throw std::invalid_argument("play_round: speaker == listener");

    PlayedRound r;
    auto& out = r.outcome;
    out.speaker_id = speaker.id;
    out.listener_id = listener.id;
    out.round = round;

    std::array<double, kNumMessages> noise{};
    for (auto& x : noise) x = speaker.rng.uniform01();
    r.speaker_input = build_input(Role::Speaker, noise, speaker.history.proportions());
    const auto [spk_action, spk_message] =
        select_outputs(speaker, r.speaker_input, Role::Speaker, speaker.rng);
    out.speaker_action = spk_action;
    out.message = spk_message;

    std::array<double, kNumMessages> received{};
    const int heard = cfg.ablate_channel ? listener.rng.uniform_int(kNumMessages) : spk_message;
    r.message_heard = heard;
    received[static_cast<std::size_t>(heard)] = 1.0;
    r.listener_input = build_input(Role::Listener, received, listener.history.proportions());
    const auto [lis_action, lis_message] =
        select_outputs(listener, r.listener_input, Role::Listener, listener.rng);
    (void)lis_message;
    out.listener_action = lis_action;

    out.coordinated = (out.speaker_action == out.listener_action);
    const double base = out.coordinated ? cfg.coordination_reward : 0.0;
    out.speaker_reward = base + diversity_penalty(speaker.history.proportion(out.speaker_action));
    out.listener_reward = base + diversity_penalty(listener.history.proportion(out.listener_action));

    speaker.history.push(out.speaker_action);
    listener.history.push(out.listener_action);
    return r;
}

} // namespace netcomm
