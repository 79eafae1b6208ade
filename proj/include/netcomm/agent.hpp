// Agent policy and learning: input encoding, epsilon-greedy selection over
// both output heads, FIFO replay memory with supervised-feedback
// substitution, and one-step-terminal Q-learning updates.
//
// Episodes are terminal after one step, so the TD target is the observed
// reward itself; experiences carry no next state.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netcomm/game.hpp"
#include "netcomm/neuralnet.hpp"
#include "netcomm/rng.hpp"

namespace netcomm {

enum class ExperienceKind { Reinforcement, Supervising };

struct Experience {
    InputVector input{};
    Role role = Role::Speaker;
    std::uint8_t action_taken = 0;
    std::uint8_t message = 0; // sent if speaker, received if listener
    double reward = 0.0;
    ExperienceKind kind = ExperienceKind::Reinforcement;
    // Partner's peeked action; meaningful exactly when kind == Supervising.
    std::int8_t supervised_target_action = -1;
};

// Bounded FIFO ring. Sampling is uniform without replacement within a
// minibatch (Floyd's algorithm over storage slots).
class ReplayBuffer {
public:
    ReplayBuffer() : ReplayBuffer(2000) {}
    explicit ReplayBuffer(int capacity) : capacity_(capacity) {
        if (capacity < 1) throw std::invalid_argument("replay capacity must be >= 1");
        storage_.reserve(static_cast<std::size_t>(capacity));
    }

    int size() const { return static_cast<int>(storage_.size()); }
    int capacity() const { return capacity_; }

    void push(Experience e) {
        if (size() < capacity_) {
            storage_.push_back(std::move(e));
        } else {
            storage_[oldest_] = std::move(e);
            oldest_ = (oldest_ + 1) % static_cast<std::size_t>(capacity_);
        }
    }

    // Storage-slot access; uniform sampling over slots is uniform over entries.
    const Experience& operator[](int slot) const {
        return storage_[static_cast<std::size_t>(slot)];
    }

    // i-th entry in insertion order, 0 = oldest surviving.
    const Experience& at_logical(int i) const {
        if (size() < capacity_) return storage_[static_cast<std::size_t>(i)];
        return storage_[(oldest_ + static_cast<std::size_t>(i)) %
                        static_cast<std::size_t>(capacity_)];
    }

    void sample_indices(int k, RngStream& rng, std::vector<int>& out) const {
        out.clear();
        const int n = size();
        for (int j = n - k; j < n; ++j) {
            const int t = rng.uniform_int(j + 1);
            bool taken = false;
            for (int s : out) {
                if (s == t) { taken = true; break; }
            }
            out.push_back(taken ? j : t);
        }
    }

private:
    int capacity_;
    std::vector<Experience> storage_;
    std::size_t oldest_ = 0;
};

struct AgentHyperparams {
    int replay_capacity = 2000;
    int batch_size = 32;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 1e-3;
    double epsilon_start = 1.0;
    double epsilon_floor = 0.05;
    double epsilon_decay_fraction = 0.2;

    void validate() const {
        if (replay_capacity < 1) throw std::invalid_argument("agent.replay_capacity must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("agent.batch_size must be >= 1");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("agent.learning_rate must be > 0");
        if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0) ||
            !(epsilon_floor >= 0.0 && epsilon_floor <= 1.0)) {
            throw std::invalid_argument("agent epsilon bounds must be in [0,1]");
        }
        if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
            throw std::invalid_argument("agent.epsilon_decay_fraction must be in (0,1]");
        }
    }
};

struct AgentState {
    int id = -1;
    Mlp net;
    OptimizerState opt;
    ReplayBuffer replay;
    ActionHistory history;
    double epsilon = 1.0;
    // Regression target for supervised (peeked) experiences; the game's R_c.
    double supervised_target = 1.0;
    RngStream rng;        // exploration, speaker noise, supervision draws
    RngStream replay_rng; // minibatch sampling

    // scratch for train_step, kept here to avoid per-step allocation
    std::vector<double> grad_scratch;
    std::vector<int> batch_scratch;
};

inline AgentState make_agent(int id, const GameConfig& game, const AgentHyperparams& hp,
                             RngStream init_rng, RngStream act_rng, RngStream replay_rng) {
    hp.validate();
    game.validate();
    AgentState a;
    a.id = id;
    a.net = init_mlp(kInputDim, init_rng);
    a.opt.algorithm = hp.optimizer;
    a.opt.learning_rate = hp.learning_rate;
    a.replay = ReplayBuffer(hp.replay_capacity);
    a.history = ActionHistory(game.history_length);
    a.epsilon = hp.epsilon_start;
    a.supervised_target = game.coordination_reward;
    a.rng = act_rng;
    a.replay_rng = replay_rng;
    a.grad_scratch.assign(a.net.size(), 0.0);
    return a;
}

// [role_bit | message slot (one-hot or speaker noise) | own action proportions]
inline InputVector build_input(Role role, const std::array<double, kNumMessages>& message_or_noise,
                               const std::array<double, kNumActions>& p_hat) {
    InputVector x{};
    x[0] = (role == Role::Speaker) ? 1.0 : 0.0;
    for (int i = 0; i < kNumMessages; ++i) x[static_cast<std::size_t>(1 + i)] = message_or_noise[static_cast<std::size_t>(i)];
    for (int i = 0; i < kNumActions; ++i) x[static_cast<std::size_t>(1 + kNumMessages + i)] = p_hat[static_cast<std::size_t>(i)];
    return x;
}

// Argmax with ties broken toward the lowest index.
inline int argmax4(const std::array<double, kHeadWidth>& q) {
    int best = 0;
    for (int u = 1; u < kHeadWidth; ++u) {
        if (q[static_cast<std::size_t>(u)] > q[static_cast<std::size_t>(best)]) best = u;
    }
    return best;
}

// Epsilon-greedy over the action head; speakers draw a message by the same
// rule with an independent exploration draw. Listeners return message -1
// (their message head is ignored).
inline std::pair<int, int> select_outputs(const AgentState& agent, const InputVector& input,
                                          Role role, RngStream& rng) {
    ForwardCache fc;
    forward_cached(agent.net, input.data(), fc);
    int action;
    if (rng.uniform01() < agent.epsilon) {
        action = rng.uniform_int(kNumActions);
    } else {
        action = argmax4(fc.out.action_q);
    }
    int message = -1;
    if (role == Role::Speaker) {
        if (rng.uniform01() < agent.epsilon) {
            message = rng.uniform_int(kNumMessages);
        } else {
            message = argmax4(fc.out.message_q);
        }
    }
    return {action, message};
}

// Store this agent's experience of an episode. Miscoordinated episodes are
// substituted (not duplicated) by a supervising experience with probability
// s, carrying the partner's peeked action; coordinated episodes are always
// stored as plain reinforcement. Returns whether the entry was supervised.
inline bool record_and_supervise(AgentState& agent, const EpisodeOutcome& outcome,
                                 const InputVector& own_input, double supervision_rate,
                                 RngStream& rng) {
    if (!(supervision_rate >= 0.0 && supervision_rate <= 1.0)) {
        throw std::invalid_argument("supervision_rate must be in [0,1]");
    }
    const bool is_speaker = (outcome.speaker_id == agent.id);
    if (!is_speaker && outcome.listener_id != agent.id) {
        throw std::invalid_argument("record_and_supervise: agent did not play this episode");
    }

    Experience e;
    e.input = own_input;
    e.role = is_speaker ? Role::Speaker : Role::Listener;
    e.action_taken = static_cast<std::uint8_t>(is_speaker ? outcome.speaker_action
                                                          : outcome.listener_action);
    if (is_speaker) {
        e.message = static_cast<std::uint8_t>(outcome.message);
    } else {
        // The symbol this listener actually heard is whatever its input
        // one-hot encodes (differs from outcome.message under ablation).
        int heard = 0;
        for (int m = 0; m < kNumMessages; ++m) {
            if (own_input[static_cast<std::size_t>(1 + m)] == 1.0) heard = m;
        }
        e.message = static_cast<std::uint8_t>(heard);
    }
    e.reward = is_speaker ? outcome.speaker_reward : outcome.listener_reward;

    bool supervised = false;
    if (!outcome.coordinated && rng.bernoulli(supervision_rate)) {
        supervised = true;
        e.kind = ExperienceKind::Supervising;
        e.supervised_target_action = static_cast<std::int8_t>(
            is_speaker ? outcome.listener_action : outcome.speaker_action);
    }
    agent.replay.push(std::move(e));
    return supervised;
}

// One minibatch Q-update. Reinforcement entries regress the chosen unit's
// value toward the observed reward; supervising entries regress the peeked
// action's value toward the coordination reward. Speakers additionally train
// the message head on the message they actually sent, with the same target.
// Gradients are summed over the batch into a single optimizer step. Returns
// the mean squared error over all trained units; no-op below batch_size.
inline double train_step(AgentState& agent, int batch_size) {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (agent.replay.size() < batch_size) return 0.0;

    agent.replay.sample_indices(batch_size, agent.replay_rng, agent.batch_scratch);
    auto& grads = agent.grad_scratch;
    std::fill(grads.begin(), grads.end(), 0.0);

    double sq_err_sum = 0.0;
    int n_targets = 0;
    ForwardCache fc;
    for (const int slot : agent.batch_scratch) {
        const Experience& e = agent.replay[slot];
        forward_cached(agent.net, e.input.data(), fc);

        const bool supervising = (e.kind == ExperienceKind::Supervising);
        const int action_unit = supervising ? e.supervised_target_action : e.action_taken;
        const double target = supervising ? agent.supervised_target : e.reward;

        const double qa = fc.out.action_q[static_cast<std::size_t>(action_unit)];
        const double res_a = qa - target;
        backward_unit(agent.net, e.input.data(), fc, Head::Action, action_unit,
                      2.0 * res_a, grads);
        sq_err_sum += res_a * res_a;
        ++n_targets;

        if (e.role == Role::Speaker) {
            const double qm = fc.out.message_q[static_cast<std::size_t>(e.message)];
            const double res_m = qm - target;
            backward_unit(agent.net, e.input.data(), fc, Head::Message, e.message,
                          2.0 * res_m, grads);
            sq_err_sum += res_m * res_m;
            ++n_targets;
        }
    }

    const double loss = sq_err_sum / n_targets;
    if (!std::isfinite(loss)) {
        throw std::runtime_error("train_step: non-finite loss for agent " +
                                 std::to_string(agent.id));
    }
    step(agent.net, agent.opt, grads);
    return loss;
}

// Linear decay from epsilon_start to epsilon_floor over the first
// decay_fraction of rounds, constant afterwards.
inline double epsilon_schedule(long round, long total_rounds, double epsilon_start = 1.0,
                               double epsilon_floor = 0.05, double decay_fraction = 0.2) {
    if (round < 0 || round > total_rounds) {
        throw std::invalid_argument("epsilon_schedule: round out of [0, total_rounds]");
    }
    const double decay_rounds = decay_fraction * static_cast<double>(total_rounds);
    if (decay_rounds <= 0.0 || static_cast<double>(round) >= decay_rounds) return epsilon_floor;
    return epsilon_start +
           (epsilon_floor - epsilon_start) * (static_cast<double>(round) / decay_rounds);
}

} // namespace netcomm
