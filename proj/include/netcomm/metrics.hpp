// Information-theoretic analysis of logged behavior. All distributions are
// estimated empirically from per-agent, per-role 4x4 (message, action) count
// tables; logarithms are base 2 so every Jensen-Shannon divergence lies in
// [0,1] and consistency is a normalized mutual information in [0,1].
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netcomm/game.hpp"

namespace netcomm {

using Distribution = std::array<double, 4>;

inline constexpr Distribution kUniform4{0.25, 0.25, 0.25, 0.25};

// One logged game round, the unit of all metric estimation.
struct EpisodeRecord {
    long round = 0;
    std::int16_t speaker_id = -1;
    std::int16_t listener_id = -1;
    std::int8_t message = -1;       // symbol the speaker sent
    std::int8_t message_heard = -1; // symbol the listener observed (differs only under ablation)
    std::int8_t speaker_action = -1;
    std::int8_t listener_action = -1;
    bool speaker_supervised = false;
    bool listener_supervised = false;
    double speaker_reward = 0.0;
    double listener_reward = 0.0;
};

// Per-agent, per-role joint counts over (message, action).
struct RoleContingency {
    int agent_id = -1;
    Role role = Role::Speaker;
    std::array<std::array<long, 4>, 4> counts{}; // [message][action]
    long total = 0;

    void add(int message, int action) {
        ++counts[static_cast<std::size_t>(message)][static_cast<std::size_t>(action)];
        ++total;
    }

    Distribution message_marginal() const {
        Distribution p{};
        for (int m = 0; m < 4; ++m) {
            long row = 0;
            for (int a = 0; a < 4; ++a) row += counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)];
            p[static_cast<std::size_t>(m)] = static_cast<double>(row) / static_cast<double>(total);
        }
        return p;
    }

    Distribution action_marginal() const {
        Distribution p{};
        for (int a = 0; a < 4; ++a) {
            long col = 0;
            for (int m = 0; m < 4; ++m) col += counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)];
            p[static_cast<std::size_t>(a)] = static_cast<double>(col) / static_cast<double>(total);
        }
        return p;
    }

    // p(action | message = m); uniform when the message was never observed.
    Distribution conditional_actions(int m) const {
        long row = 0;
        for (int a = 0; a < 4; ++a) row += counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)];
        if (row == 0) return kUniform4;
        Distribution p{};
        for (int a = 0; a < 4; ++a) {
            p[static_cast<std::size_t>(a)] =
                static_cast<double>(counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)]) /
                static_cast<double>(row);
        }
        return p;
    }
};

// Shannon entropy in bits, with 0 log 0 := 0.
inline double entropy(const Distribution& p) {
    double h = 0.0;
    for (double x : p) {
        if (x > 0.0) h -= x * std::log2(x);
    }
    return h < 0.0 ? 0.0 : h;
}

// Jensen-Shannon divergence with base-2 logs, in [0,1]. Computed as
// 0.5 KL(p||m) + 0.5 KL(q||m) with m the midpoint mixture.
inline double jsd(const Distribution& p, const Distribution& q) {
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) d += 0.5 * p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) d += 0.5 * q[i] * std::log2(q[i] / m);
    }
    if (d < 0.0) return 0.0;
    return d > 1.0 ? 1.0 : d;
}

// Normalized mutual information between messages and actions: MI / Z with
// Z the average entropy of the two marginals. Degenerate single-symbol
// tables (Z = 0) score 0 by convention.
inline double consistency(const RoleContingency& c) {
    if (c.total == 0) {
        throw std::runtime_error("consistency undefined: empty contingency table (agent " +
                                 std::to_string(c.agent_id) + ")");
    }
    const Distribution pm = c.message_marginal();
    const Distribution pa = c.action_marginal();
    const double z = 0.5 * (entropy(pa) + entropy(pm));
    if (z == 0.0) return 0.0;
    const double total = static_cast<double>(c.total);
    double mi = 0.0;
    for (std::size_t m = 0; m < 4; ++m) {
        for (std::size_t a = 0; a < 4; ++a) {
            const long n = c.counts[m][a];
            if (n == 0) continue;
            const double joint = static_cast<double>(n) / total;
            mi += joint * std::log2(joint / (pm[m] * pa[a]));
        }
    }
    if (mi < 0.0) mi = 0.0;
    const double value = mi / z;
    return value > 1.0 ? 1.0 : value;
}

// All tables for one analysis window, indexed by agent id.
struct ContingencySet {
    std::vector<RoleContingency> speaker;
    std::vector<RoleContingency> listener;
    double avg_reward = 0.0;
    long first_round = 0;
    long last_round = 0;
    long n_episodes = 0;
    std::vector<int> idle_agents; // zero episodes in the window; excluded from averages
};

// Fill per-agent per-role tables from the episodes whose round lies in
// [first_round, last_round]. The speaker table is keyed by the message sent,
// the listener table by the message heard. avg_reward averages both per-agent
// rewards of every episode in the window.
inline ContingencySet accumulate(const std::vector<EpisodeRecord>& log, int n_agents,
                                 long first_round, long last_round) {
    if (first_round > last_round) {
        throw std::invalid_argument("accumulate: empty round window");
    }
    ContingencySet set;
    set.first_round = first_round;
    set.last_round = last_round;
    set.speaker.resize(static_cast<std::size_t>(n_agents));
    set.listener.resize(static_cast<std::size_t>(n_agents));
    for (int i = 0; i < n_agents; ++i) {
        set.speaker[static_cast<std::size_t>(i)].agent_id = i;
        set.speaker[static_cast<std::size_t>(i)].role = Role::Speaker;
        set.listener[static_cast<std::size_t>(i)].agent_id = i;
        set.listener[static_cast<std::size_t>(i)].role = Role::Listener;
    }
    double reward_sum = 0.0;
    for (const auto& ep : log) {
        if (ep.round < first_round || ep.round > last_round) continue;
        set.speaker[static_cast<std::size_t>(ep.speaker_id)].add(ep.message, ep.speaker_action);
        set.listener[static_cast<std::size_t>(ep.listener_id)].add(ep.message_heard, ep.listener_action);
        reward_sum += ep.speaker_reward + ep.listener_reward;
        ++set.n_episodes;
    }
    if (set.n_episodes == 0) {
        throw std::runtime_error("accumulate: no episodes in window [" +
                                 std::to_string(first_round) + ", " +
                                 std::to_string(last_round) + "]");
    }
    set.avg_reward = reward_sum / (2.0 * static_cast<double>(set.n_episodes));
    for (int i = 0; i < n_agents; ++i) {
        if (set.speaker[static_cast<std::size_t>(i)].total == 0 &&
            set.listener[static_cast<std::size_t>(i)].total == 0) {
            set.idle_agents.push_back(i);
        }
    }
    return set;
}

namespace detail {

inline bool usable(const RoleContingency& t) { return t.total > 0; }

// Mean per-message JSD between two tables' conditional action distributions.
inline double mapping_divergence(const RoleContingency& a, const RoleContingency& b) {
    double sum = 0.0;
    for (int m = 0; m < kNumMessages; ++m) {
        sum += jsd(a.conditional_actions(m), b.conditional_actions(m));
    }
    return sum / kNumMessages;
}

inline RoleContingency pool_roles(const RoleContingency& s, const RoleContingency& l) {
    RoleContingency pooled = s;
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t a = 0; a < 4; ++a) pooled.counts[m][a] += l.counts[m][a];
    pooled.total += l.total;
    return pooled;
}

} // namespace detail

// Average per-message JSD between the conditional action distributions of
// every unordered agent pair, computed per role and then averaged. With
// pooled_roles set, each agent's speaker and listener observations are merged
// into one conditional first (sensitivity variant).
inline double between_agent_divergence(const ContingencySet& set, bool pooled_roles = false) {
    const int n = static_cast<int>(set.speaker.size());
    if (n < 2) throw std::invalid_argument("between_agent_divergence needs >= 2 agents");
    double sum = 0.0;
    long terms = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (pooled_roles) {
                const auto ti = detail::pool_roles(set.speaker[static_cast<std::size_t>(i)],
                                                   set.listener[static_cast<std::size_t>(i)]);
                const auto tj = detail::pool_roles(set.speaker[static_cast<std::size_t>(j)],
                                                   set.listener[static_cast<std::size_t>(j)]);
                if (!detail::usable(ti) || !detail::usable(tj)) continue;
                sum += detail::mapping_divergence(ti, tj);
                ++terms;
            } else {
                for (Role role : {Role::Speaker, Role::Listener}) {
                    const auto& tables = (role == Role::Speaker) ? set.speaker : set.listener;
                    const auto& ti = tables[static_cast<std::size_t>(i)];
                    const auto& tj = tables[static_cast<std::size_t>(j)];
                    if (!detail::usable(ti) || !detail::usable(tj)) continue;
                    sum += detail::mapping_divergence(ti, tj);
                    ++terms;
                }
            }
        }
    }
    if (terms == 0) throw std::runtime_error("between_agent_divergence: no usable agent pairs");
    return sum / static_cast<double>(terms);
}

// Per agent, the mean per-message JSD between its speaker-role and
// listener-role conditional action distributions; averaged over agents.
inline double within_agent_divergence(const ContingencySet& set) {
    double sum = 0.0;
    long terms = 0;
    for (std::size_t i = 0; i < set.speaker.size(); ++i) {
        if (!detail::usable(set.speaker[i]) || !detail::usable(set.listener[i])) continue;
        sum += detail::mapping_divergence(set.speaker[i], set.listener[i]);
        ++terms;
    }
    if (terms == 0) throw std::runtime_error("within_agent_divergence: no agent has both role tables");
    return sum / static_cast<double>(terms);
}

// Average pairwise JSD between agents' marginal message distributions in the
// speaker role.
inline double signaling_divergence(const ContingencySet& set) {
    std::vector<Distribution> marginals;
    for (const auto& t : set.speaker) {
        if (detail::usable(t)) marginals.push_back(t.message_marginal());
    }
    if (marginals.size() < 2) {
        throw std::invalid_argument("signaling_divergence needs >= 2 agents with speaker data");
    }
    double sum = 0.0;
    long terms = 0;
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        for (std::size_t j = i + 1; j < marginals.size(); ++j) {
            sum += jsd(marginals[i], marginals[j]);
            ++terms;
        }
    }
    return sum / static_cast<double>(terms);
}

// JSD between each agent's marginal behavior and the uniform distribution,
// averaged over agents: actions pooled over both roles, messages from the
// speaker role. Higher means more repetitive behavior.
inline std::pair<double, double> behavioral_predictability(const ContingencySet& set) {
    double action_sum = 0.0, message_sum = 0.0;
    long action_terms = 0, message_terms = 0;
    for (std::size_t i = 0; i < set.speaker.size(); ++i) {
        const auto& s = set.speaker[i];
        const auto& l = set.listener[i];
        const long pooled_total = s.total + l.total;
        if (pooled_total > 0) {
            Distribution actions{};
            for (int a = 0; a < 4; ++a) {
                long n = 0;
                for (int m = 0; m < 4; ++m) {
                    n += s.counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)] +
                         l.counts[static_cast<std::size_t>(m)][static_cast<std::size_t>(a)];
                }
                actions[static_cast<std::size_t>(a)] =
                    static_cast<double>(n) / static_cast<double>(pooled_total);
            }
            action_sum += jsd(actions, kUniform4);
            ++action_terms;
        }
        if (detail::usable(s)) {
            message_sum += jsd(s.message_marginal(), kUniform4);
            ++message_terms;
        }
    }
    if (action_terms == 0 || message_terms == 0) {
        throw std::runtime_error("behavioral_predictability: no usable tables");
    }
    return {action_sum / static_cast<double>(action_terms),
            message_sum / static_cast<double>(message_terms)};
}

struct MetricsReport {
    double speaking_consistency = 0.0;
    double listening_consistency = 0.0;
    double between_agent_divergence = 0.0;
    double within_agent_divergence = 0.0;
    double signaling_divergence = 0.0;
    double action_predictability = 0.0;
    double message_predictability = 0.0;
    double avg_reward = 0.0;
    long first_round = 0;
    long last_round = 0;
};

// The full metric suite over one accumulated window. Agents whose table for
// a given role is empty are skipped in the averages that need it.
inline MetricsReport compute_report(const ContingencySet& set) {
    MetricsReport rep;
    double spk_sum = 0.0, lis_sum = 0.0;
    long spk_n = 0, lis_n = 0;
    for (const auto& t : set.speaker) {
        if (detail::usable(t)) { spk_sum += consistency(t); ++spk_n; }
    }
    for (const auto& t : set.listener) {
        if (detail::usable(t)) { lis_sum += consistency(t); ++lis_n; }
    }
    if (spk_n == 0 || lis_n == 0) throw std::runtime_error("compute_report: no usable tables");
    rep.speaking_consistency = spk_sum / static_cast<double>(spk_n);
    rep.listening_consistency = lis_sum / static_cast<double>(lis_n);
    rep.between_agent_divergence = between_agent_divergence(set);
    rep.within_agent_divergence = within_agent_divergence(set);
    rep.signaling_divergence = signaling_divergence(set);
    const auto [ap, mp] = behavioral_predictability(set);
    rep.action_predictability = ap;
    rep.message_predictability = mp;
    rep.avg_reward = set.avg_reward;
    rep.first_round = set.first_round;
    rep.last_round = set.last_round;
    return rep;
}

} // namespace netcomm
