// Social network generation, statistics, and neighbor-constrained pair
// sampling. Four generators: ring, clique, Erdos-Renyi random, small-world
// (ring plus random global shortcuts). Networks are undirected simple graphs
// with no self-loops and no isolated nodes.
#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netcomm/rng.hpp"

namespace netcomm {

enum class TopologyKind { Ring, Clique, Random, SmallWorld };

inline std::string to_string(TopologyKind k) {
    switch (k) {
        case TopologyKind::Ring: return "ring";
        case TopologyKind::Clique: return "clique";
        case TopologyKind::Random: return "random";
        case TopologyKind::SmallWorld: return "small_world";
    }
    return "unknown";
}

inline TopologyKind topology_kind_from_string(const std::string& s) {
    if (s == "ring") return TopologyKind::Ring;
    if (s == "clique") return TopologyKind::Clique;
    if (s == "random") return TopologyKind::Random;
    if (s == "small_world") return TopologyKind::SmallWorld;
    throw std::invalid_argument("unknown topology kind: \"" + s + "\"");
}

struct TopologySpec {
    TopologyKind kind = TopologyKind::Ring;
    int n_agents = 10;
    // Connection probability for Random, shortcut probability for SmallWorld.
    // Ignored for Ring and Clique.
    double param = 0.0;

    void validate() const {
        if (n_agents < 3) {
            throw std::invalid_argument("topology.n_agents must be >= 3, got " +
                                        std::to_string(n_agents));
        }
        if (!(param >= 0.0 && param <= 1.0)) {
            throw std::invalid_argument("topology.param must be in [0,1], got " +
                                        std::to_string(param));
        }
    }
};

// Undirected simple graph over agent indices 0..n-1. Edges are stored once
// as (i, j) with i < j; adjacency lists are derived and kept sorted.
struct SocialNetwork {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adjacency;

    bool has_edge(int i, int j) const {
        if (i == j) return false;
        const auto& nb = adjacency[static_cast<std::size_t>(i)];
        return std::binary_search(nb.begin(), nb.end(), j);
    }

    int degree(int i) const {
        return static_cast<int>(adjacency[static_cast<std::size_t>(i)].size());
    }
};

struct GraphStats {
    double avg_degree = 0.0;
    double degree_variance = 0.0;
    int n_global_edges = 0; // edges joining nodes further than one ring-step apart
    bool connected = false;
};

namespace detail {

inline SocialNetwork finalize_network(int n, std::vector<std::pair<int, int>> edges) {
    SocialNetwork net;
    net.n = n;
    for (auto& [i, j] : edges) {
        if (i > j) std::swap(i, j);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    net.edges = std::move(edges);
    net.adjacency.assign(static_cast<std::size_t>(n), {});
    for (const auto& [i, j] : net.edges) {
        if (i == j) throw std::logic_error("self-loop in generated network");
        net.adjacency[static_cast<std::size_t>(i)].push_back(j);
        net.adjacency[static_cast<std::size_t>(j)].push_back(i);
    }
    for (auto& nb : net.adjacency) {
        std::sort(nb.begin(), nb.end());
        if (nb.empty()) throw std::logic_error("isolated node in generated network");
    }
    return net;
}

inline std::vector<std::pair<int, int>> ring_edges(int n) {
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int j = (i + 1) % n;
        edges.emplace_back(std::min(i, j), std::max(i, j));
    }
    return edges;
}

} // namespace detail

// Generate a network from a spec. Deterministic given the rng stream state.
//
// Ring:       node i connects to i+-1 (mod n).
// Clique:     all pairs.
// Random:     each pair independently with probability `param`; samples with
//             an isolated node are rejected and redrawn.
// SmallWorld: ring edges plus, for each node independently with probability
//             `param`, one proposed shortcut to a node drawn uniformly from
//             all n nodes; proposals that hit the node itself or an existing
//             edge are dropped without a retry.
inline SocialNetwork generate(const TopologySpec& spec, RngStream& rng) {
    spec.validate();
    const int n = spec.n_agents;

    switch (spec.kind) {
        case TopologyKind::Ring:
            return detail::finalize_network(n, detail::ring_edges(n));

        case TopologyKind::Clique: {
            std::vector<std::pair<int, int>> edges;
            edges.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
            return detail::finalize_network(n, std::move(edges));
        }

        case TopologyKind::Random: {
            constexpr int kMaxRejections = 10000;
            for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
                std::vector<std::pair<int, int>> edges;
                std::vector<int> degree(static_cast<std::size_t>(n), 0);
                for (int i = 0; i < n; ++i) {
                    for (int j = i + 1; j < n; ++j) {
                        if (rng.bernoulli(spec.param)) {
                            edges.emplace_back(i, j);
                            ++degree[static_cast<std::size_t>(i)];
                            ++degree[static_cast<std::size_t>(j)];
                        }
                    }
                }
                if (std::all_of(degree.begin(), degree.end(),
                                [](int d) { return d >= 1; })) {
                    return detail::finalize_network(n, std::move(edges));
                }
            }
            throw std::runtime_error(
                "degenerate generator parameters: random graph sampling rejected "
                "10000 times (param=" + std::to_string(spec.param) + ")");
        }

        case TopologyKind::SmallWorld: {
            auto edges = detail::ring_edges(n);
            auto present = [&edges](int a, int b) {
                const auto e = std::make_pair(std::min(a, b), std::max(a, b));
                return std::find(edges.begin(), edges.end(), e) != edges.end();
            };
            for (int i = 0; i < n; ++i) {
                if (!rng.bernoulli(spec.param)) continue;
                const int target = rng.uniform_int(n);
                if (target == i || present(i, target)) continue;
                edges.emplace_back(std::min(i, target), std::max(i, target));
            }
            return detail::finalize_network(n, std::move(edges));
        }
    }
    throw std::logic_error("unreachable topology kind");
}

// Ring distance in the canonical node order: min(|i-j|, n-|i-j|). Global
// classification uses this order for every topology kind.
inline int ring_distance(int i, int j, int n) {
    const int d = std::abs(i - j);
    return std::min(d, n - d);
}

inline GraphStats graph_stats(const SocialNetwork& net) {
    GraphStats stats;
    const int n = net.n;
    stats.avg_degree = 2.0 * static_cast<double>(net.edges.size()) / n;
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = net.degree(i) - stats.avg_degree;
        var += d * d;
    }
    stats.degree_variance = var / n;
    for (const auto& [i, j] : net.edges) {
        if (ring_distance(i, j, n) > 1) ++stats.n_global_edges;
    }
    // BFS from node 0.
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> frontier{0};
    seen[0] = 1;
    int reached = 1;
    while (!frontier.empty()) {
        const int u = frontier.back();
        frontier.pop_back();
        for (int v : net.adjacency[static_cast<std::size_t>(u)]) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++reached;
                frontier.push_back(v);
            }
        }
    }
    stats.connected = (reached == n);
    return stats;
}

// One game pairing: the first agent uniform over all nodes, its partner
// uniform over the first agent's neighbors.
inline std::pair<int, int> sample_pair(const SocialNetwork& net, RngStream& rng) {
    const int a = rng.uniform_int(net.n);
    const auto& nb = net.adjacency[static_cast<std::size_t>(a)];
    const int b = nb[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(nb.size())))];
    return {a, b};
}

// Edge-list text format: first line "n=<int>", then one "i j" pair per line, i<j.
inline void write_edge_list(const SocialNetwork& net, std::ostream& out) {
    out << "n=" << net.n << "\n";
    for (const auto& [i, j] : net.edges) out << i << " " << j << "\n";
}

inline SocialNetwork read_edge_list(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("n=", 0) != 0) {
        throw std::runtime_error("edge list must start with \"n=<int>\"");
    }
    const int n = std::stoi(line.substr(2));
    std::vector<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        if (!(ls >> i >> j)) throw std::runtime_error("malformed edge line: \"" + line + "\"");
        if (i < 0 || j < 0 || i >= n || j >= n || i >= j) {
            throw std::runtime_error("edge out of range or not i<j: \"" + line + "\"");
        }
        edges.emplace_back(i, j);
    }
    return detail::finalize_network(n, std::move(edges));
}

} // namespace netcomm
