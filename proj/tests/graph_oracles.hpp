#pragma once

// Brute-force graph oracles used by the unit and acceptance suites. These
// work by explicit path enumeration and stay independent of the library's
// moralization / reachability-set implementations.

#include <set>
#include <vector>

#include "shapdag/graph.hpp"
#include "shapdag/rng.hpp"

namespace shapdag::oracles {

struct PathStep {
    int node;
    bool arrow_into;  // the edge used to arrive points into this node
};

using Path = std::vector<PathStep>;

inline void enumerate_paths(const Dag& g, int current, int target,
                            std::vector<PathStep>& trail, std::vector<bool>& used,
                            std::vector<Path>& out) {
    if (current == target) {
        out.push_back(trail);
        return;
    }
    const int p = static_cast<int>(g.nodes.size());
    for (int next = 0; next < p; ++next) {
        if (used[next]) continue;
        const bool forward = g.has_edge(current, next);
        const bool backward = g.has_edge(next, current);
        for (int dir = 0; dir < 2; ++dir) {
            if ((dir == 0 && !forward) || (dir == 1 && !backward)) continue;
            used[next] = true;
            trail.push_back({next, dir == 0});
            enumerate_paths(g, next, target, trail, used, out);
            trail.pop_back();
            used[next] = false;
        }
    }
}

/// All simple mixed-direction paths between a and b.
inline std::vector<Path> all_paths(const Dag& g, int a, int b) {
    std::vector<Path> out;
    std::vector<PathStep> trail{{a, false}};
    std::vector<bool> used(g.nodes.size(), false);
    used[a] = true;
    enumerate_paths(g, a, b, trail, used, out);
    return out;
}

inline bool reaches_directed(const Dag& g, int from, int to) {
    for (const auto& path : all_paths(g, from, to)) {
        bool all_forward = true;
        for (std::size_t s = 1; s < path.size(); ++s) {
            if (!path[s].arrow_into) all_forward = false;
        }
        if (all_forward) return true;
    }
    return false;
}

inline bool path_blocked(const Dag& g, const Path& path, const std::set<int>& z) {
    for (std::size_t s = 1; s + 1 < path.size(); ++s) {
        // Collider at s: the arriving edge points into s and the departing
        // edge (toward s+1) also points into s, i.e. it is traversed against
        // its arrow so path[s+1].arrow_into is false.
        const bool is_collider = path[s].arrow_into && !path[s + 1].arrow_into;
        if (is_collider) {
            bool opened = z.count(path[s].node) > 0;
            if (!opened) {
                for (int zv : z) {
                    if (reaches_directed(g, path[s].node, zv)) opened = true;
                }
            }
            if (!opened) return true;
        } else {
            if (z.count(path[s].node)) return true;
        }
    }
    return false;
}

inline bool dsep_oracle(const Dag& g, int a, int b, const std::set<int>& z) {
    for (const auto& path : all_paths(g, a, b)) {
        if (!path_blocked(g, path, z)) return false;
    }
    return true;
}

inline bool valid_adjustment_oracle(const Dag& truth, int cause, int effect,
                                    const std::set<int>& z) {
    std::set<int> causal_nodes;
    for (const auto& path : all_paths(truth, cause, effect)) {
        bool all_forward = true;
        for (std::size_t s = 1; s < path.size(); ++s) {
            if (!path[s].arrow_into) all_forward = false;
        }
        if (!all_forward) continue;
        for (std::size_t s = 1; s < path.size(); ++s) causal_nodes.insert(path[s].node);
    }
    std::set<int> forbidden = causal_nodes;
    for (int w : causal_nodes) {
        for (std::size_t v = 0; v < truth.nodes.size(); ++v) {
            if (static_cast<int>(v) != w && reaches_directed(truth, w, static_cast<int>(v))) {
                forbidden.insert(static_cast<int>(v));
            }
        }
    }
    for (int zv : z) {
        if (forbidden.count(zv)) return false;
    }
    for (const auto& path : all_paths(truth, cause, effect)) {
        bool all_forward = true;
        for (std::size_t s = 1; s < path.size(); ++s) {
            if (!path[s].arrow_into) all_forward = false;
        }
        if (all_forward) continue;
        if (!path_blocked(truth, path, z)) return false;
    }
    return true;
}

inline long sid_oracle(const Dag& est, const Dag& truth) {
    const int p = static_cast<int>(est.nodes.size());
    long count = 0;
    for (int i = 0; i < p; ++i) {
        std::set<int> pa;
        for (int parent : est.parents(i)) pa.insert(parent);
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            if (pa.count(j)) {
                if (reaches_directed(truth, i, j)) ++count;
                continue;
            }
            if (!valid_adjustment_oracle(truth, i, j, pa)) ++count;
        }
    }
    return count;
}

/// Brute-force pairwise state comparison.
inline long shd_oracle(const Dag& a, const Dag& b) {
    long dist = 0;
    const int p = static_cast<int>(a.nodes.size());
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const int a_state = a.has_edge(i, j) ? 1 : (a.has_edge(j, i) ? 2 : 0);
            const int b_state = b.has_edge(i, j) ? 1 : (b.has_edge(j, i) ? 2 : 0);
            if (a_state != b_state) ++dist;
        }
    }
    return dist;
}

struct ConfusionOracle {
    long tp = 0, fp = 0, fn = 0;
};

/// Ordered-pair recount of the directional confusion convention.
inline ConfusionOracle confusion_oracle(const Dag& est, const Dag& truth) {
    ConfusionOracle c;
    const int p = static_cast<int>(est.nodes.size());
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            const bool e = est.has_edge(i, j);
            const bool t = truth.has_edge(i, j);
            if (e && t) ++c.tp;
            if (e && !t) ++c.fp;
            if (!e && t) ++c.fn;
        }
    }
    return c;
}

/// All 25 DAGs over 3 labeled nodes.
inline std::vector<Dag> all_three_node_dags() {
    const std::vector<std::string> nodes{"a", "b", "c"};
    const std::pair<int, int> pairs[] = {{0, 1}, {0, 2}, {1, 2}};
    std::vector<Dag> out;
    for (int mask = 0; mask < 27; ++mask) {
        int m = mask;
        std::set<std::pair<int, int>> edges;
        for (const auto& [i, j] : pairs) {
            const int state = m % 3;
            m /= 3;
            if (state == 1) edges.insert({i, j});
            if (state == 2) edges.insert({j, i});
        }
        Dag g;
        g.nodes = nodes;
        g.edges = edges;
        if (is_acyclic(g)) out.push_back(std::move(g));
    }
    return out;
}

inline Dag random_dag(int p, Rng& rng, double edge_prob) {
    std::vector<int> order(p);
    for (int i = 0; i < p; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::set<std::pair<int, int>> edges;
    for (int a = 0; a < p; ++a) {
        for (int b = a + 1; b < p; ++b) {
            if (unit(rng) < edge_prob) edges.insert({order[a], order[b]});
        }
    }
    std::vector<std::string> nodes;
    for (int i = 0; i < p; ++i) nodes.push_back(std::string(1, static_cast<char>('a' + i)));
    return make_dag(nodes, std::move(edges));
}

}  // namespace shapdag::oracles
