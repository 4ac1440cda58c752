#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace shapdag {

/// Directed acyclic graph over named nodes. Edges are (parent, child) index
/// pairs. Acyclicity is validated by make_dag; the raw struct is also used
/// as a plain digraph container by internal algorithms.
struct Dag {
    std::vector<std::string> nodes;
    std::set<std::pair<int, int>> edges;

    bool has_edge(int from, int to) const { return edges.count({from, to}) > 0; }
    std::vector<int> parents(int node) const;
    std::vector<int> children(int node) const;
    int node_index(const std::string& name) const;  // -1 when absent
};

/// Validates no self-loops and acyclicity (topological sort succeeds).
Dag make_dag(std::vector<std::string> nodes, std::set<std::pair<int, int>> edges);

/// Kahn topological order; nullopt when the edge set contains a cycle.
std::optional<std::vector<int>> topological_sort(const Dag& g);

bool is_acyclic(const Dag& g);

/// Nodes reachable from `node` by directed paths (excluding the node itself).
std::set<int> descendants(const Dag& g, int node);
std::set<int> ancestors(const Dag& g, int node);

/// Plain-text edge list, one "parent child" pair per line. A leading
/// "# nodes: ..." comment preserves isolated nodes.
std::string to_edge_list(const Dag& g);
Dag parse_edge_list(const std::string& text);
Dag load_edge_list(const std::string& path);

std::string to_dot(const Dag& g);

}  // namespace shapdag
