#include "shapdag/graph.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "shapdag/error.hpp"

namespace shapdag {

std::vector<int> Dag::parents(int node) const {
    std::vector<int> out;
    for (const auto& [from, to] : edges) {
        if (to == node) out.push_back(from);
    }
    return out;
}

std::vector<int> Dag::children(int node) const {
    std::vector<int> out;
    for (const auto& [from, to] : edges) {
        if (from == node) out.push_back(to);
    }
    return out;
}

int Dag::node_index(const std::string& name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::optional<std::vector<int>> topological_sort(const Dag& g) {
    const int p = static_cast<int>(g.nodes.size());
    std::vector<int> indegree(p, 0);
    for (const auto& [from, to] : g.edges) {
        (void)from;
        ++indegree[to];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int i = 0; i < p; ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<int> order;
    order.reserve(p);
    while (!ready.empty()) {
        const int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int v : g.children(u)) {
            if (--indegree[v] == 0) ready.push(v);
        }
    }
    if (static_cast<int>(order.size()) != p) return std::nullopt;
    return order;
}

bool is_acyclic(const Dag& g) { return topological_sort(g).has_value(); }

Dag make_dag(std::vector<std::string> nodes, std::set<std::pair<int, int>> edges) {
    Dag g;
    g.nodes = std::move(nodes);
    g.edges = std::move(edges);
    const int p = static_cast<int>(g.nodes.size());
    for (const auto& [from, to] : g.edges) {
        if (from == to) throw InputError("self-loop on node " + g.nodes[from]);
        if (from < 0 || from >= p || to < 0 || to >= p) {
            throw InputError("edge endpoint out of range");
        }
    }
    if (!is_acyclic(g)) throw InputError("edge set contains a cycle");
    return g;
}

std::set<int> descendants(const Dag& g, int node) {
    std::set<int> seen;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [from, to] : g.edges) {
            if (from == u && !seen.count(to)) {
                seen.insert(to);
                stack.push_back(to);
            }
        }
    }
    return seen;
}

std::set<int> ancestors(const Dag& g, int node) {
    std::set<int> seen;
    std::vector<int> stack{node};
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [from, to] : g.edges) {
            if (to == u && !seen.count(from)) {
                seen.insert(from);
                stack.push_back(from);
            }
        }
    }
    return seen;
}

std::string to_edge_list(const Dag& g) {
    std::ostringstream out;
    out << "# nodes:";
    for (const auto& n : g.nodes) out << ' ' << n;
    out << '\n';
    for (const auto& [from, to] : g.edges) {
        out << g.nodes[from] << ' ' << g.nodes[to] << '\n';
    }
    return out.str();
}

Dag parse_edge_list(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::string> nodes;
    std::map<std::string, int> index;
    auto intern = [&](const std::string& name) {
        auto it = index.find(name);
        if (it != index.end()) return it->second;
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(name);
        index.emplace(name, id);
        return id;
    };
    std::set<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream hs(line.substr(1));
            std::string tok;
            hs >> tok;
            if (tok == "nodes:") {
                while (hs >> tok) intern(tok);
            }
            continue;
        }
        std::istringstream ls(line);
        std::string from, to, extra;
        if (!(ls >> from >> to) || (ls >> extra)) {
            throw InputError("malformed edge line: '" + line + "'");
        }
        edges.insert({intern(from), intern(to)});
    }
    return make_dag(std::move(nodes), std::move(edges));
}

Dag load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_edge_list(buf.str());
}

std::string to_dot(const Dag& g) {
    std::ostringstream out;
    out << "digraph g {\n";
    for (const auto& n : g.nodes) out << "  \"" << n << "\";\n";
    for (const auto& [from, to] : g.edges) {
        out << "  \"" << g.nodes[from] << "\" -> \"" << g.nodes[to] << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace shapdag
