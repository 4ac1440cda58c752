#include "shapdag/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "shapdag/error.hpp"

namespace shapdag {

namespace {

void require_same_nodes(const Dag& a, const Dag& b) {
    if (a.nodes != b.nodes) throw InputError("graphs are defined over different node sets");
}

}  // namespace

Confusion confusion(const Dag& est, const Dag& truth) {
    require_same_nodes(est, truth);
    Confusion c;
    for (const auto& e : est.edges) {
        if (truth.edges.count(e)) {
            ++c.tp;
        } else {
            ++c.fp;
        }
    }
    for (const auto& e : truth.edges) {
        if (!est.edges.count(e)) ++c.fn;
    }
    return c;
}

long shd(const Dag& est, const Dag& truth) {
    require_same_nodes(est, truth);
    long dist = 0;
    const int p = static_cast<int>(est.nodes.size());
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            const bool e_ij = est.has_edge(i, j), e_ji = est.has_edge(j, i);
            const bool t_ij = truth.has_edge(i, j), t_ji = truth.has_edge(j, i);
            const bool e_any = e_ij || e_ji;
            const bool t_any = t_ij || t_ji;
            if (e_any != t_any) {
                ++dist;  // missing or extraneous
            } else if (e_any && t_any && e_ij != t_ij) {
                ++dist;  // present in both, reversed
            }
        }
    }
    return dist;
}

bool d_separated(const Dag& g, int x, int y, const std::vector<int>& z) {
    const int p = static_cast<int>(g.nodes.size());
    // Ancestral node set of {x, y} union z.
    std::set<int> relevant{x, y};
    for (int v : z) relevant.insert(v);
    {
        std::vector<int> stack(relevant.begin(), relevant.end());
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (const auto& [from, to] : g.edges) {
                if (to == u && !relevant.count(from)) {
                    relevant.insert(from);
                    stack.push_back(from);
                }
            }
        }
    }
    // Moralize: connect edges and co-parent pairs inside the ancestral set.
    std::vector<std::vector<bool>> adj(p, std::vector<bool>(p, false));
    for (const auto& [from, to] : g.edges) {
        if (relevant.count(from) && relevant.count(to)) {
            adj[from][to] = adj[to][from] = true;
        }
    }
    for (int child = 0; child < p; ++child) {
        if (!relevant.count(child)) continue;
        const std::vector<int> pa = g.parents(child);
        for (std::size_t a = 0; a < pa.size(); ++a) {
            for (std::size_t b = a + 1; b < pa.size(); ++b) {
                if (relevant.count(pa[a]) && relevant.count(pa[b])) {
                    adj[pa[a]][pa[b]] = adj[pa[b]][pa[a]] = true;
                }
            }
        }
    }
    // Remove the conditioning set and test undirected connectivity.
    std::vector<bool> blocked(p, false);
    for (int v : z) blocked[v] = true;
    if (blocked[x] || blocked[y]) return true;
    std::vector<bool> seen(p, false);
    std::vector<int> stack{x};
    seen[x] = true;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        if (u == y) return false;
        for (int v = 0; v < p; ++v) {
            if (adj[u][v] && !seen[v] && !blocked[v]) {
                seen[v] = true;
                stack.push_back(v);
            }
        }
    }
    return true;
}

bool valid_adjustment_set(const Dag& g, int cause, int effect, const std::vector<int>& z) {
    // Causal nodes: vertices other than the cause lying on a directed path
    // cause -> ... -> effect.
    const std::set<int> desc = descendants(g, cause);
    std::set<int> anc_effect = ancestors(g, effect);
    anc_effect.insert(effect);
    std::set<int> causal_nodes;
    for (int v : desc) {
        if (anc_effect.count(v)) causal_nodes.insert(v);
    }

    // Forbidden set: causal nodes and their descendants.
    std::set<int> forbidden;
    for (int v : causal_nodes) {
        forbidden.insert(v);
        for (int d : descendants(g, v)) forbidden.insert(d);
    }
    for (int v : z) {
        if (forbidden.count(v)) return false;
    }

    // Proper back-door graph: drop the first edge of every proper causal
    // path, i.e. cause -> w for w on a causal path to the effect.
    Dag pbd = g;
    for (int w : causal_nodes) pbd.edges.erase({cause, w});
    return d_separated(pbd, cause, effect, z);
}

long sid(const Dag& est, const Dag& truth) {
    require_same_nodes(est, truth);
    if (!is_acyclic(est) || !is_acyclic(truth)) throw InputError("sid requires acyclic inputs");
    const int p = static_cast<int>(est.nodes.size());
    long count = 0;
    for (int i = 0; i < p; ++i) {
        const std::vector<int> pa_est = est.parents(i);
        const std::set<int> pa_set(pa_est.begin(), pa_est.end());
        const std::set<int> desc = descendants(truth, i);
        for (int j = 0; j < p; ++j) {
            if (i == j) continue;
            if (pa_set.count(j)) {
                // Conditioning on the effect reads as "no influence": wrong
                // exactly when the true graph has a causal path i -> j.
                if (desc.count(j)) ++count;
                continue;
            }
            if (!valid_adjustment_set(truth, i, j, pa_est)) ++count;
        }
    }
    return count;
}

double f1_score(double precision, double recall) {
    const double denom = precision + recall;
    if (denom <= 0.0) return 0.0;
    return 2.0 * precision * recall / denom;
}

MetricsReport full_report(const Dag& est, const Dag& truth) {
    const Confusion c = confusion(est, truth);
    MetricsReport r;
    r.tp = c.tp;
    r.fp = c.fp;
    r.fn = c.fn;
    r.precision = (c.tp + c.fp) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    r.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    r.f1 = f1_score(r.precision, r.recall);
    r.edge_difference =
        static_cast<long>(est.edges.size()) - static_cast<long>(truth.edges.size());
    r.shd = shd(est, truth);
    r.sid = sid(est, truth);
    return r;
}

nlohmann::json MetricsReport::to_json() const {
    return nlohmann::json{{"schema_version", 1},
                          {"tp", tp},
                          {"fp", fp},
                          {"fn", fn},
                          {"precision", precision},
                          {"recall", recall},
                          {"f1", f1},
                          {"edge_difference", edge_difference},
                          {"shd", shd},
                          {"sid", sid}};
}

std::string MetricsReport::csv_header() {
    return "tp,fp,fn,precision,recall,f1,edge_difference,shd,sid";
}

std::string MetricsReport::to_csv_row() const {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%ld,%ld,%ld,%.6f,%.6f,%.6f,%ld,%ld,%ld", tp, fp, fn,
                  precision, recall, f1, edge_difference, shd, sid);
    return buf;
}

}  // namespace shapdag
