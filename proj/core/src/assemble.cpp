#include "shapdag/assemble.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include "shapdag/bootstrap.hpp"
#include "shapdag/error.hpp"
#include "shapdag/parallel.hpp"
#include "shapdag/shap.hpp"
#include "shapdag/tune.hpp"

namespace shapdag {

CombineMode parse_combine_mode(const std::string& name) {
    if (name == "union") return CombineMode::Union;
    if (name == "intersection") return CombineMode::Intersection;
    throw InputError("unknown combination mode: " + name);
}

std::string combine_mode_name(CombineMode m) {
    return m == CombineMode::Union ? "union" : "intersection";
}

Digraph combine(const Digraph& g1, const Digraph& g2, CombineMode mode) {
    if (g1.nodes != g2.nodes) throw InputError("combine: node sets differ");
    Digraph out;
    out.nodes = g1.nodes;
    if (mode == CombineMode::Union) {
        out.edges = g1.edges;
        for (const auto& [key, info] : g2.edges) {
            auto [it, inserted] = out.edges.emplace(key, info);
            if (!inserted) {
                it->second.provenance.insert(info.provenance.begin(), info.provenance.end());
                it->second.p_value = std::max(it->second.p_value, info.p_value);
            }
        }
    } else {
        for (const auto& [key, info] : g1.edges) {
            const auto other = g2.edges.find(key);
            if (other == g2.edges.end()) continue;
            DirectedEdgeInfo merged = info;
            merged.provenance.insert(other->second.provenance.begin(),
                                     other->second.provenance.end());
            merged.p_value = std::max(info.p_value, other->second.p_value);
            out.edges.emplace(key, merged);
        }
    }
    return out;
}

void DiscrepancyStore::set(int target, int feature, const std::string& family, double delta) {
    if (delta < 0.0) throw NumericError("discrepancy must be nonnegative");
    deltas_[{target, feature, family}] = delta;
}

double DiscrepancyStore::get(int target, int feature,
                             const std::set<std::string>& families) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& fam : families) {
        const auto it = deltas_.find({target, feature, fam});
        if (it != deltas_.end()) best = std::min(best, it->second);
    }
    if (!std::isfinite(best)) {
        throw NumericError("missing discrepancy entry for target " + std::to_string(target) +
                           ", feature " + std::to_string(feature));
    }
    return best;
}

nlohmann::json DiscrepancyStore::to_json(const std::vector<std::string>& nodes) const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [key, delta] : deltas_) {
        const auto& [target, feature, family] = key;
        arr.push_back({{"target", nodes[target]},
                       {"feature", nodes[feature]},
                       {"regressor", family},
                       {"delta", delta}});
    }
    return arr;
}

namespace {

/// One directed cycle found by DFS (as a list of edges), or empty when
/// acyclic. Nodes and successors are visited in index order.
std::vector<std::pair<int, int>> find_cycle(const Digraph& g) {
    const int p = static_cast<int>(g.nodes.size());
    std::vector<std::vector<int>> succ(p);
    for (const auto& [key, info] : g.edges) {
        (void)info;
        succ[key.first].push_back(key.second);
    }
    std::vector<int> state(p, 0);  // 0 white, 1 gray, 2 black
    std::vector<int> parent(p, -1);

    std::vector<std::pair<int, int>> cycle;
    std::function<bool(int)> dfs = [&](int u) {
        state[u] = 1;
        for (int v : succ[u]) {
            if (state[v] == 1) {
                // Walk the gray chain back from u to v.
                cycle.clear();
                cycle.emplace_back(u, v);
                int w = u;
                while (w != v) {
                    cycle.emplace_back(parent[w], w);
                    w = parent[w];
                }
                std::reverse(cycle.begin(), cycle.end());
                return true;
            }
            if (state[v] == 0) {
                parent[v] = u;
                if (dfs(v)) return true;
            }
        }
        state[u] = 2;
        return false;
    };
    for (int u = 0; u < p; ++u) {
        if (state[u] == 0 && dfs(u)) return cycle;
    }
    return {};
}

}  // namespace

Dag break_cycles(const Digraph& g, const DiscrepancyStore& store) {
    Digraph work = g;
    auto delta_of = [&](int from, int to, const std::set<std::string>& prov) {
        // Edge from -> to claims `from` is a parent of target `to`.
        return store.get(to, from, prov);
    };

    bool progress = true;
    while (progress) {
        progress = false;

        // Bidirected pairs are the cheapest artifact of the union: resolve
        // them by dropping the weaker (higher-discrepancy) direction.
        for (auto it = work.edges.begin(); it != work.edges.end(); ++it) {
            const auto [u, v] = it->first;
            if (u > v || !work.has_edge(v, u)) continue;
            const auto rev = work.edges.find({v, u});
            const double d_uv = delta_of(u, v, it->second.provenance);
            const double d_vu = delta_of(v, u, rev->second.provenance);
            if (d_uv <= d_vu) {
                work.edges.erase(rev);
            } else {
                work.edges.erase(it);
            }
            progress = true;
            break;
        }
        if (progress) continue;

        const std::vector<std::pair<int, int>> cycle = find_cycle(work);
        if (cycle.empty()) break;

        double best_improvement = 0.0;
        std::pair<int, int> reverse_edge{-1, -1};
        double worst_delta = -1.0;
        std::pair<int, int> remove_edge{-1, -1};
        for (const auto& [u, v] : cycle) {
            const auto& prov = work.edges.at({u, v}).provenance;
            const double d_fwd = delta_of(u, v, prov);
            const double d_rev = delta_of(v, u, prov);
            if (d_rev < d_fwd && !work.has_edge(v, u)) {
                const double improvement = d_fwd - d_rev;
                if (improvement > best_improvement) {
                    best_improvement = improvement;
                    reverse_edge = {u, v};
                }
            }
            if (d_fwd > worst_delta) {
                worst_delta = d_fwd;
                remove_edge = {u, v};
            }
        }
        if (reverse_edge.first >= 0) {
            DirectedEdgeInfo info = work.edges.at(reverse_edge);
            work.edges.erase(reverse_edge);
            work.edges.emplace(std::make_pair(reverse_edge.second, reverse_edge.first),
                               std::move(info));
        } else {
            work.edges.erase(remove_edge);
        }
        progress = true;
    }

    std::set<std::pair<int, int>> edges;
    for (const auto& [key, info] : work.edges) {
        (void)info;
        edges.insert(key);
    }
    return make_dag(g.nodes, std::move(edges));
}

nlohmann::json PipelineConfig::to_json() const {
    return nlohmann::json{{"seed", seed},
                          {"regressors", regressors},
                          {"mode", combine_mode_name(mode)},
                          {"bootstrap_iterations", bootstrap_iterations},
                          {"miss_probability", miss_probability},
                          {"tau", tau},
                          {"hpo_budget", hpo_budget},
                          {"hsic_alpha", hsic.alpha},
                          {"hsic_permutations", hsic.permutations},
                          {"hsic_gamma_approx", hsic.use_gamma_approx},
                          {"eg_samples", eg_samples},
                          {"background_rows", background_rows},
                          {"greedy", selection.greedy},
                          {"greedy_percentile", selection.greedy_percentile},
                          {"jobs", jobs}};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix sample_background(const Dataset& d, int background_rows, Rng& rng) {
    if (static_cast<int>(d.rows()) <= background_rows) return d.values;
    Dataset sub = sample_rows(d, static_cast<double>(background_rows) / d.rows(), rng);
    return sub.values;
}

Matrix drop_column(const Matrix& rows, std::size_t col) {
    Matrix out(rows.size(), std::vector<double>(rows[0].size() - 1));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (j != col) out[i][c++] = rows[i][j];
        }
    }
    return out;
}

struct FamilyModels {
    std::string family;
    std::vector<GbtModel> gbt;  // per target, used when family == "gbt"
    std::vector<MlpModel> mlp;
};

Digraph directed_from_orientations(const Dataset& d,
                                   const std::vector<OrientationResult>& orientations,
                                   const std::string& family) {
    Digraph g;
    g.nodes = d.columns;
    for (const auto& r : orientations) {
        DirectedEdgeInfo info;
        info.provenance.insert(family);
        info.p_value = r.kept_forward ? r.p_forward : r.p_backward;
        if (r.kept_forward) {
            g.edges.emplace(std::make_pair(r.i, r.j), std::move(info));
        } else {
            g.edges.emplace(std::make_pair(r.j, r.i), std::move(info));
        }
    }
    return g;
}

}  // namespace

DiscoveryReport discover(const Dataset& input, const PipelineConfig& cfg) {
    DiscoveryReport report;
    report.config = cfg;

    const auto t_start = Clock::now();
    const Dataset data = input.standardized ? input : standardize(input);
    const std::size_t p = data.cols();

    std::vector<std::string> families;
    if (cfg.regressors == "both") {
        families = {"gbt", "mlp"};
    } else if (cfg.regressors == "gbt" || cfg.regressors == "mlp") {
        families = {cfg.regressors};
    } else {
        throw InputError("regressors must be gbt, mlp or both");
    }

    // Tune and train one model per (family, target).
    std::vector<FamilyModels> models(families.size());
    for (std::size_t f = 0; f < families.size(); ++f) {
        models[f].family = families[f];
        const bool is_gbt = families[f] == "gbt";
        if (is_gbt) {
            models[f].gbt.resize(p);
        } else {
            models[f].mlp.resize(p);
        }
        parallel_for(p, cfg.jobs, [&, f](std::size_t target) {
            const std::string& name = data.columns[target];
            Rng rng = make_rng(derive_seed(cfg.seed, 17 * (f + 1) + 131 * target));
            if (is_gbt) {
                GbtHyperParams hp = cfg.gbt_defaults;
                if (cfg.hpo_budget > 0) {
                    hp = tune_gbt(data, name, cfg.hpo_budget, rng).params;
                }
                models[f].gbt[target] = train_gbt(data, name, hp, rng);
            } else {
                MlpHyperParams hp = cfg.mlp_defaults;
                if (cfg.hpo_budget > 0) {
                    hp = tune_mlp(data, name, cfg.hpo_budget, rng).params;
                }
                models[f].mlp[target] = train_mlp(data, name, hp, rng);
            }
        });
    }
    report.stage_seconds["train"] = seconds_since(t_start);

    // Per-family skeleton, orientation and full-data discrepancies.
    const auto t_family = Clock::now();
    for (std::size_t f = 0; f < families.size(); ++f) {
        FamilyResult fr;
        fr.family = families[f];
        const bool is_gbt = families[f] == "gbt";

        ExplainFn explain = [&, f, is_gbt](std::size_t target, const Dataset& subset,
                                           std::uint64_t seed) {
            const std::size_t t_col = subset.column_index(data.columns[target]);
            const Matrix rows = drop_column(subset.values, t_col);
            if (is_gbt) {
                return shap_tree(models[f].gbt[target], rows, rows);
            }
            Rng rng = make_rng(seed);
            return shap_gradient(models[f].mlp[target], rows, rows, cfg.eg_samples, rng);
        };
        fr.skeleton =
            build_skeleton(explain, data, cfg.bootstrap_iterations, cfg.miss_probability,
                           cfg.tau, cfg.selection, derive_seed(cfg.seed, 31 + f), cfg.jobs);
        fr.orientations = orient_edges(data, fr.skeleton.edges, cfg.hsic,
                                       derive_seed(cfg.seed, 53 + f), cfg.jobs);
        fr.directed = directed_from_orientations(data, fr.orientations, families[f]);

        // Full-data attribution per target fills the discrepancy cache for
        // every (target, feature) pair of this family.
        parallel_for(p, 1, [&](std::size_t target) {
            Rng rng = make_rng(derive_seed(cfg.seed, 977 * (f + 1) + target));
            const Matrix bg = sample_background(data, cfg.background_rows, rng);
            const std::size_t t_col = target;
            const Matrix rows = drop_column(data.values, t_col);
            const Matrix bg_rows = drop_column(bg, t_col);
            ShapMatrix phi;
            if (is_gbt) {
                phi = shap_tree(models[f].gbt[target], rows, bg_rows, cfg.jobs);
            } else {
                phi = shap_gradient(models[f].mlp[target], rows, bg_rows, cfg.eg_samples, rng,
                                    cfg.jobs);
            }
            const std::vector<double> target_col = data.column(target);
            for (std::size_t c = 0; c < phi.features.size(); ++c) {
                std::vector<double> phi_col(phi.values.size());
                for (std::size_t r = 0; r < phi.values.size(); ++r) {
                    phi_col[r] = phi.values[r][c];
                }
                const std::size_t feature = data.column_index(phi.features[c]);
                report.discrepancies.set(static_cast<int>(target), static_cast<int>(feature),
                                         families[f],
                                         shap_discrepancy(target_col, phi_col));
            }
        });
        report.families.push_back(std::move(fr));
    }
    report.stage_seconds["skeleton_orient"] = seconds_since(t_family);

    const auto t_final = Clock::now();
    if (report.families.size() == 2) {
        report.combined =
            combine(report.families[0].directed, report.families[1].directed, cfg.mode);
    } else {
        report.combined = report.families[0].directed;
    }
    report.dag = break_cycles(report.combined, report.discrepancies);
    report.stage_seconds["combine_prune"] = seconds_since(t_final);
    report.stage_seconds["total"] = seconds_since(t_start);
    return report;
}

nlohmann::json DiscoveryReport::dag_json() const {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [from, to] : dag.edges) {
        nlohmann::json e{{"from", dag.nodes[from]}, {"to", dag.nodes[to]}};
        const auto it = combined.edges.find({from, to});
        if (it != combined.edges.end()) {
            e["provenance"] = it->second.provenance;
            if (it->second.p_value >= 0.0) e["p_value"] = it->second.p_value;
            e["discrepancy"] = discrepancies.get(to, from, it->second.provenance);
        } else {
            // Edge direction introduced by cycle resolution.
            const auto rev = combined.edges.find({to, from});
            if (rev != combined.edges.end()) {
                e["provenance"] = rev->second.provenance;
                e["discrepancy"] = discrepancies.get(to, from, rev->second.provenance);
                e["reversed_in_pruning"] = true;
            }
        }
        edges.push_back(std::move(e));
    }
    return nlohmann::json{
        {"schema_version", 1}, {"nodes", dag.nodes}, {"edges", std::move(edges)}};
}

nlohmann::json DiscoveryReport::report_json() const {
    nlohmann::json fams = nlohmann::json::array();
    for (const auto& fr : families) {
        nlohmann::json audit = nlohmann::json::array();
        for (const auto& r : fr.orientations) {
            audit.push_back({{"i", dag.nodes[r.i]},
                             {"j", dag.nodes[r.j]},
                             {"p_forward", r.p_forward},
                             {"p_backward", r.p_backward},
                             {"decision", r.decision == EdgeDirection::Forward    ? "forward"
                                          : r.decision == EdgeDirection::Backward ? "backward"
                                                                                  : "undecided"},
                             {"kept_forward", r.kept_forward},
                             {"note", r.note}});
        }
        nlohmann::json skeleton_edges = nlohmann::json::array();
        for (const auto& [i, j] : fr.skeleton.edges) {
            skeleton_edges.push_back({{"a", dag.nodes[i]},
                                      {"b", dag.nodes[j]},
                                      {"frequency", fr.skeleton.graph.weights[i][j]}});
        }
        fams.push_back({{"family", fr.family},
                        {"greedy_used", fr.skeleton.greedy_used},
                        {"skeleton_edges", std::move(skeleton_edges)},
                        {"orientation_audit", std::move(audit)}});
    }
    return nlohmann::json{{"schema_version", 1},
                          {"config", config.to_json()},
                          {"stage_seconds", stage_seconds},
                          {"families", std::move(fams)},
                          {"discrepancies", discrepancies.to_json(dag.nodes)},
                          {"dag", dag_json()}};
}

}  // namespace shapdag
