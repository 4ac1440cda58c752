#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "shapdag/anm.hpp"
#include "shapdag/dataset.hpp"
#include "shapdag/graph.hpp"
#include "shapdag/gbt.hpp"
#include "shapdag/mlp.hpp"
#include "shapdag/selection.hpp"
#include "shapdag/skeleton.hpp"

#include "json.hpp"

namespace shapdag {

struct DirectedEdgeInfo {
    std::set<std::string> provenance;  // contributing regressor families
    double p_value = -1.0;             // orientation p-value when known
};

/// Directed graph that may still contain 2-cycles and longer cycles.
struct Digraph {
    std::vector<std::string> nodes;
    std::map<std::pair<int, int>, DirectedEdgeInfo> edges;

    bool has_edge(int from, int to) const { return edges.count({from, to}) > 0; }
};

enum class CombineMode { Union, Intersection };

CombineMode parse_combine_mode(const std::string& name);
std::string combine_mode_name(CombineMode m);

/// Set union or intersection of directed edges; provenance merges.
Digraph combine(const Digraph& g1, const Digraph& g2, CombineMode mode);

/// SHAP discrepancies keyed by (target, feature, regressor family), computed
/// once per run from full-data attribution matrices.
class DiscrepancyStore {
public:
    void set(int target, int feature, const std::string& family, double delta);
    /// Minimum delta across the given families; throws when no entry exists.
    double get(int target, int feature, const std::set<std::string>& families) const;
    nlohmann::json to_json(const std::vector<std::string>& nodes) const;

private:
    std::map<std::tuple<int, int, std::string>, double> deltas_;
};

/// Resolves 2-cycles first, then longer cycles: an edge is reversed when the
/// reversed orientation has strictly lower discrepancy and reversal does not
/// create a 2-cycle; otherwise the highest-discrepancy cycle edge is
/// removed. The result always passes topological sort.
Dag break_cycles(const Digraph& g, const DiscrepancyStore& store);

struct PipelineConfig {
    std::uint64_t seed = 0;
    std::string regressors = "both";  // gbt | mlp | both
    CombineMode mode = CombineMode::Union;
    int bootstrap_iterations = 50;  // T
    double miss_probability = 0.01;  // q
    double tau = 0.2;
    int hpo_budget = 25;  // 0 skips the search and uses the defaults below
    HsicConfig hsic;
    SelectionConfig selection;
    int eg_samples = 200;      // expected-gradients samples inside the pipeline
    int background_rows = 100;  // background size for full-data attributions
    int jobs = 1;
    GbtHyperParams gbt_defaults;
    MlpHyperParams mlp_defaults;

    nlohmann::json to_json() const;
};

struct FamilyResult {
    std::string family;  // "gbt" or "mlp"
    SkeletonResult skeleton;
    std::vector<OrientationResult> orientations;
    Digraph directed;
};

struct DiscoveryReport {
    Dag dag;
    Digraph combined;
    std::vector<FamilyResult> families;
    DiscrepancyStore discrepancies;
    std::map<std::string, double> stage_seconds;
    PipelineConfig config;

    nlohmann::json dag_json() const;
    nlohmann::json report_json() const;
};

/// End-to-end discovery: standardize, tune and train the regressor families
/// per target, build a bootstrapped skeleton and orient it per family,
/// combine, and resolve cycles with SHAP discrepancies.
DiscoveryReport discover(const Dataset& input, const PipelineConfig& cfg);

}  // namespace shapdag
