#pragma once

#include <string>
#include <vector>

#include "shapdag/assemble.hpp"
#include "shapdag/metrics.hpp"
#include "shapdag/synth.hpp"

#include "json.hpp"

namespace shapdag {

struct SuiteConfig {
    MechanismFamily family = MechanismFamily::Linear;
    int variables = 10;
    std::size_t samples = 500;
    int max_parents = 5;
    int datasets = 10;
    PipelineConfig pipeline;
};

/// Per-dataset result: one metrics report per assembly strategy, computed
/// from a single training/skeleton/orientation pass per regressor family.
struct SuiteRun {
    int dataset_index = 0;
    Dag truth;
    MetricsReport gbt_only;
    MetricsReport mlp_only;
    MetricsReport graph_union;
    MetricsReport graph_intersection;
    bool union_acyclic = true;
};

struct SuiteResult {
    std::vector<SuiteRun> runs;

    double median_f1(const std::string& strategy) const;
    double median_shd(const std::string& strategy) const;
    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Generates `datasets` ground-truth DAG + dataset pairs and runs the full
/// pipeline on each, scoring the single-regressor graphs and both
/// combination strategies against the truth.
SuiteResult run_benchmark_suite(const SuiteConfig& cfg, std::uint64_t seed);

/// Final DAG under a given combination mode from an existing dual-family
/// report, reusing its trained models and orientations.
Dag assemble_with_mode(const DiscoveryReport& report, CombineMode mode);

/// Single-family directed result pruned to a DAG.
Dag assemble_single_family(const DiscoveryReport& report, const std::string& family);

}  // namespace shapdag
