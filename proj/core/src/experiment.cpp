#include "shapdag/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "shapdag/error.hpp"

namespace shapdag {

Dag assemble_with_mode(const DiscoveryReport& report, CombineMode mode) {
    if (report.families.size() != 2) {
        throw InputError("assemble_with_mode needs a dual-family report");
    }
    const Digraph combined =
        combine(report.families[0].directed, report.families[1].directed, mode);
    return break_cycles(combined, report.discrepancies);
}

Dag assemble_single_family(const DiscoveryReport& report, const std::string& family) {
    for (const auto& fr : report.families) {
        if (fr.family == family) return break_cycles(fr.directed, report.discrepancies);
    }
    throw InputError("report has no family " + family);
}

SuiteResult run_benchmark_suite(const SuiteConfig& cfg, std::uint64_t seed) {
    SuiteResult result;
    for (int i = 0; i < cfg.datasets; ++i) {
        Rng rng = make_rng(derive_seed(seed, 7000 + i));
        const Dag truth = sample_dag(cfg.variables, cfg.max_parents, rng);
        const Dataset data = generate_sem(truth, cfg.family, cfg.samples, rng);

        PipelineConfig pipeline = cfg.pipeline;
        pipeline.seed = derive_seed(seed, 9000 + i);
        pipeline.regressors = "both";
        const DiscoveryReport report = discover(data, pipeline);

        SuiteRun run;
        run.dataset_index = i;
        run.truth = truth;
        run.gbt_only = full_report(assemble_single_family(report, "gbt"), truth);
        run.mlp_only = full_report(assemble_single_family(report, "mlp"), truth);
        const Dag union_dag = assemble_with_mode(report, CombineMode::Union);
        run.union_acyclic = is_acyclic(union_dag);
        run.graph_union = full_report(union_dag, truth);
        run.graph_intersection =
            full_report(assemble_with_mode(report, CombineMode::Intersection), truth);
        result.runs.push_back(std::move(run));
    }
    return result;
}

namespace {

const MetricsReport& strategy_report(const SuiteRun& run, const std::string& strategy) {
    if (strategy == "gbt") return run.gbt_only;
    if (strategy == "mlp") return run.mlp_only;
    if (strategy == "union") return run.graph_union;
    if (strategy == "intersection") return run.graph_intersection;
    throw InputError("unknown strategy " + strategy);
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double SuiteResult::median_f1(const std::string& strategy) const {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(strategy_report(r, strategy).f1);
    return median(std::move(v));
}

double SuiteResult::median_shd(const std::string& strategy) const {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) {
        v.push_back(static_cast<double>(strategy_report(r, strategy).shd));
    }
    return median(std::move(v));
}

nlohmann::json SuiteResult::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : runs) {
        arr.push_back({{"dataset", r.dataset_index},
                       {"truth_edges", r.truth.edges.size()},
                       {"gbt", r.gbt_only.to_json()},
                       {"mlp", r.mlp_only.to_json()},
                       {"union", r.graph_union.to_json()},
                       {"intersection", r.graph_intersection.to_json()},
                       {"union_acyclic", r.union_acyclic}});
    }
    nlohmann::json medians;
    for (const std::string s : {"gbt", "mlp", "union", "intersection"}) {
        medians[s] = {{"f1", median_f1(s)}, {"shd", median_shd(s)}};
    }
    return nlohmann::json{
        {"schema_version", 1}, {"runs", std::move(arr)}, {"medians", std::move(medians)}};
}

std::string SuiteResult::to_csv() const {
    std::ostringstream out;
    out << "dataset,strategy," << MetricsReport::csv_header() << '\n';
    for (const auto& r : runs) {
        for (const std::string s : {"gbt", "mlp", "union", "intersection"}) {
            out << r.dataset_index << ',' << s << ',' << strategy_report(r, s).to_csv_row()
                << '\n';
        }
    }
    return out.str();
}

}  // namespace shapdag
