#include "shapdag/skeleton.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "shapdag/error.hpp"
#include "shapdag/parallel.hpp"
#include "shapdag/rng.hpp"

namespace shapdag {

namespace {

Matrix accumulate_rounds(const ExplainFn& explain, const Dataset& d, int iterations,
                         double fraction, const SelectionConfig& cfg, std::uint64_t seed,
                         int jobs) {
    const std::size_t p = d.cols();
    std::vector<Matrix> counts(iterations, Matrix(p, std::vector<double>(p, 0.0)));

    parallel_for(static_cast<std::size_t>(iterations), jobs, [&](std::size_t t) {
        Rng round_rng = make_rng(derive_seed(seed, t));
        const Dataset subset = sample_rows(d, fraction, round_rng);
        for (std::size_t target = 0; target < p; ++target) {
            const std::uint64_t explain_seed = derive_seed(seed, t * p + target + 1000003);
            ShapMatrix phi;
            try {
                phi = explain(target, subset, explain_seed);
            } catch (const std::exception& e) {
                throw NumericError("bootstrap iteration " + std::to_string(t) + ", target " +
                                   d.columns[target] + ": " + e.what());
            }
            const ImportanceVector imp = importance(phi);
            std::vector<std::string> parents;
            if (imp.scores.size() == 1) {
                // Two-variable dataset: clustering is undefined on a single
                // candidate; vote for it whenever it carries any attribution.
                if (imp.scores[0] > 0.0) parents.push_back(imp.features[0]);
            } else {
                parents = select_parents(imp, cfg);
            }
            for (const auto& name : parents) {
                counts[t][target][d.column_index(name)] += 1.0;
            }
        }
    });

    Matrix total(p, std::vector<double>(p, 0.0));
    for (const auto& c : counts) {
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < p; ++j) total[i][j] += c[i][j];
        }
    }
    for (auto& row : total) {
        for (auto& v : row) v /= static_cast<double>(iterations);
    }
    return total;
}

SkeletonResult finalize(Matrix frequencies, const Dataset& d, double tau) {
    const std::size_t p = d.cols();
    SkeletonResult out;
    out.frequencies = std::move(frequencies);
    out.graph.nodes = d.columns;
    out.graph.weights.assign(p, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i + 1; j < p; ++j) {
            const double w = std::max(out.frequencies[i][j], out.frequencies[j][i]);
            if (w >= tau) {
                out.graph.weights[i][j] = out.graph.weights[j][i] = w;
                out.edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
            }
        }
    }
    return out;
}

}  // namespace

SkeletonResult build_skeleton(const ExplainFn& explain, const Dataset& d, int iterations,
                              double miss_probability, double tau, const SelectionConfig& cfg,
                              std::uint64_t seed, int jobs) {
    if (!(tau > 0.0 && tau <= 1.0)) throw InputError("tau must lie in (0,1]");
    const BootstrapPlan plan = bootstrap_plan(iterations, miss_probability);

    SkeletonResult result = finalize(
        accumulate_rounds(explain, d, iterations, plan.fraction, cfg, seed, jobs), d, tau);

    const std::size_t p = d.cols();
    const double sparse_cutoff =
        cfg.auto_greedy_edge_fraction * static_cast<double>(p * (p - 1)) / 2.0;
    if (cfg.auto_greedy && !cfg.greedy &&
        static_cast<double>(result.edges.size()) < sparse_cutoff) {
        SelectionConfig greedy_cfg = cfg;
        greedy_cfg.greedy = true;
        result = finalize(
            accumulate_rounds(explain, d, iterations, plan.fraction, greedy_cfg, seed, jobs),
            d, tau);
        result.greedy_used = true;
    }
    return result;
}

std::string frequencies_to_csv(const SkeletonResult& r, const std::vector<std::string>& nodes) {
    std::ostringstream out;
    out << "target";
    for (const auto& n : nodes) out << ',' << n;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << nodes[i];
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.6g", r.frequencies[i][j]);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace shapdag
