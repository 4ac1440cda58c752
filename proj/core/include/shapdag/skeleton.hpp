#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shapdag/bootstrap.hpp"
#include "shapdag/dataset.hpp"
#include "shapdag/selection.hpp"

namespace shapdag {

/// Symmetric edge-frequency graph in [0,1] with zero diagonal.
struct WeightedGraph {
    std::vector<std::string> nodes;
    Matrix weights;
};

struct SkeletonResult {
    /// Directional selection frequencies a[target][feature], normalized by T
    /// and not thresholded. Exportable as CSV for audit.
    Matrix frequencies;
    /// Symmetrized, thresholded frequencies: entry max(a_ij, a_ji) where it
    /// clears tau, zero otherwise.
    WeightedGraph graph;
    /// Undirected pairs (i < j) that survived thresholding.
    std::vector<std::pair<int, int>> edges;
    bool greedy_used = false;
};

/// Computes per-feature attributions of one target over a bootstrap subset.
/// The subset serves as both the explained set and the explainer background.
using ExplainFn =
    std::function<ShapMatrix(std::size_t target, const Dataset& subset, std::uint64_t seed)>;

/// Bootstrapped adjacency accumulation: T rounds of subsampling at the
/// coverage fraction c = 1 - q^(1/T), per-target parent selection from
/// attribution importances, frequency normalization and thresholding at tau.
/// When the thresholded graph is sparser than cfg.auto_greedy_edge_fraction
/// of all pairs and cfg.auto_greedy is set, the accumulation is rerun with
/// greedy percentile selection.
SkeletonResult build_skeleton(const ExplainFn& explain, const Dataset& d, int iterations,
                              double miss_probability, double tau, const SelectionConfig& cfg,
                              std::uint64_t seed, int jobs = 1);

std::string frequencies_to_csv(const SkeletonResult& r, const std::vector<std::string>& nodes);

}  // namespace shapdag
