#pragma once

#include <string>
#include <vector>

#include "shapdag/shap.hpp"

namespace shapdag {

struct SelectionConfig {
    int min_pts = 1;
    double zeta_constant = 1e-6;     // added to the starting neighborhood radius
    bool greedy = false;             // percentile mode instead of clustering
    double greedy_percentile = 80.0;
    bool auto_greedy = true;         // rerun in greedy mode when the graph is too sparse
    double auto_greedy_edge_fraction = 0.1;  // of p(p-1)/2
};

/// Density clustering on the real line. Returns one label per input value;
/// -1 marks noise (unreachable when min_pts = 1). With min_pts = 1 the
/// clusters are exactly the maximal runs of points with consecutive gaps
/// <= eps.
std::vector<int> dbscan_1d(const std::vector<double>& values, double eps, int min_pts);

/// Adaptive-radius cluster selection over per-feature importances: starting
/// above the largest pairwise distance, the radius steps down through the
/// observed distance scale until the points split into more than one
/// cluster, then the cluster with the highest mean importance is returned.
/// An empty result is the no-parent signal.
std::vector<std::string> select_parents(const ImportanceVector& imp,
                                        const SelectionConfig& cfg);

/// All features with importance strictly above the given percentile of the
/// importance distribution.
std::vector<std::string> select_parents_greedy(const ImportanceVector& imp,
                                               double percentile);

}  // namespace shapdag
