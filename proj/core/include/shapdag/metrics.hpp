#pragma once

#include <string>
#include <vector>

#include "shapdag/graph.hpp"

#include "json.hpp"

namespace shapdag {

struct MetricsReport {
    long tp = 0;
    long fp = 0;
    long fn = 0;
    double precision = 0.0;  // 0 by convention when tp + fp == 0
    double recall = 0.0;
    double f1 = 0.0;
    long edge_difference = 0;  // |E_est| - |E_truth|
    long shd = 0;
    long sid = 0;

    nlohmann::json to_json() const;
    static std::string csv_header();
    std::string to_csv_row() const;
};

struct Confusion {
    long tp = 0;
    long fp = 0;
    long fn = 0;
};

/// Directional confusion counts. An edge present in both graphs but
/// reversed counts as one false positive and one false negative.
Confusion confusion(const Dag& est, const Dag& truth);

/// Structural Hamming distance over unordered pairs: one unit per missing,
/// extraneous, or reversed edge.
long shd(const Dag& est, const Dag& truth);

/// Structural intervention distance: ordered pairs (i, j) whose causal
/// effect would be mis-inferred when adjusting for the estimated parents of
/// i in the true graph. Parent sets are checked with the graphical
/// adjustment criterion; d-separation runs on the moralized ancestral graph.
long sid(const Dag& est, const Dag& truth);

MetricsReport full_report(const Dag& est, const Dag& truth);

/// True when x and y are d-separated by z in g.
bool d_separated(const Dag& g, int x, int y, const std::vector<int>& z);

/// Adjustment-set validity for the ordered pair (cause, effect): the set
/// must avoid descendants of nodes on proper causal paths and block every
/// non-causal path.
bool valid_adjustment_set(const Dag& g, int cause, int effect, const std::vector<int>& z);

double f1_score(double precision, double recall);

}  // namespace shapdag
