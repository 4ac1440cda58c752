#pragma once

#include "shapdag/dataset.hpp"
#include "shapdag/rng.hpp"

namespace shapdag {

struct BootstrapPlan {
    int iterations = 50;          // T
    double miss_probability = 0.01;  // q: max acceptable chance a row is never drawn
    double fraction = 0.0;        // c, per-iteration sampling fraction
};

/// Minimal sampling fraction c = 1 - q^(1/T) guaranteeing that a fixed row
/// is missed by all T rounds with probability at most q.
BootstrapPlan bootstrap_plan(int iterations, double miss_probability);

/// Uniform subsample of ceil(fraction * m) distinct rows, in original row
/// order. Deterministic for a given generator state.
Dataset sample_rows(const Dataset& d, double fraction, Rng& rng);

}  // namespace shapdag
