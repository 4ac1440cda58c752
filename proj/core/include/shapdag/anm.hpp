#pragma once

#include <string>
#include <vector>

#include "shapdag/dataset.hpp"
#include "shapdag/rng.hpp"

namespace shapdag {

struct HsicConfig {
    double alpha = 0.05;
    int permutations = 200;
    bool use_gamma_approx = false;  // analytic null instead of permutations
    int max_rows = 500;             // subsample cap, Gram matrices are O(n^2)
};

enum class EdgeDirection { Forward, Backward, Undecided };

struct OrientationResult {
    int i = 0;
    int j = 0;
    double p_forward = 0.0;   // independence of resid(j ~ i) from i
    double p_backward = 0.0;  // independence of resid(i ~ j) from j
    EdgeDirection decision = EdgeDirection::Undecided;
    /// Orientation retained in the graph. Undecided edges keep the
    /// larger-p direction: the edge survived bootstrap vetting, so it is
    /// kept rather than dropped.
    bool kept_forward = true;
    std::string note;
};

/// Smooth univariate regression of y on x (cubic B-spline basis, 10 knots,
/// curvature penalty 1e-3) returning the residuals y - yhat. A constant x
/// degenerates to the mean fit.
std::vector<double> fit_univariate(const std::vector<double>& x,
                                   const std::vector<double>& y);

struct HsicResult {
    double statistic = 0.0;  // biased HSIC estimate, nonnegative
    double p_value = 1.0;
};

/// HSIC independence test with RBF kernels and median-heuristic bandwidths.
/// The null distribution comes from permutations of b, or from the gamma
/// approximation when configured.
HsicResult hsic_test(const std::vector<double>& a, const std::vector<double>& b,
                     const HsicConfig& cfg, Rng& rng);

/// Orients each undirected pair with additive-noise regressions in both
/// directions: the direction whose residuals look independent of the
/// regressor (larger p-value, above alpha) wins; near-ties and dual
/// rejections are Undecided with the larger-p direction kept.
std::vector<OrientationResult> orient_edges(const Dataset& d,
                                            const std::vector<std::pair<int, int>>& edges,
                                            const HsicConfig& cfg, std::uint64_t seed,
                                            int jobs = 1);

}  // namespace shapdag
