#pragma once

#include <functional>
#include <string>
#include <vector>

#include "shapdag/dataset.hpp"
#include "shapdag/gbt.hpp"
#include "shapdag/mlp.hpp"
#include "shapdag/rng.hpp"

namespace shapdag {

/// Per-sample, per-feature attributions for one explained target, plus the
/// explainer baseline (expected model output over the background set).
/// Efficiency: baseline + sum of a row = model prediction at that row.
struct ShapMatrix {
    std::string target;
    std::vector<std::string> features;
    Matrix values;  // rows = explained samples, cols = features
    double baseline = 0.0;
};

struct ImportanceVector {
    std::vector<std::string> features;
    std::vector<double> scores;  // mean |phi| per feature
};

using PredictFn = std::function<double(const std::vector<double>&)>;

/// Exact Shapley values by coalition enumeration against the interventional
/// value function v(S) = mean over background rows of the model applied to
/// (row restricted to S, background elsewhere). Feature count capped at 15.
std::vector<double> shap_bruteforce(const PredictFn& model, const std::vector<double>& row,
                                    const Matrix& background);

/// Exact interventional tree Shapley values: attributes each (explained,
/// background) pair through the two-reference tree recursion and averages
/// over the background. Agrees with shap_bruteforce on the same value
/// function.
ShapMatrix shap_tree(const GbtModel& model, const Matrix& rows, const Matrix& background,
                     int jobs = 1);

/// Expected-gradients estimator for differentiable models: Monte-Carlo
/// average of (x - z) * grad f over background rows z and path positions
/// alpha ~ U(0,1). The noise input is held at 0 on both endpoints.
ShapMatrix shap_gradient(const MlpModel& model, const Matrix& rows, const Matrix& background,
                         int n_samples, Rng& rng, int jobs = 1);

ImportanceVector importance(const ShapMatrix& s);

/// SHAP discrepancy: sum_k (x_k - phi_k)^2 / sum_k (x_k - mean)^2, read as
/// 1 - R^2 between a target column and one feature's attribution column.
/// Scale-sensitive; the pipeline computes it on standardized data.
double shap_discrepancy(const std::vector<double>& target_values,
                        const std::vector<double>& phi_column);

/// Shapley coalition weight |S|! (n-|S|-1)! / n! for a coalition of the
/// given size among n features.
double shapley_weight(std::size_t coalition_size, std::size_t n_features);

std::string shap_matrix_to_csv(const ShapMatrix& s);

}  // namespace shapdag
