#pragma once

#include <string>
#include <vector>

#include "shapdag/dataset.hpp"
#include "shapdag/rng.hpp"

#include "json.hpp"

namespace shapdag {

/// One node of a regression tree. Internal nodes carry a split, leaves a
/// value. `cover` is the training-row count reaching the node; an internal
/// node's cover always equals the sum of its children's covers.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
    double cover = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root

    double predict(const std::vector<double>& row) const;
};

struct GbtHyperParams {
    int trees = 200;
    int max_depth = 4;
    double learning_rate = 0.05;
    int min_samples_leaf = 1;
};

/// Least-squares gradient boosting: prediction = base + lr * sum of trees.
struct GbtModel {
    std::vector<std::string> feature_names;
    std::string target;
    double base = 0.0;
    double learning_rate = 0.0;
    std::vector<Tree> trees;
    std::vector<double> training_mse;  // after each boosting round

    double predict_row(const std::vector<double>& row) const;
    std::vector<double> predict(const Matrix& rows) const;

    nlohmann::json to_json() const;
    static GbtModel from_json(const nlohmann::json& j);
};

/// Fits one tree per round to the residual of the running prediction, with
/// exact greedy variance-reduction splits. The rng parameter is part of the
/// common regressor signature; the fit itself is deterministic.
GbtModel train_gbt(const Dataset& d, const std::string& target, const GbtHyperParams& hp,
                   Rng& rng);

/// Feature matrix for predicting `target`: all other columns, in dataset
/// order, plus the names used.
std::pair<Matrix, std::vector<std::string>> feature_matrix(const Dataset& d,
                                                           const std::string& target);

}  // namespace shapdag
