#pragma once

#include <string>
#include <vector>

#include "shapdag/dataset.hpp"
#include "shapdag/rng.hpp"

#include "json.hpp"

namespace shapdag {

struct MlpHyperParams {
    std::vector<int> hidden{64, 64};
    double learning_rate = 0.02;
    int epochs = 200;
    int batch_size = 32;
    double noise_sd = 1.0;  // sigma of the auxiliary noise input
};

/// Feed-forward network with tanh hidden layers and a linear output. The
/// input layout is the observed features followed by one auxiliary noise
/// feature, resampled at every training step so the deterministic network
/// can absorb the stochastic part of the structural equation. Inference
/// fixes the noise input at 0 (conditional-mean reading).
struct MlpModel {
    std::vector<std::string> feature_names;  // observed features only
    std::string target;
    double noise_sd = 1.0;
    std::vector<Matrix> weights;             // weights[l][out][in]
    std::vector<std::vector<double>> biases;
    double validation_mse = 0.0;

    std::size_t observed_features() const { return feature_names.size(); }
    std::size_t input_dim() const { return feature_names.size() + 1; }

    /// Forward pass on a full input vector (observed features + noise).
    double forward(const std::vector<double>& full_input) const;
    /// Prediction with the noise input fixed at 0.
    double predict_row(const std::vector<double>& observed) const;
    std::vector<double> predict(const Matrix& rows) const;
    /// Gradient of the output with respect to each input (observed + noise).
    std::vector<double> input_gradient(const std::vector<double>& full_input) const;

    nlohmann::json to_json() const;
    static MlpModel from_json(const nlohmann::json& j);
};

MlpModel train_mlp(const Dataset& d, const std::string& target, const MlpHyperParams& hp,
                   Rng& rng);

/// Mean squared error and parameter gradients on one batch, with the noise
/// inputs supplied explicitly. Exposed so gradients can be checked against
/// finite differences.
struct MlpGradients {
    double loss = 0.0;
    std::vector<Matrix> weight_grads;
    std::vector<std::vector<double>> bias_grads;
};
MlpGradients mlp_loss_and_gradients(const MlpModel& model, const Matrix& full_inputs,
                                    const std::vector<double>& targets);

}  // namespace shapdag
