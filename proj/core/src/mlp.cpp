#include "shapdag/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapdag/error.hpp"
#include "shapdag/gbt.hpp"  // feature_matrix

namespace shapdag {

namespace {

/// Unrolled dot product; four accumulators break the FP add latency chain.
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

/// Forward pass keeping post-activation outputs per layer for backprop.
void forward_pass(const MlpModel& m, const std::vector<double>& input,
                  std::vector<std::vector<double>>& activations) {
    activations.resize(m.weights.size() + 1);
    activations[0] = input;
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        const Matrix& w = m.weights[l];
        const std::vector<double>& in = activations[l];
        std::vector<double>& out = activations[l + 1];
        out.assign(w.size(), 0.0);
        const bool last = l + 1 == m.weights.size();
        for (std::size_t o = 0; o < w.size(); ++o) {
            const double s = m.biases[l][o] + dot(w[o], in);
            out[o] = last ? s : std::tanh(s);
        }
    }
}

}  // namespace

double MlpModel::forward(const std::vector<double>& full_input) const {
    if (full_input.size() != input_dim()) throw InputError("mlp input width mismatch");
    std::vector<std::vector<double>> acts;
    forward_pass(*this, full_input, acts);
    return acts.back()[0];
}

double MlpModel::predict_row(const std::vector<double>& observed) const {
    if (observed.size() != observed_features()) {
        throw InputError("prediction row width " + std::to_string(observed.size()) +
                         " does not match model feature count " +
                         std::to_string(observed_features()));
    }
    std::vector<double> full = observed;
    full.push_back(0.0);
    return forward(full);
}

std::vector<double> MlpModel::predict(const Matrix& rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_row(rows[i]);
    return out;
}

std::vector<double> MlpModel::input_gradient(const std::vector<double>& full_input) const {
    std::vector<std::vector<double>> acts;
    forward_pass(*this, full_input, acts);
    // Backpropagate d(output)/d(input); delta over post-activation units.
    std::vector<double> delta{1.0};
    for (std::size_t l = weights.size(); l-- > 0;) {
        const Matrix& w = weights[l];
        const std::vector<double>& in = acts[l];
        std::vector<double> prev(in.size(), 0.0);
        for (std::size_t o = 0; o < w.size(); ++o) {
            // The output layer is linear; hidden activations are tanh whose
            // derivative is 1 - a^2 with a the stored post-activation.
            const double d = (l + 1 == weights.size())
                                 ? delta[o]
                                 : delta[o] * (1.0 - acts[l + 1][o] * acts[l + 1][o]);
            for (std::size_t i = 0; i < in.size(); ++i) prev[i] += d * w[o][i];
        }
        delta = std::move(prev);
    }
    return delta;
}

MlpGradients mlp_loss_and_gradients(const MlpModel& model, const Matrix& full_inputs,
                                    const std::vector<double>& targets) {
    MlpGradients g;
    g.weight_grads.resize(model.weights.size());
    g.bias_grads.resize(model.weights.size());
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        g.weight_grads[l].assign(model.weights[l].size(),
                                 std::vector<double>(model.weights[l][0].size(), 0.0));
        g.bias_grads[l].assign(model.biases[l].size(), 0.0);
    }

    const double scale = 1.0 / static_cast<double>(full_inputs.size());
    std::vector<std::vector<double>> acts;
    for (std::size_t k = 0; k < full_inputs.size(); ++k) {
        forward_pass(model, full_inputs[k], acts);
        const double err = acts.back()[0] - targets[k];
        g.loss += err * err * scale;

        std::vector<double> delta{2.0 * err * scale};
        for (std::size_t l = model.weights.size(); l-- > 0;) {
            const Matrix& w = model.weights[l];
            const std::vector<double>& in = acts[l];
            std::vector<double> prev(in.size(), 0.0);
            for (std::size_t o = 0; o < w.size(); ++o) {
                const double d = (l + 1 == model.weights.size())
                                     ? delta[o]
                                     : delta[o] * (1.0 - acts[l + 1][o] * acts[l + 1][o]);
                g.bias_grads[l][o] += d;
                for (std::size_t i = 0; i < in.size(); ++i) {
                    g.weight_grads[l][o][i] += d * in[i];
                    prev[i] += d * w[o][i];
                }
            }
            delta = std::move(prev);
        }
    }
    return g;
}

MlpModel train_mlp(const Dataset& d, const std::string& target, const MlpHyperParams& hp,
                   Rng& rng) {
    if (d.rows() < 10) throw InputError("train_mlp needs at least 10 rows");
    if (hp.learning_rate <= 0.0 || hp.epochs < 0 || hp.batch_size < 1 || hp.noise_sd < 0.0 ||
        hp.hidden.empty()) {
        throw InputError("invalid mlp hyperparameters");
    }

    auto [x, names] = feature_matrix(d, target);
    const std::vector<double> y = d.column(d.column_index(target));
    const std::size_t m = y.size();

    MlpModel model;
    model.feature_names = names;
    model.target = target;
    model.noise_sd = hp.noise_sd;

    std::vector<std::size_t> sizes{names.size() + 1};
    for (int h : hp.hidden) sizes.push_back(static_cast<std::size_t>(h));
    sizes.push_back(1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const double scale = std::sqrt(1.0 / static_cast<double>(sizes[l]));
        Matrix w(sizes[l + 1], std::vector<double>(sizes[l]));
        for (auto& row : w) {
            for (auto& v : row) v = scale * gauss(rng);
        }
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(sizes[l + 1], 0.0);
    }

    // 80/20 train/validation split.
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_train = std::max<std::size_t>(1, (m * 8) / 10);
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> val_idx(order.begin() + n_train, order.end());

    Matrix batch;
    std::vector<double> batch_y;
    for (int epoch = 0; epoch < hp.epochs; ++epoch) {
        std::shuffle(train_idx.begin(), train_idx.end(), rng);
        for (std::size_t start = 0; start < train_idx.size();
             start += static_cast<std::size_t>(hp.batch_size)) {
            const std::size_t end =
                std::min(train_idx.size(), start + static_cast<std::size_t>(hp.batch_size));
            batch.clear();
            batch_y.clear();
            for (std::size_t k = start; k < end; ++k) {
                std::vector<double> input = x[train_idx[k]];
                input.push_back(hp.noise_sd * gauss(rng));  // fresh noise each step
                batch.push_back(std::move(input));
                batch_y.push_back(y[train_idx[k]]);
            }
            const MlpGradients g = mlp_loss_and_gradients(model, batch, batch_y);
            if (!std::isfinite(g.loss)) {
                throw NumericError("mlp training diverged: non-finite loss at epoch " +
                                   std::to_string(epoch));
            }
            for (std::size_t l = 0; l < model.weights.size(); ++l) {
                for (std::size_t o = 0; o < model.weights[l].size(); ++o) {
                    model.biases[l][o] -= hp.learning_rate * g.bias_grads[l][o];
                    for (std::size_t i = 0; i < model.weights[l][o].size(); ++i) {
                        model.weights[l][o][i] -= hp.learning_rate * g.weight_grads[l][o][i];
                    }
                }
            }
        }
    }

    double val_mse = 0.0;
    const auto& eval_idx = val_idx.empty() ? train_idx : val_idx;
    for (std::size_t k : eval_idx) {
        const double err = model.predict_row(x[k]) - y[k];
        val_mse += err * err;
    }
    model.validation_mse = val_mse / static_cast<double>(eval_idx.size());
    return model;
}

nlohmann::json MlpModel::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["type"] = "mlp";
    j["target"] = target;
    j["features"] = feature_names;
    j["noise_sd"] = noise_sd;
    j["validation_mse"] = validation_mse;
    nlohmann::json layers = nlohmann::json::array();
    for (std::size_t l = 0; l < weights.size(); ++l) {
        nlohmann::json layer;
        layer["shape"] = {weights[l].size(), weights[l][0].size()};
        layer["weights"] = weights[l];
        layer["biases"] = biases[l];
        layers.push_back(std::move(layer));
    }
    j["layers"] = std::move(layers);
    return j;
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "mlp") throw InputError("not an mlp model document");
    MlpModel model;
    model.target = j.at("target").get<std::string>();
    model.feature_names = j.at("features").get<std::vector<std::string>>();
    model.noise_sd = j.at("noise_sd").get<double>();
    model.validation_mse = j.value("validation_mse", 0.0);
    for (const auto& layer : j.at("layers")) {
        model.weights.push_back(layer.at("weights").get<Matrix>());
        model.biases.push_back(layer.at("biases").get<std::vector<double>>());
    }
    return model;
}

}  // namespace shapdag
