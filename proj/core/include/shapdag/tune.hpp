#pragma once

#include <string>

#include "shapdag/dataset.hpp"
#include "shapdag/gbt.hpp"
#include "shapdag/mlp.hpp"
#include "shapdag/rng.hpp"

namespace shapdag {

enum class RegressorKind { Gbt, Mlp };

struct GbtTuneResult {
    GbtHyperParams params;
    double best_validation_mse = 0.0;
};

struct MlpTuneResult {
    MlpHyperParams params;
    double best_validation_mse = 0.0;
};

/// Seeded random search over a fixed grid; candidates are drawn as a
/// deterministic sequence from the generator, so a larger budget evaluates a
/// superset of a smaller one. Selection is argmin validation MSE on an
/// 80/20 split (ties keep the earlier candidate).
GbtTuneResult tune_gbt(const Dataset& d, const std::string& target, int budget, Rng& rng);
MlpTuneResult tune_mlp(const Dataset& d, const std::string& target, int budget, Rng& rng);

}  // namespace shapdag
