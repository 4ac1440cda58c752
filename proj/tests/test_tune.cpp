#include <cmath>

#include "doctest.h"
#include "shapdag/error.hpp"
#include "shapdag/tune.hpp"

using namespace shapdag;

namespace {

Dataset cubic_dataset(std::size_t m, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix values(m, std::vector<double>(3));
    for (auto& row : values) {
        const double x = gauss(rng);
        row = {x, gauss(rng), x * x * x + 0.1 * gauss(rng)};
    }
    return make_dataset({"x", "junk", "y"}, values);
}

}  // namespace

TEST_CASE("budget one returns the single sampled configuration") {
    Rng data_rng = make_rng(1);
    const Dataset d = cubic_dataset(200, data_rng);
    Rng a = make_rng(2), b = make_rng(2);
    const GbtTuneResult r1 = tune_gbt(d, "y", 1, a);
    const GbtTuneResult r2 = tune_gbt(d, "y", 1, b);
    CHECK(r1.params.trees == r2.params.trees);
    CHECK(r1.params.max_depth == r2.params.max_depth);
    CHECK(r1.best_validation_mse == doctest::Approx(r2.best_validation_mse));
}

TEST_CASE("larger budgets never lose to a prefix of the same sequence") {
    Rng data_rng = make_rng(3);
    const Dataset d = cubic_dataset(200, data_rng);
    double previous = 1e300;
    for (int budget : {1, 2, 4, 8}) {
        Rng rng = make_rng(17);
        const GbtTuneResult r = tune_gbt(d, "y", budget, rng);
        CHECK(r.best_validation_mse <= previous + 1e-12);
        previous = r.best_validation_mse;
    }
}

TEST_CASE("selected gbt beats a stump baseline on cubic data") {
    Rng data_rng = make_rng(4);
    const Dataset train = cubic_dataset(400, data_rng);
    const Dataset fresh = cubic_dataset(300, data_rng);  // independent holdout
    Rng rng = make_rng(5);
    const GbtTuneResult tuned = tune_gbt(train, "y", 8, rng);

    Rng fit_rng = make_rng(6);
    const GbtModel best = train_gbt(train, "y", tuned.params, fit_rng);
    const GbtModel stump = train_gbt(
        train, "y", {.trees = 5, .max_depth = 1, .learning_rate = 0.1, .min_samples_leaf = 1},
        fit_rng);

    const auto [x, names] = feature_matrix(fresh, "y");
    (void)names;
    const std::vector<double> truth = fresh.column(fresh.column_index("y"));
    auto mse = [&](const std::vector<double>& pred) {
        double s = 0.0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
        }
        return s / static_cast<double>(pred.size());
    };
    CHECK(mse(best.predict(x)) < mse(stump.predict(x)));
}

TEST_CASE("mlp tuning respects budgets and stays deterministic") {
    Rng data_rng = make_rng(7);
    const Dataset d = cubic_dataset(120, data_rng);
    Rng a = make_rng(8), b = make_rng(8);
    const MlpTuneResult r1 = tune_mlp(d, "y", 2, a);
    const MlpTuneResult r2 = tune_mlp(d, "y", 2, b);
    CHECK(r1.params.epochs == r2.params.epochs);
    CHECK(r1.best_validation_mse == doctest::Approx(r2.best_validation_mse));
    CHECK_THROWS_AS(tune_mlp(d, "y", 0, a), InputError);
}
