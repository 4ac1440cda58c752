#include "shapdag/tune.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "shapdag/error.hpp"

namespace shapdag {

namespace {

// Search grids. Random search samples one value per axis and per candidate.
const int kGbtTrees[] = {50, 100, 200, 300};
const int kGbtDepths[] = {2, 3, 4, 6};
const double kGbtRates[] = {0.03, 0.05, 0.1, 0.3};
const int kGbtMinLeaf[] = {1, 5, 20};

const int kMlpWidths[] = {16, 32, 64};
const double kMlpRates[] = {0.005, 0.01, 0.03};
const int kMlpEpochs[] = {100, 200, 400};
const int kMlpBatches[] = {16, 32, 64};
const double kMlpNoiseSd[] = {0.5, 1.0};

template <typename T, std::size_t N>
T pick(const T (&options)[N], Rng& rng) {
    std::uniform_int_distribution<std::size_t> dist(0, N - 1);
    return options[dist(rng)];
}

struct Split {
    Dataset train;
    Dataset val;
};

Split split_80_20(const Dataset& d, Rng& rng) {
    std::vector<std::size_t> order(d.rows());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t n_train = std::max<std::size_t>(2, (d.rows() * 8) / 10);
    Split s;
    s.train.columns = s.val.columns = d.columns;
    s.train.standardized = s.val.standardized = d.standardized;
    for (std::size_t k = 0; k < d.rows(); ++k) {
        (k < n_train ? s.train : s.val).values.push_back(d.values[order[k]]);
    }
    if (s.val.values.size() < 2) {
        s.val.values = s.train.values;  // degenerate tiny dataset
    }
    return s;
}

double holdout_mse(const std::vector<double>& pred, const std::vector<double>& truth) {
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - truth[i];
        s += e * e;
    }
    return s / static_cast<double>(pred.size());
}

}  // namespace

GbtTuneResult tune_gbt(const Dataset& d, const std::string& target, int budget, Rng& rng) {
    if (budget < 1) throw InputError("tuning budget must be >= 1");
    const Split split = split_80_20(d, rng);
    auto [val_x, names] = feature_matrix(split.val, target);
    (void)names;
    const std::vector<double> val_y = split.val.column(split.val.column_index(target));

    GbtTuneResult best;
    best.best_validation_mse = std::numeric_limits<double>::infinity();
    for (int c = 0; c < budget; ++c) {
        GbtHyperParams hp;
        hp.trees = pick(kGbtTrees, rng);
        hp.max_depth = pick(kGbtDepths, rng);
        hp.learning_rate = pick(kGbtRates, rng);
        hp.min_samples_leaf = pick(kGbtMinLeaf, rng);

        Rng train_rng = make_rng(derive_seed(rng(), 0));
        const GbtModel model = train_gbt(split.train, target, hp, train_rng);
        const double mse = holdout_mse(model.predict(val_x), val_y);
        if (mse < best.best_validation_mse) {
            best.best_validation_mse = mse;
            best.params = hp;
        }
    }
    return best;
}

MlpTuneResult tune_mlp(const Dataset& d, const std::string& target, int budget, Rng& rng) {
    if (budget < 1) throw InputError("tuning budget must be >= 1");
    const Split split = split_80_20(d, rng);
    auto [val_x, names] = feature_matrix(split.val, target);
    (void)names;
    const std::vector<double> val_y = split.val.column(split.val.column_index(target));

    MlpTuneResult best;
    best.best_validation_mse = std::numeric_limits<double>::infinity();
    for (int c = 0; c < budget; ++c) {
        MlpHyperParams hp;
        const int width = pick(kMlpWidths, rng);
        hp.hidden = {width, width};
        hp.learning_rate = pick(kMlpRates, rng);
        hp.epochs = pick(kMlpEpochs, rng);
        hp.batch_size = pick(kMlpBatches, rng);
        hp.noise_sd = pick(kMlpNoiseSd, rng);

        Rng train_rng = make_rng(derive_seed(rng(), 1));
        const MlpModel model = train_mlp(split.train, target, hp, train_rng);
        const double mse = holdout_mse(model.predict(val_x), val_y);
        if (mse < best.best_validation_mse) {
            best.best_validation_mse = mse;
            best.params = hp;
        }
    }
    return best;
}

}  // namespace shapdag
