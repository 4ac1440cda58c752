#include "shapdag/gbt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shapdag/error.hpp"

namespace shapdag {

namespace {

struct SplitCandidate {
    bool valid = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, const std::vector<std::vector<int>>& sorted_rows,
                const GbtHyperParams& hp)
        : x_(x), sorted_rows_(sorted_rows), hp_(hp) {}

    Tree build(const std::vector<double>& residual) {
        residual_ = &residual;
        in_node_.assign(x_.size(), 0);
        tree_.nodes.clear();
        std::vector<int> rows(x_.size());
        std::iota(rows.begin(), rows.end(), 0);
        grow(rows, 0, 1);
        return std::move(tree_);
    }

private:
    // Node membership epoch: rows with in_node_[r] == epoch belong to the
    // node currently being split.
    int grow(const std::vector<int>& rows, int depth, int epoch) {
        const int node_id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        double sum = 0.0;
        for (int r : rows) sum += (*residual_)[r];
        tree_.nodes[node_id].cover = static_cast<double>(rows.size());
        tree_.nodes[node_id].value = sum / static_cast<double>(rows.size());

        if (depth >= hp_.max_depth ||
            rows.size() < static_cast<std::size_t>(2 * hp_.min_samples_leaf)) {
            return node_id;
        }
        const SplitCandidate split = best_split(rows, epoch, sum);
        if (!split.valid) return node_id;

        std::vector<int> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (int r : rows) {
            if (x_[r][split.feature] <= split.threshold) {
                left_rows.push_back(r);
            } else {
                right_rows.push_back(r);
            }
        }
        tree_.nodes[node_id].feature = split.feature;
        tree_.nodes[node_id].threshold = split.threshold;
        const int left = grow(left_rows, depth + 1, next_epoch());
        tree_.nodes[node_id].left = left;
        const int right = grow(right_rows, depth + 1, next_epoch());
        tree_.nodes[node_id].right = right;
        return node_id;
    }

    int next_epoch() { return ++epoch_counter_; }

    SplitCandidate best_split(const std::vector<int>& rows, int epoch, double total_sum) {
        for (int r : rows) in_node_[r] = epoch;
        const double n = static_cast<double>(rows.size());
        const double parent_score = total_sum * total_sum / n;
        SplitCandidate best;

        const std::size_t p = x_.empty() ? 0 : x_[0].size();
        for (std::size_t f = 0; f < p; ++f) {
            double left_sum = 0.0;
            double left_cnt = 0.0;
            double prev_value = 0.0;
            bool have_prev = false;
            for (int r : sorted_rows_[f]) {
                if (in_node_[r] != epoch) continue;
                const double v = x_[r][f];
                if (have_prev && v > prev_value) {
                    const double right_cnt = n - left_cnt;
                    if (left_cnt >= hp_.min_samples_leaf && right_cnt >= hp_.min_samples_leaf) {
                        const double right_sum = total_sum - left_sum;
                        const double gain = left_sum * left_sum / left_cnt +
                                            right_sum * right_sum / right_cnt - parent_score;
                        if (gain > best.gain + 1e-12) {
                            best.valid = true;
                            best.gain = gain;
                            best.feature = static_cast<int>(f);
                            best.threshold = 0.5 * (prev_value + v);
                        }
                    }
                }
                left_sum += (*residual_)[r];
                left_cnt += 1.0;
                prev_value = v;
                have_prev = true;
            }
        }
        return best;
    }

    const Matrix& x_;
    const std::vector<std::vector<int>>& sorted_rows_;
    const GbtHyperParams& hp_;
    const std::vector<double>* residual_ = nullptr;
    std::vector<int> in_node_;
    Tree tree_;
    int epoch_counter_ = 1;
};

}  // namespace

double Tree::predict(const std::vector<double>& row) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        node = row[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                                 : nodes[node].right;
    }
    return nodes[node].value;
}

double GbtModel::predict_row(const std::vector<double>& row) const {
    if (row.size() != feature_names.size()) {
        throw InputError("prediction row width " + std::to_string(row.size()) +
                         " does not match model feature count " +
                         std::to_string(feature_names.size()));
    }
    double out = base;
    for (const auto& t : trees) out += learning_rate * t.predict(row);
    return out;
}

std::vector<double> GbtModel::predict(const Matrix& rows) const {
    std::vector<double> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) out[i] = predict_row(rows[i]);
    return out;
}

std::pair<Matrix, std::vector<std::string>> feature_matrix(const Dataset& d,
                                                           const std::string& target) {
    const std::size_t t = d.column_index(target);
    std::vector<std::string> names;
    names.reserve(d.cols() - 1);
    for (std::size_t j = 0; j < d.cols(); ++j) {
        if (j != t) names.push_back(d.columns[j]);
    }
    Matrix x(d.rows(), std::vector<double>(d.cols() - 1));
    for (std::size_t i = 0; i < d.rows(); ++i) {
        std::size_t c = 0;
        for (std::size_t j = 0; j < d.cols(); ++j) {
            if (j != t) x[i][c++] = d.values[i][j];
        }
    }
    return {std::move(x), std::move(names)};
}

GbtModel train_gbt(const Dataset& d, const std::string& target, const GbtHyperParams& hp,
                   Rng& rng) {
    (void)rng;
    if (d.rows() < 10) throw InputError("train_gbt needs at least 10 rows");
    if (hp.trees < 0 || hp.max_depth < 1 || hp.max_depth > 12 || hp.learning_rate <= 0.0 ||
        hp.min_samples_leaf < 1) {
        throw InputError("invalid gbt hyperparameters");
    }

    auto [x, names] = feature_matrix(d, target);
    const std::vector<double> y = d.column(d.column_index(target));
    const std::size_t m = y.size();
    const std::size_t p = names.size();

    // Presorted row indices per feature, computed once and filtered per node.
    std::vector<std::vector<int>> sorted_rows(p, std::vector<int>(m));
    for (std::size_t f = 0; f < p; ++f) {
        std::iota(sorted_rows[f].begin(), sorted_rows[f].end(), 0);
        std::stable_sort(sorted_rows[f].begin(), sorted_rows[f].end(),
                         [&x, f](int a, int b) { return x[a][f] < x[b][f]; });
    }

    GbtModel model;
    model.feature_names = names;
    model.target = target;
    model.learning_rate = hp.learning_rate;
    model.base = mean_of(y);

    std::vector<double> residual(m);
    for (std::size_t i = 0; i < m; ++i) residual[i] = y[i] - model.base;

    TreeBuilder builder(x, sorted_rows, hp);
    model.trees.reserve(hp.trees);
    model.training_mse.reserve(hp.trees);
    for (int round = 0; round < hp.trees; ++round) {
        Tree tree = builder.build(residual);
        double mse = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            residual[i] -= hp.learning_rate * tree.predict(x[i]);
            mse += residual[i] * residual[i];
        }
        model.trees.push_back(std::move(tree));
        model.training_mse.push_back(mse / static_cast<double>(m));
    }
    return model;
}

namespace {

nlohmann::json node_to_json(const Tree& tree, int id) {
    const TreeNode& n = tree.nodes[id];
    nlohmann::json j;
    j["cover"] = n.cover;
    if (n.feature < 0) {
        j["value"] = n.value;
    } else {
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = node_to_json(tree, n.left);
        j["right"] = node_to_json(tree, n.right);
    }
    return j;
}

int node_from_json(const nlohmann::json& j, Tree& tree) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[id].cover = j.at("cover").get<double>();
    if (j.contains("feature")) {
        tree.nodes[id].feature = j.at("feature").get<int>();
        tree.nodes[id].threshold = j.at("threshold").get<double>();
        const int left = node_from_json(j.at("left"), tree);
        tree.nodes[id].left = left;
        const int right = node_from_json(j.at("right"), tree);
        tree.nodes[id].right = right;
    } else {
        tree.nodes[id].value = j.at("value").get<double>();
    }
    return id;
}

}  // namespace

nlohmann::json GbtModel::to_json() const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["type"] = "gbt";
    j["target"] = target;
    j["features"] = feature_names;
    j["base"] = base;
    j["learning_rate"] = learning_rate;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& t : trees) arr.push_back(node_to_json(t, 0));
    j["trees"] = std::move(arr);
    return j;
}

GbtModel GbtModel::from_json(const nlohmann::json& j) {
    if (j.at("type").get<std::string>() != "gbt") throw InputError("not a gbt model document");
    GbtModel model;
    model.target = j.at("target").get<std::string>();
    model.feature_names = j.at("features").get<std::vector<std::string>>();
    model.base = j.at("base").get<double>();
    model.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& tj : j.at("trees")) {
        Tree tree;
        node_from_json(tj, tree);
        model.trees.push_back(std::move(tree));
    }
    return model;
}

}  // namespace shapdag
