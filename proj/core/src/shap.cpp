#include "shapdag/shap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "shapdag/error.hpp"
#include "shapdag/parallel.hpp"

namespace shapdag {

double shapley_weight(std::size_t coalition_size, std::size_t n_features) {
    double w = 1.0 / static_cast<double>(n_features);
    // |S|! (n-|S|-1)! / n! = 1 / (n * C(n-1, |S|))
    for (std::size_t i = 1; i <= coalition_size; ++i) {
        w *= static_cast<double>(i) / static_cast<double>(n_features - i);
    }
    return w;
}

std::vector<double> shap_bruteforce(const PredictFn& model, const std::vector<double>& row,
                                    const Matrix& background) {
    const std::size_t p = row.size();
    if (p > 15) throw InputError("shap_bruteforce caps feature count at 15");
    if (background.empty()) throw InputError("shap_bruteforce needs background rows");

    const std::size_t n_masks = std::size_t{1} << p;
    std::vector<double> v(n_masks, 0.0);
    std::vector<double> composite(p);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        double acc = 0.0;
        for (const auto& z : background) {
            for (std::size_t f = 0; f < p; ++f) {
                composite[f] = (mask >> f) & 1 ? row[f] : z[f];
            }
            acc += model(composite);
        }
        v[mask] = acc / static_cast<double>(background.size());
    }

    std::vector<double> weight_by_size(p, 0.0);
    for (std::size_t s = 0; s < p; ++s) weight_by_size[s] = shapley_weight(s, p);

    std::vector<double> phi(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const std::size_t size = static_cast<std::size_t>(std::popcount(mask));
            phi[j] += weight_by_size[size] * (v[mask | bit] - v[mask]);
        }
    }
    return phi;
}

namespace {

/// Weight table for the two-reference recursion:
/// w[a][b] = a! (b - a)! / (b + 1)!.
Matrix recursion_weights(std::size_t max_players) {
    const std::size_t n = max_players + 1;
    Matrix w(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        w[0][j] = 1.0 / static_cast<double>(j + 1);
        w[j][j] = 1.0 / static_cast<double>(j + 1);
        for (std::size_t i = j; i-- > 1;) {
            w[i][j] = w[i + 1][j] * static_cast<double>(j - i) / static_cast<double>(i + 1);
        }
    }
    return w;
}

struct TwoRefState {
    const Tree* tree = nullptr;
    const std::vector<double>* x = nullptr;
    const std::vector<double>* z = nullptr;
    const Matrix* weights = nullptr;
    std::vector<int> in_sx;  // last slot holds |S_X|
    std::vector<int> in_sz;
    std::vector<double> phi;
};

/// Walks one tree for a single (explained, background) pair. Features where
/// the two rows diverge become players; the leaf value is shared across
/// players with exact Shapley weights.
void two_ref_recurse(TwoRefState& st, int node_id) {
    const TreeNode& node = st.tree->nodes[node_id];
    const std::size_t p = st.phi.size();

    if (node.feature < 0) {
        const int nx = st.in_sx[p];
        const int players = nx + st.in_sz[p];
        if (players == 0) return;  // both rows reach this leaf: no attribution
        for (std::size_t f = 0; f < p; ++f) {
            if (st.in_sx[f]) {
                st.phi[f] += (*st.weights)[nx - 1][players - 1] * node.value;
            } else if (st.in_sz[f]) {
                st.phi[f] -= (*st.weights)[nx][players - 1] * node.value;
            }
        }
        return;
    }

    const int f = node.feature;
    const int x_child = (*st.x)[f] <= node.threshold ? node.left : node.right;
    const int z_child = (*st.z)[f] <= node.threshold ? node.left : node.right;

    if (x_child == z_child) {
        two_ref_recurse(st, x_child);
        return;
    }
    if (st.in_sx[f]) {
        two_ref_recurse(st, x_child);
        return;
    }
    if (st.in_sz[f]) {
        two_ref_recurse(st, z_child);
        return;
    }
    st.in_sx[f] += 1;
    st.in_sx[p] += 1;
    two_ref_recurse(st, x_child);
    st.in_sx[f] -= 1;
    st.in_sx[p] -= 1;

    st.in_sz[f] += 1;
    st.in_sz[p] += 1;
    two_ref_recurse(st, z_child);
    st.in_sz[f] -= 1;
    st.in_sz[p] -= 1;
}

void validate_covers(const GbtModel& model) {
    for (const auto& tree : model.trees) {
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) continue;
            const double child_sum =
                tree.nodes[node.left].cover + tree.nodes[node.right].cover;
            if (std::abs(node.cover - child_sum) > 1e-6 * std::max(1.0, node.cover)) {
                throw NumericError("malformed tree: node cover " + std::to_string(node.cover) +
                                   " != children sum " + std::to_string(child_sum));
            }
        }
    }
}

}  // namespace

ShapMatrix shap_tree(const GbtModel& model, const Matrix& rows, const Matrix& background,
                     int jobs) {
    if (rows.empty()) throw InputError("shap_tree needs explained rows");
    if (background.empty()) throw InputError("shap_tree needs background rows");
    validate_covers(model);

    const std::size_t p = model.feature_names.size();
    ShapMatrix out;
    out.target = model.target;
    out.features = model.feature_names;
    out.values.assign(rows.size(), std::vector<double>(p, 0.0));

    double base_acc = 0.0;
    for (const auto& z : background) base_acc += model.predict_row(z);
    out.baseline = base_acc / static_cast<double>(background.size());

    const Matrix weights = recursion_weights(p + 1);
    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        TwoRefState st;
        st.weights = &weights;
        st.x = &rows[k];
        st.in_sx.assign(p + 1, 0);
        st.in_sz.assign(p + 1, 0);
        st.phi.assign(p, 0.0);
        for (const auto& z : background) {
            st.z = &z;
            for (const auto& tree : model.trees) {
                st.tree = &tree;
                two_ref_recurse(st, 0);
            }
        }
        const double scale = model.learning_rate / static_cast<double>(background.size());
        for (std::size_t f = 0; f < p; ++f) out.values[k][f] = st.phi[f] * scale;
    });
    return out;
}

ShapMatrix shap_gradient(const MlpModel& model, const Matrix& rows, const Matrix& background,
                         int n_samples, Rng& rng, int jobs) {
    if (rows.empty()) throw InputError("shap_gradient needs explained rows");
    if (background.empty()) throw InputError("shap_gradient needs background rows");
    if (n_samples < 1) throw InputError("shap_gradient needs n_samples >= 1");

    const std::size_t p = model.observed_features();
    ShapMatrix out;
    out.target = model.target;
    out.features = model.feature_names;
    out.values.assign(rows.size(), std::vector<double>(p, 0.0));

    double base_acc = 0.0;
    for (const auto& z : background) base_acc += model.predict_row(z);
    out.baseline = base_acc / static_cast<double>(background.size());

    std::vector<std::uint64_t> row_seeds(rows.size());
    for (auto& s : row_seeds) s = rng();

    // Every reference row is visited the same number of times, with only the
    // path position drawn at random. A constant gradient then integrates to
    // w_j * (x_j - mean background), exactly, for any sample budget. Path
    // positions are stratified across the passes of one reference, which
    // keeps each alpha marginally uniform while shrinking the quadrature
    // variance along the path.
    const std::size_t passes =
        (static_cast<std::size_t>(n_samples) + background.size() - 1) / background.size();

    parallel_for(rows.size(), jobs, [&](std::size_t k) {
        Rng local = make_rng(row_seeds[k]);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<double> point(p + 1, 0.0);
        std::vector<double> acc(p, 0.0);
        for (std::size_t pass = 0; pass < passes; ++pass) {
            for (const auto& z : background) {
                const double alpha =
                    (static_cast<double>(pass) + unit(local)) / static_cast<double>(passes);
                for (std::size_t f = 0; f < p; ++f) {
                    point[f] = z[f] + alpha * (rows[k][f] - z[f]);
                }
                point[p] = 0.0;  // noise input pinned at 0 along the path
                const std::vector<double> grad = model.input_gradient(point);
                for (std::size_t f = 0; f < p; ++f) {
                    if (!std::isfinite(grad[f])) {
                        throw NumericError("shap_gradient: non-finite model gradient");
                    }
                    acc[f] += (rows[k][f] - z[f]) * grad[f];
                }
            }
        }
        const double total = static_cast<double>(passes * background.size());
        for (std::size_t f = 0; f < p; ++f) {
            out.values[k][f] = acc[f] / total;
        }
    });
    return out;
}

ImportanceVector importance(const ShapMatrix& s) {
    if (s.values.empty()) throw InputError("importance needs at least one explained row");
    ImportanceVector out;
    out.features = s.features;
    out.scores.assign(s.features.size(), 0.0);
    for (const auto& row : s.values) {
        for (std::size_t f = 0; f < row.size(); ++f) out.scores[f] += std::abs(row[f]);
    }
    for (auto& v : out.scores) v /= static_cast<double>(s.values.size());
    return out;
}

double shap_discrepancy(const std::vector<double>& target_values,
                        const std::vector<double>& phi_column) {
    if (target_values.size() != phi_column.size() || target_values.size() < 2) {
        throw InputError("shap_discrepancy needs two equal-length columns, m >= 2");
    }
    const double mean = mean_of(target_values);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < target_values.size(); ++k) {
        const double d = target_values[k] - phi_column[k];
        const double c = target_values[k] - mean;
        num += d * d;
        den += c * c;
    }
    if (den <= 0.0) throw InputError("shap_discrepancy: zero-variance target");
    return num / den;
}

std::string shap_matrix_to_csv(const ShapMatrix& s) {
    std::ostringstream out;
    for (std::size_t f = 0; f < s.features.size(); ++f) {
        if (f) out << ',';
        out << s.features[f];
    }
    out << '\n';
    char buf[64];
    for (const auto& row : s.values) {
        for (std::size_t f = 0; f < row.size(); ++f) {
            if (f) out << ',';
            std::snprintf(buf, sizeof(buf), "%.17g", row[f]);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace shapdag
