#include "shapdag/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "shapdag/error.hpp"

namespace shapdag {

std::vector<int> dbscan_1d(const std::vector<double>& values, double eps, int min_pts) {
    if (values.empty()) throw InputError("dbscan_1d: empty input");
    if (!(eps > 0.0)) throw InputError("dbscan_1d: eps must be > 0");
    if (min_pts < 1) throw InputError("dbscan_1d: min_pts must be >= 1");

    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    // Neighborhood counts (inclusive of the point itself) via two pointers
    // over the sorted values.
    std::vector<int> nbr(n, 0);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = values[order[i]];
        while (values[order[lo]] < v - eps) ++lo;
        if (hi < i) hi = i;
        while (hi + 1 < n && values[order[hi + 1]] <= v + eps) ++hi;
        nbr[i] = static_cast<int>(hi - lo + 1);
    }

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) core[i] = nbr[i] >= min_pts;

    std::vector<int> labels(n, -1);
    int next_label = 0;
    // In one dimension, core connectivity reduces to chaining consecutive
    // core points whose gap is <= eps.
    std::ptrdiff_t last_core = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i]) continue;
        int label;
        if (last_core >= 0 &&
            values[order[i]] - values[order[last_core]] <= eps) {
            label = labels[order[last_core]];
        } else {
            label = next_label++;
        }
        labels[order[i]] = label;
        last_core = static_cast<std::ptrdiff_t>(i);
    }
    // Border points join the cluster of the nearest core point within eps
    // (ties go to the lower value): a fixed, order-independent rule.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        const double v = values[order[i]];
        double best_dist = eps;
        int best_label = -1;
        for (std::size_t j = i; j-- > 0;) {
            if (v - values[order[j]] > eps) break;
            if (core[j]) {
                best_dist = v - values[order[j]];
                best_label = labels[order[j]];
                break;
            }
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            if (values[order[j]] - v > eps) break;
            if (core[j]) {
                if (values[order[j]] - v < best_dist) best_label = labels[order[j]];
                break;
            }
        }
        labels[order[i]] = best_label;
    }
    return labels;
}

std::vector<std::string> select_parents(const ImportanceVector& imp,
                                        const SelectionConfig& cfg) {
    const std::size_t n = imp.scores.size();
    if (n < 2) throw InputError("select_parents needs at least 2 candidate features");
    if (cfg.greedy) return select_parents_greedy(imp, cfg.greedy_percentile);

    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            dists.push_back(std::abs(imp.scores[i] - imp.scores[j]));
        }
    }
    std::sort(dists.begin(), dists.end(), std::greater<>());

    auto pick_best_cluster = [&](const std::vector<int>& labels) {
        std::map<int, std::pair<double, int>> sums;  // label -> (sum, count)
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] < 0) continue;
            auto& s = sums[labels[i]];
            s.first += imp.scores[i];
            s.second += 1;
        }
        int best = -1;
        double best_mean = -1.0;
        double best_max = -1.0;
        for (const auto& [label, s] : sums) {
            const double mean = s.first / s.second;
            double mx = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (labels[i] == label) mx = std::max(mx, imp.scores[i]);
            }
            if (mean > best_mean + 1e-15 ||
                (std::abs(mean - best_mean) <= 1e-15 && mx > best_max)) {
                best = label;
                best_mean = mean;
                best_max = mx;
            }
        }
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == best) members.push_back(i);
        }
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            if (imp.scores[a] != imp.scores[b]) return imp.scores[a] > imp.scores[b];
            return imp.features[a] < imp.features[b];
        });
        std::vector<std::string> out;
        out.reserve(members.size());
        for (std::size_t i : members) out.push_back(imp.features[i]);
        return out;
    };

    std::size_t next_dist = 0;
    double zeta = dists.front() + cfg.zeta_constant;
    bool exhausted_pass_done = false;
    while (true) {
        if (zeta <= 0.0) return {};
        const std::vector<int> labels = dbscan_1d(imp.scores, zeta, cfg.min_pts);
        int n_clusters = 0;
        for (int l : labels) n_clusters = std::max(n_clusters, l + 1);
        if (n_clusters == 0) return {};  // everything labeled noise
        if (n_clusters > 1) return pick_best_cluster(labels);
        if (exhausted_pass_done) return {};  // single cluster even at the floor radius
        ++next_dist;
        if (next_dist < dists.size()) {
            zeta = dists[next_dist] + cfg.zeta_constant;
        } else {
            zeta = cfg.zeta_constant;
            exhausted_pass_done = true;
        }
    }
}

std::vector<std::string> select_parents_greedy(const ImportanceVector& imp,
                                               double percentile) {
    if (!(percentile > 0.0 && percentile < 100.0)) {
        throw InputError("greedy percentile must lie in (0,100)");
    }
    std::vector<double> sorted = imp.scores;
    std::sort(sorted.begin(), sorted.end());
    // Linear-interpolation percentile over the sorted importances.
    const double rank = percentile / 100.0 * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = rank - std::floor(rank);
    const double cutoff = sorted[lo] * (1.0 - frac) + sorted[hi] * frac;

    std::vector<std::size_t> selected;
    for (std::size_t i = 0; i < imp.scores.size(); ++i) {
        if (imp.scores[i] > cutoff) selected.push_back(i);
    }
    std::sort(selected.begin(), selected.end(), [&](std::size_t a, std::size_t b) {
        if (imp.scores[a] != imp.scores[b]) return imp.scores[a] > imp.scores[b];
        return imp.features[a] < imp.features[b];
    });
    std::vector<std::string> out;
    out.reserve(selected.size());
    for (std::size_t i : selected) out.push_back(imp.features[i]);
    return out;
}

}  // namespace shapdag
