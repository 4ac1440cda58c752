#include "shapdag/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapdag/error.hpp"

namespace shapdag {

BootstrapPlan bootstrap_plan(int iterations, double miss_probability) {
    if (iterations < 1) throw InputError("bootstrap iterations must be >= 1");
    if (!(miss_probability > 0.0 && miss_probability < 1.0)) {
        throw InputError("miss probability must lie in (0,1)");
    }
    BootstrapPlan plan;
    plan.iterations = iterations;
    plan.miss_probability = miss_probability;
    double c = 1.0 - std::pow(miss_probability, 1.0 / static_cast<double>(iterations));
    plan.fraction = std::clamp(c, 1e-12, 1.0);
    return plan;
}

Dataset sample_rows(const Dataset& d, double fraction, Rng& rng) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InputError("fraction must lie in (0,1]");
    const std::size_t m = d.rows();
    const std::size_t k =
        static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(m)));
    if (k < 2) throw InputError("sampling fraction yields fewer than 2 rows");

    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    // Partial Fisher-Yates: the first k entries are a uniform subset.
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, m - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());

    Dataset out;
    out.columns = d.columns;
    out.standardized = d.standardized;
    out.means = d.means;
    out.sds = d.sds;
    out.values.reserve(k);
    for (std::size_t i : idx) out.values.push_back(d.values[i]);
    return out;
}

}  // namespace shapdag
