#include "shapdag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shapdag/error.hpp"
#include "shapdag/linalg.hpp"

namespace shapdag {

namespace {

/// Draws one sample of a zero-mean Gaussian process with RBF kernel at the
/// given (possibly multivariate) inputs. Jitter keeps the Gram matrix
/// positive definite when inputs nearly coincide.
std::vector<double> sample_gp(const std::vector<std::vector<double>>& inputs,
                              double bandwidth, double jitter, Rng& rng) {
    const std::size_t n = inputs.size();
    Matrix gram(n, std::vector<double>(n, 0.0));
    const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < inputs[i].size(); ++k) {
                const double d = inputs[i][k] - inputs[j][k];
                d2 += d * d;
            }
            gram[i][j] = gram[j][i] = std::exp(-d2 * inv);
        }
        gram[i][i] += jitter;
    }
    const Matrix l = cholesky(gram);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(n);
    for (auto& v : z) v = gauss(rng);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += l[i][j] * z[j];
        out[i] = s;
    }
    return out;
}

std::vector<std::string> default_names(int p) {
    std::vector<std::string> names(p);
    for (int i = 0; i < p; ++i) names[i] = "V" + std::to_string(i);
    return names;
}

/// Root-cause sampler: a randomized four-component Gaussian mixture per
/// node. Root distributions carry the non-Gaussian signal that makes
/// downstream additive-noise orientation identifiable; structural noise on
/// non-root nodes stays Gaussian.
std::vector<double> sample_gmm_cause(std::size_t m, Rng& rng) {
    constexpr int components = 4;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double means[components], sds[components], weights[components];
    double total = 0.0;
    for (int c = 0; c < components; ++c) {
        means[c] = 2.0 * gauss(rng);
        sds[c] = std::sqrt(std::abs(2.0 * gauss(rng) + 1.0));
        weights[c] = unit(rng);
        total += weights[c];
    }
    std::vector<double> out(m);
    for (auto& v : out) {
        double pick = unit(rng) * total;
        int c = 0;
        while (c + 1 < components && pick > weights[c]) {
            pick -= weights[c];
            ++c;
        }
        v = means[c] + sds[c] * gauss(rng);
    }
    return out;
}

}  // namespace

MechanismFamily parse_family(const std::string& name) {
    if (name == "linear") return MechanismFamily::Linear;
    if (name == "polynomial") return MechanismFamily::Polynomial;
    if (name == "gp-add") return MechanismFamily::GpAdditive;
    if (name == "gp-mix") return MechanismFamily::GpMix;
    if (name == "sigmoid-mix") return MechanismFamily::SigmoidMix;
    throw InputError("unknown mechanism family: " + name);
}

std::string family_name(MechanismFamily f) {
    switch (f) {
        case MechanismFamily::Linear: return "linear";
        case MechanismFamily::Polynomial: return "polynomial";
        case MechanismFamily::GpAdditive: return "gp-add";
        case MechanismFamily::GpMix: return "gp-mix";
        case MechanismFamily::SigmoidMix: return "sigmoid-mix";
    }
    return "unknown";
}

Dag sample_dag(int p, int max_parents, Rng& rng) {
    if (p < 2) throw InputError("sample_dag needs p >= 2");
    if (max_parents < 0) throw InputError("max_parents must be >= 0");

    std::vector<int> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    std::set<std::pair<int, int>> edges;
    for (int pos = 1; pos < p; ++pos) {
        const int cap = std::min(max_parents, pos);
        std::uniform_int_distribution<int> count(0, cap);
        const int k = count(rng);
        std::vector<int> preds(order.begin(), order.begin() + pos);
        std::shuffle(preds.begin(), preds.end(), rng);
        for (int c = 0; c < k; ++c) edges.insert({preds[c], order[pos]});
    }
    return make_dag(default_names(p), std::move(edges));
}

Dataset generate_sem(const Dag& g, MechanismFamily family, std::size_t m, Rng& rng,
                     const MechanismParams& params) {
    if (m < 2) throw InputError("generate_sem needs m >= 2");
    const int p = static_cast<int>(g.nodes.size());
    const auto order = topological_sort(g);
    if (!order) throw InputError("generate_sem requires an acyclic graph");

    std::uniform_real_distribution<double> mu_dist(-2.0, 2.0);
    // U(0, 0.4) draws the noise VARIANCE per node.
    std::uniform_real_distribution<double> var_dist(0.0, 0.4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    Matrix cols(p, std::vector<double>(m, 0.0));
    for (int node : *order) {
        std::vector<int> parents = g.parents(node);
        std::sort(parents.begin(), parents.end());
        if (parents.empty()) {
            cols[node] = sample_gmm_cause(m, rng);
            continue;
        }
        const double mu = mu_dist(rng);
        const double sigma = std::sqrt(var_dist(rng));
        std::vector<double> noise(m);
        for (auto& e : noise) e = mu + sigma * gauss(rng);

        std::vector<double>& out = cols[node];
        switch (family) {
            case MechanismFamily::Linear: {
                for (std::size_t k = 0; k < m; ++k) out[k] = noise[k];
                for (int pa : parents) {
                    const double a = gauss(rng);
                    for (std::size_t k = 0; k < m; ++k) out[k] += a * cols[pa][k];
                }
                break;
            }
            case MechanismFamily::Polynomial: {
                const int d = params.polynomial_degree;
                if (d < 1) throw InputError("polynomial degree must be >= 1");
                for (std::size_t k = 0; k < m; ++k) out[k] = noise[k];
                for (int pa : parents) {
                    const double c = gauss(rng);
                    for (std::size_t k = 0; k < m; ++k) {
                        out[k] += c * std::pow(cols[pa][k], d);
                    }
                }
                break;
            }
            case MechanismFamily::GpAdditive: {
                for (std::size_t k = 0; k < m; ++k) out[k] = noise[k];
                for (int pa : parents) {
                    std::vector<std::vector<double>> inputs(m, std::vector<double>(1));
                    for (std::size_t k = 0; k < m; ++k) inputs[k][0] = cols[pa][k];
                    const std::vector<double> f =
                        sample_gp(inputs, params.gp_bandwidth, params.gp_jitter, rng);
                    for (std::size_t k = 0; k < m; ++k) out[k] += f[k];
                }
                break;
            }
            case MechanismFamily::GpMix: {
                // Noise enters the GP as an extra input dimension.
                std::vector<std::vector<double>> inputs(
                    m, std::vector<double>(parents.size() + 1));
                for (std::size_t k = 0; k < m; ++k) {
                    for (std::size_t pi = 0; pi < parents.size(); ++pi) {
                        inputs[k][pi] = cols[parents[pi]][k];
                    }
                    inputs[k][parents.size()] = noise[k];
                }
                out = sample_gp(inputs, params.gp_bandwidth, params.gp_jitter, rng);
                break;
            }
            case MechanismFamily::SigmoidMix: {
                std::exponential_distribution<double> expo(0.25);  // mean 4
                const double a = expo(rng) + 1.0;
                const double mag = 0.5 + 1.5 * unit(rng);
                const double b = unit(rng) < 0.5 ? -mag : mag;
                const double c = -2.0 + 4.0 * unit(rng);
                for (std::size_t k = 0; k < m; ++k) {
                    double sum = 0.0;
                    for (int pa : parents) sum += cols[pa][k];
                    const double t = b * (sum + c);
                    out[k] = a * t / (1.0 + std::abs(t)) + noise[k];
                }
                break;
            }
        }
    }

    Matrix values(m, std::vector<double>(p, 0.0));
    for (int j = 0; j < p; ++j) {
        for (std::size_t k = 0; k < m; ++k) values[k][j] = cols[j][k];
    }
    return standardize(make_dataset(g.nodes, std::move(values)));
}

ValidationKind parse_validation_kind(const std::string& name) {
    if (name == "confounder") return ValidationKind::Confounder;
    if (name == "chain") return ValidationKind::Chain;
    if (name == "collider") return ValidationKind::Collider;
    if (name == "collinear") return ValidationKind::Collinear;
    throw InputError("unknown validation structure: " + name);
}

std::string validation_kind_name(ValidationKind k) {
    switch (k) {
        case ValidationKind::Confounder: return "confounder";
        case ValidationKind::Chain: return "chain";
        case ValidationKind::Collider: return "collider";
        case ValidationKind::Collinear: return "collinear";
    }
    return "unknown";
}

ValidationData generate_validation(ValidationKind kind, std::size_t n, double noise_sd,
                                   Rng& rng) {
    if (n < 10) throw InputError("generate_validation needs n >= 10");
    if (noise_sd < 0.0) throw InputError("noise sd must be >= 0");
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto root = [&]() { return gauss(rng); };
    auto eps = [&]() { return noise_sd * gauss(rng); };

    ValidationData out;
    out.target = "Y";
    Matrix values(n);

    switch (kind) {
        case ValidationKind::Confounder: {
            // Z -> X, Z -> Y
            for (std::size_t k = 0; k < n; ++k) {
                const double z = root();
                const double x = z + eps();
                const double y = z + eps();
                values[k] = {x, z, y};
            }
            out.data = make_dataset({"X", "Z", "Y"}, std::move(values));
            out.truth = make_dag({"X", "Z", "Y"}, {{1, 0}, {1, 2}});
            out.features = {"X", "Z"};
            break;
        }
        case ValidationKind::Chain: {
            // X -> Z -> Y
            for (std::size_t k = 0; k < n; ++k) {
                const double x = root();
                const double z = x + eps();
                const double y = z + eps();
                values[k] = {x, z, y};
            }
            out.data = make_dataset({"X", "Z", "Y"}, std::move(values));
            out.truth = make_dag({"X", "Z", "Y"}, {{0, 1}, {1, 2}});
            out.features = {"X", "Z"};
            break;
        }
        case ValidationKind::Collider: {
            // X -> Z <- Y
            for (std::size_t k = 0; k < n; ++k) {
                const double x = root();
                const double y = root();
                const double z = x + y + eps();
                values[k] = {x, z, y};
            }
            out.data = make_dataset({"X", "Z", "Y"}, std::move(values));
            out.truth = make_dag({"X", "Z", "Y"}, {{0, 1}, {2, 1}});
            out.features = {"X", "Z"};
            break;
        }
        case ValidationKind::Collinear: {
            // X1 -> Y, X2 -> Y with X2 = X1 + small perturbation. The
            // perturbation scale fixes the X1-vs-Y partial correlation at
            // roughly sd_perturb / sqrt(sd_perturb^2 + noise_sd^2) ~ 0.097.
            std::normal_distribution<double> perturb(0.0, 0.00975);
            for (std::size_t k = 0; k < n; ++k) {
                const double x1 = root();
                const double x2 = x1 + perturb(rng);
                const double y = x1 + x2 + eps();
                values[k] = {x1, x2, y};
            }
            out.data = make_dataset({"X1", "X2", "Y"}, std::move(values));
            out.truth = make_dag({"X1", "X2", "Y"}, {{0, 1}, {0, 2}, {1, 2}});
            out.features = {"X1", "X2"};
            break;
        }
    }
    return out;
}

}  // namespace shapdag
