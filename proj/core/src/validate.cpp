#include "shapdag/validate.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "shapdag/bootstrap.hpp"
#include "shapdag/error.hpp"
#include "shapdag/gbt.hpp"
#include "shapdag/parallel.hpp"
#include "shapdag/shap.hpp"
#include "shapdag/stats.hpp"

namespace shapdag {

namespace {

struct Accumulator {
    double sum = 0.0;
    double sum_sq = 0.0;
    int n = 0;

    void add(double v) {
        sum += v;
        sum_sq += v * v;
        ++n;
    }
    double mean() const { return sum / n; }
    double sd() const {
        if (n < 2) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, (sum_sq - n * m * m) / (n - 1)));
    }
};

struct FeatureAccumulators {
    Accumulator rho, rho_p, p_value, phi;
};

}  // namespace

ValidationTable run_shap_validation(const ValidationConfig& cfg, std::uint64_t seed) {
    if (cfg.replicates < 1) throw InputError("validation needs replicates >= 1");

    const ValidationKind kinds[] = {ValidationKind::Confounder, ValidationKind::Chain,
                                    ValidationKind::Collider, ValidationKind::Collinear};
    const GbtHyperParams hp{.trees = 200, .max_depth = 4, .learning_rate = 0.05,
                            .min_samples_leaf = 1};

    ValidationTable table;
    for (const ValidationKind kind : kinds) {
        // Feature order matches the generator's declared features.
        Rng probe = make_rng(0);
        const ValidationData probe_data = generate_validation(kind, 10, cfg.noise_sd, probe);
        std::vector<FeatureAccumulators> acc(probe_data.features.size());

        std::vector<std::vector<std::array<double, 4>>> replicate_stats(
            cfg.replicates,
            std::vector<std::array<double, 4>>(probe_data.features.size()));

        parallel_for(static_cast<std::size_t>(cfg.replicates), cfg.jobs, [&](std::size_t rep) {
            Rng rng = make_rng(
                derive_seed(seed, 1000 * static_cast<int>(kind) + rep));
            // Extra rows form the held-out explanation set.
            const ValidationData v = generate_validation(
                kind, cfg.samples + cfg.explain_rows, cfg.noise_sd, rng);
            const Dataset all = standardize(v.data);

            Dataset train;
            train.columns = all.columns;
            train.standardized = true;
            Dataset holdout = train;
            for (std::size_t r = 0; r < all.rows(); ++r) {
                (r < cfg.samples ? train : holdout).values.push_back(all.values[r]);
            }

            const GbtModel model = train_gbt(train, v.target, hp, rng);

            auto [explain_rows, feat_names] = feature_matrix(holdout, v.target);
            (void)feat_names;
            Rng bg_rng = make_rng(derive_seed(seed, 555 + rep));
            Dataset bg = sample_rows(
                train, static_cast<double>(cfg.background_rows) / train.rows(), bg_rng);
            auto [bg_rows, bg_names] = feature_matrix(bg, v.target);
            (void)bg_names;

            const ShapMatrix phi = shap_tree(model, explain_rows, bg_rows);
            const ImportanceVector imp = importance(phi);

            for (std::size_t f = 0; f < v.features.size(); ++f) {
                const std::string& feature = v.features[f];
                const std::string other = v.features[1 - f];
                const double rho =
                    pearson(train.column(train.column_index(feature)),
                            train.column(train.column_index(v.target)));
                // Condition on the remaining non-target variable.
                std::vector<std::string> conditioning;
                if (kind == ValidationKind::Collinear) {
                    conditioning = {other};
                } else {
                    conditioning = {feature == "X" ? std::string("Z") : std::string("X")};
                }
                const PartialCorrelation pc =
                    partial_correlation_test(train, feature, v.target, conditioning);

                std::size_t imp_idx = 0;
                for (std::size_t c = 0; c < imp.features.size(); ++c) {
                    if (imp.features[c] == feature) imp_idx = c;
                }
                replicate_stats[rep][f] = {rho, pc.rho_p, pc.p_value, imp.scores[imp_idx]};
            }
        });

        for (int rep = 0; rep < cfg.replicates; ++rep) {
            for (std::size_t f = 0; f < probe_data.features.size(); ++f) {
                acc[f].rho.add(replicate_stats[rep][f][0]);
                acc[f].rho_p.add(replicate_stats[rep][f][1]);
                acc[f].p_value.add(replicate_stats[rep][f][2]);
                acc[f].phi.add(replicate_stats[rep][f][3]);
            }
        }
        for (std::size_t f = 0; f < probe_data.features.size(); ++f) {
            ValidationRow row;
            row.structure = validation_kind_name(kind);
            row.feature = probe_data.features[f];
            row.rho_mean = acc[f].rho.mean();
            row.rho_sd = acc[f].rho.sd();
            row.rho_p_mean = acc[f].rho_p.mean();
            row.rho_p_sd = acc[f].rho_p.sd();
            row.p_value_mean = acc[f].p_value.mean();
            row.p_value_sd = acc[f].p_value.sd();
            row.phi_mean = acc[f].phi.mean();
            row.phi_sd = acc[f].phi.sd();
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

std::string ValidationTable::to_csv() const {
    std::ostringstream out;
    out << "structure,feature,rho_mean,rho_sd,rho_p_mean,rho_p_sd,p_mean,p_sd,phi_mean,phi_sd\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f",
                      r.structure.c_str(), r.feature.c_str(), r.rho_mean, r.rho_sd,
                      r.rho_p_mean, r.rho_p_sd, r.p_value_mean, r.p_value_sd, r.phi_mean,
                      r.phi_sd);
        out << buf << '\n';
    }
    return out.str();
}

nlohmann::json ValidationTable::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"structure", r.structure},
                       {"feature", r.feature},
                       {"rho_mean", r.rho_mean},
                       {"rho_sd", r.rho_sd},
                       {"rho_p_mean", r.rho_p_mean},
                       {"rho_p_sd", r.rho_p_sd},
                       {"p_mean", r.p_value_mean},
                       {"p_sd", r.p_value_sd},
                       {"phi_mean", r.phi_mean},
                       {"phi_sd", r.phi_sd}});
    }
    return nlohmann::json{{"schema_version", 1}, {"rows", std::move(arr)}};
}

const ValidationRow& ValidationTable::at(const std::string& structure,
                                         const std::string& feature) const {
    for (const auto& r : rows) {
        if (r.structure == structure && r.feature == feature) return r;
    }
    throw InputError("validation table has no row " + structure + "/" + feature);
}

}  // namespace shapdag
