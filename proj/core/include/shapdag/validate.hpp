#pragma once

#include <string>
#include <vector>

#include "shapdag/synth.hpp"

#include "json.hpp"

namespace shapdag {

/// One aggregated row of the Shapley-vs-dependence validation table:
/// a (structure, feature) pair with means and standard deviations over
/// replicates.
struct ValidationRow {
    std::string structure;
    std::string feature;
    double rho_mean = 0.0;
    double rho_sd = 0.0;
    double rho_p_mean = 0.0;
    double rho_p_sd = 0.0;
    double p_value_mean = 0.0;
    double p_value_sd = 0.0;
    double phi_mean = 0.0;  // mean absolute attribution
    double phi_sd = 0.0;
};

struct ValidationTable {
    std::vector<ValidationRow> rows;

    std::string to_csv() const;
    nlohmann::json to_json() const;
    const ValidationRow& at(const std::string& structure, const std::string& feature) const;
};

struct ValidationConfig {
    int replicates = 50;
    std::size_t samples = 5000;
    double noise_sd = 0.10;
    std::size_t explain_rows = 1000;  // held-out explanation set
    int background_rows = 100;
    int jobs = 1;
};

/// Runs the four-structure validation protocol: per replicate, fit a tree
/// ensemble (200 trees, depth 4, learning rate 0.05) on standardized data,
/// compute marginal and partial correlations with Fisher-Z p-values, and
/// mean absolute tree-Shapley attributions on a held-out explanation set.
ValidationTable run_shap_validation(const ValidationConfig& cfg, std::uint64_t seed);

}  // namespace shapdag
