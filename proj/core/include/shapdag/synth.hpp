#pragma once

#include <string>

#include "shapdag/dataset.hpp"
#include "shapdag/graph.hpp"
#include "shapdag/rng.hpp"

namespace shapdag {

enum class MechanismFamily { Linear, Polynomial, GpAdditive, GpMix, SigmoidMix };

MechanismFamily parse_family(const std::string& name);
std::string family_name(MechanismFamily f);

struct MechanismParams {
    int polynomial_degree = 2;
    double gp_bandwidth = 1.0;
    double gp_jitter = 1e-8;
};

/// Random DAG: nodes take a uniform parent count in {0, ..., min(max_parents,
/// predecessors)} over a random topological order.
Dag sample_dag(int p, int max_parents, Rng& rng);

/// Samples a dataset from the structural equations of the given family over
/// the DAG, in topological order, with per-node noise N(mu_i, sigma_i),
/// mu_i ~ U(-2,2), sigma_i ~ U(0,0.4). All columns are standardized.
Dataset generate_sem(const Dag& g, MechanismFamily family, std::size_t m, Rng& rng,
                     const MechanismParams& params = {});

enum class ValidationKind { Confounder, Chain, Collider, Collinear };

ValidationKind parse_validation_kind(const std::string& name);
std::string validation_kind_name(ValidationKind k);

struct ValidationData {
    Dataset data;  // raw scale
    Dag truth;
    std::string target;                 // always "Y"
    std::vector<std::string> features;  // the two non-target variables
};

/// Three-variable linear-Gaussian benchmark structures. Root variables are
/// standard normal; every non-root adds N(0, noise_sd^2) structural noise
/// with all coefficients 1.0. Collinear uses X2 = X1 + N(0, 0.05^2).
ValidationData generate_validation(ValidationKind kind, std::size_t n, double noise_sd,
                                   Rng& rng);

}  // namespace shapdag
