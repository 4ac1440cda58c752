#pragma once

#include <string>
#include <vector>

#include "shapdag/dataset.hpp"

namespace shapdag {

double pearson(const std::vector<double>& a, const std::vector<double>& b);

struct PartialCorrelation {
    double rho_p = 0.0;
    double p_value = 1.0;
};

/// Partial Pearson correlation of columns a, b given the conditioning set,
/// via OLS residuals, with a two-sided Fisher-Z p-value using
/// n - |conditioning| - 3 in the variance term.
PartialCorrelation partial_correlation_test(const Dataset& d, const std::string& a,
                                            const std::string& b,
                                            const std::vector<std::string>& conditioning);

/// Standard normal CDF.
double normal_cdf(double z);

/// Two-sided Fisher-Z p-value for a correlation r at effective sample size n
/// with k conditioning variables.
double fisher_z_p_value(double r, std::size_t n, std::size_t k);

}  // namespace shapdag
