#pragma once

#include <cstddef>
#include <vector>

namespace shapdag {

using Matrix = std::vector<std::vector<double>>;

/// In-place Cholesky factorization of a symmetric positive-definite matrix.
/// Returns the lower-triangular factor L with A = L L^T. Throws NumericError
/// when a pivot is not positive.
Matrix cholesky(const Matrix& a);

/// Solves A x = b for symmetric positive-definite A via Cholesky.
std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b);

/// Ordinary least squares with intercept: returns fitted values of y on the
/// columns of X (each predictor a column vector). Normal equations with a
/// tiny diagonal guard; adequate for the small systems used here.
std::vector<double> ols_fitted(const std::vector<std::vector<double>>& predictors,
                               const std::vector<double>& y);

}  // namespace shapdag
