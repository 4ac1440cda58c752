#include "shapdag/linalg.hpp"

#include <cmath>
#include <cstddef>

#include "shapdag/error.hpp"

namespace shapdag {

Matrix cholesky(const Matrix& a) {
    const std::size_t n = a.size();
    Matrix l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) {
                    throw NumericError("cholesky: matrix not positive definite at pivot " +
                                       std::to_string(i));
                }
                l[i][j] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    return l;
}

std::vector<double> solve_spd(const Matrix& a, const std::vector<double>& b) {
    const Matrix l = cholesky(a);
    const std::size_t n = b.size();
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l[k][ii] * x[k];
        x[ii] = s / l[ii][ii];
    }
    return x;
}

std::vector<double> ols_fitted(const std::vector<std::vector<double>>& predictors,
                               const std::vector<double>& y) {
    const std::size_t n = y.size();
    const std::size_t k = predictors.size() + 1;  // intercept column first
    Matrix xtx(k, std::vector<double>(k, 0.0));
    std::vector<double> xty(k, 0.0);
    auto col = [&](std::size_t c, std::size_t row) -> double {
        return c == 0 ? 1.0 : predictors[c - 1][row];
    };
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < k; ++i) {
            const double xi = col(i, r);
            xty[i] += xi * y[r];
            for (std::size_t j = i; j < k; ++j) xtx[i][j] += xi * col(j, r);
        }
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];
        xtx[i][i] += 1e-12;  // guard against exactly singular systems
    }
    const std::vector<double> beta = solve_spd(xtx, xty);
    std::vector<double> fitted(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        double f = 0.0;
        for (std::size_t i = 0; i < k; ++i) f += beta[i] * col(i, r);
        fitted[r] = f;
    }
    return fitted;
}

}  // namespace shapdag
