#include "shapdag/stats.hpp"

#include <algorithm>
#include <cmath>

#include "shapdag/error.hpp"
#include "shapdag/linalg.hpp"

namespace shapdag {

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw InputError("pearson: length mismatch");
    const double ma = mean_of(a);
    const double mb = mean_of(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa <= 0.0 || sbb <= 0.0) throw NumericError("pearson: zero-variance input");
    return sab / std::sqrt(saa * sbb);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double fisher_z_p_value(double r, std::size_t n, std::size_t k) {
    const double dof = static_cast<double>(n) - static_cast<double>(k) - 3.0;
    if (dof <= 0.0) return 1.0;
    const double rc = std::clamp(r, -0.9999999999, 0.9999999999);
    const double z = 0.5 * std::log((1.0 + rc) / (1.0 - rc));
    const double stat = std::abs(z) * std::sqrt(dof);
    return std::erfc(stat / std::sqrt(2.0));
}

PartialCorrelation partial_correlation_test(const Dataset& d, const std::string& a,
                                            const std::string& b,
                                            const std::vector<std::string>& conditioning) {
    if (a == b) throw InputError("partial correlation needs two distinct variables");
    const std::size_t ia = d.column_index(a);
    const std::size_t ib = d.column_index(b);
    std::vector<std::vector<double>> controls;
    controls.reserve(conditioning.size());
    for (const auto& name : conditioning) {
        if (name == a || name == b) {
            throw InputError("conditioning set must exclude the tested pair");
        }
        controls.push_back(d.column(d.column_index(name)));
    }
    if (conditioning.size() + 3 >= d.rows()) {
        throw InputError("conditioning set too large for sample size");
    }

    const std::vector<double> xa = d.column(ia);
    const std::vector<double> xb = d.column(ib);
    std::vector<double> ra = xa;
    std::vector<double> rb = xb;
    if (!controls.empty()) {
        const std::vector<double> fa = ols_fitted(controls, xa);
        const std::vector<double> fb = ols_fitted(controls, xb);
        for (std::size_t i = 0; i < d.rows(); ++i) {
            ra[i] = xa[i] - fa[i];
            rb[i] = xb[i] - fb[i];
        }
    }
    PartialCorrelation out;
    out.rho_p = pearson(ra, rb);
    out.p_value = fisher_z_p_value(out.rho_p, d.rows(), conditioning.size());
    return out;
}

}  // namespace shapdag
