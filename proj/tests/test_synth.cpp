#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "shapdag/error.hpp"
#include "shapdag/stats.hpp"
#include "shapdag/synth.hpp"

using namespace shapdag;

TEST_CASE("sample_dag respects parent caps") {
    Rng rng = make_rng(1);
    SUBCASE("max_parents 0 gives an empty edge set") {
        const Dag g = sample_dag(2, 0, rng);
        CHECK(g.edges.empty());
    }
    SUBCASE("in-degree never exceeds the cap") {
        for (int rep = 0; rep < 50; ++rep) {
            const Dag g = sample_dag(8, 3, rng);
            for (std::size_t n = 0; n < g.nodes.size(); ++n) {
                CHECK(g.parents(static_cast<int>(n)).size() <= 3);
            }
        }
    }
    SUBCASE("every draw is acyclic") {
        for (int rep = 0; rep < 50; ++rep) CHECK(is_acyclic(sample_dag(10, 5, rng)));
    }
    CHECK_THROWS_AS(sample_dag(1, 5, rng), InputError);
}

TEST_CASE("sample_dag edge counts bracket the reference density") {
    Rng rng = make_rng(2);
    double total = 0.0;
    const int draws = 200;
    for (int rep = 0; rep < draws; ++rep) {
        total += static_cast<double>(sample_dag(10, 5, rng).edges.size());
    }
    const double mean = total / draws;
    CHECK(mean >= 9.5);
    CHECK(mean <= 20.5);
}

TEST_CASE("root nodes are standardized draws from their cause distribution") {
    Rng rng = make_rng(3);
    const Dag g = make_dag({"V0", "V1"}, {{0, 1}});
    const Dataset d = generate_sem(g, MechanismFamily::Linear, 400, rng);
    CHECK(d.standardized);
    const auto root = d.column(0);
    CHECK(std::abs(mean_of(root)) < 1e-9);
    CHECK(std::abs(sd_of(root) - 1.0) < 1e-9);
}

TEST_CASE("linear chain obeys the linear-Gaussian correlation identity") {
    // B = a*A + eps: the slope recovers corr through a * sd(A)/sd(B), and
    // the residual carries no dependence on A, linear or cubic.
    Rng rng = make_rng(4);
    const Dag g = make_dag({"A", "B"}, {{0, 1}});
    const Dataset d = generate_sem(g, MechanismFamily::Linear, 5000, rng);
    const auto a = d.column(0);
    const auto b = d.column(1);

    double cov = 0.0, var_a = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += a[i] * b[i];
        var_a += a[i] * a[i];
    }
    const double slope = cov / var_a;
    const double rho = pearson(a, b);
    CHECK(std::abs(rho - slope * sd_of(a) / sd_of(b)) < 1e-9);

    std::vector<double> resid(a.size()), a_cubed(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        resid[i] = b[i] - slope * a[i];
        a_cubed[i] = a[i] * a[i] * a[i];
    }
    CHECK(std::abs(pearson(a, resid)) < 0.05);
    CHECK(std::abs(pearson(a_cubed, resid)) < 0.05);
}

TEST_CASE("all mechanism families emit finite standardized matrices") {
    Rng rng = make_rng(5);
    const Dag g = sample_dag(10, 5, rng);
    for (const MechanismFamily family :
         {MechanismFamily::Linear, MechanismFamily::Polynomial, MechanismFamily::GpAdditive,
          MechanismFamily::GpMix, MechanismFamily::SigmoidMix}) {
        const Dataset d = generate_sem(g, family, 500, rng);
        REQUIRE(d.rows() == 500);
        REQUIRE(d.cols() == 10);
        for (std::size_t j = 0; j < d.cols(); ++j) {
            const auto col = d.column(j);
            CHECK(std::abs(sd_of(col) - 1.0) < 1e-9);
            for (double v : col) CHECK(std::isfinite(v));
        }
    }
}

TEST_CASE("generate_sem output respects the dag") {
    // Non-adjacent pairs are conditionally uncorrelated given the parents of
    // the downstream endpoint.
    Rng rng = make_rng(6);
    const Dag g = sample_dag(6, 3, rng);
    const Dataset d = generate_sem(g, MechanismFamily::Linear, 5000, rng);
    const int p = static_cast<int>(g.nodes.size());
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            if (i >= j || g.has_edge(i, j) || g.has_edge(j, i)) continue;
            const int downstream = ancestors(g, j).count(i) ? j : i;
            const int other = downstream == j ? i : j;
            std::vector<std::string> conditioning;
            for (int pa : g.parents(downstream)) conditioning.push_back(g.nodes[pa]);
            const auto pc = partial_correlation_test(d, g.nodes[other], g.nodes[downstream],
                                                     conditioning);
            CHECK(std::abs(pc.rho_p) < 0.1);
        }
    }
}

TEST_CASE("validation structures reproduce the reference correlations") {
    Rng rng = make_rng(7);
    SUBCASE("confounder") {
        const ValidationData v = generate_validation(ValidationKind::Confounder, 5000, 0.10, rng);
        const double rho = pearson(v.data.column(v.data.column_index("X")),
                                   v.data.column(v.data.column_index("Y")));
        CHECK(rho == doctest::Approx(0.990).epsilon(0.006));
        const auto pc = partial_correlation_test(v.data, "X", "Y", {"Z"});
        CHECK(std::abs(pc.rho_p) < 0.05);
    }
    SUBCASE("collider") {
        // Marginal correlation of the parents: zero up to sampling noise, so
        // average a few replicates before gating.
        double rho_sum = 0.0;
        const int reps = 10;
        for (int rep = 0; rep < reps; ++rep) {
            const ValidationData v =
                generate_validation(ValidationKind::Collider, 5000, 0.10, rng);
            rho_sum += pearson(v.data.column(v.data.column_index("X")),
                               v.data.column(v.data.column_index("Y")));
        }
        CHECK(std::abs(rho_sum / reps) < 0.02);
        const ValidationData v = generate_validation(ValidationKind::Collider, 5000, 0.10, rng);
        const auto pc = partial_correlation_test(v.data, "X", "Y", {"Z"});
        CHECK(pc.rho_p == doctest::Approx(-0.990).epsilon(0.01));
    }
    SUBCASE("deterministic chain limit") {
        const ValidationData v = generate_validation(ValidationKind::Chain, 5000, 1e-4, rng);
        const double rho = pearson(v.data.column(v.data.column_index("X")),
                                   v.data.column(v.data.column_index("Y")));
        CHECK(rho > 0.9999);
    }
    SUBCASE("collinear parents are nearly identical") {
        const ValidationData v = generate_validation(ValidationKind::Collinear, 5000, 0.10, rng);
        const double rho = pearson(v.data.column(v.data.column_index("X1")),
                                   v.data.column(v.data.column_index("X2")));
        CHECK(rho > 0.99);
    }
    CHECK_THROWS_AS(generate_validation(ValidationKind::Chain, 5, 0.1, rng), InputError);
}

TEST_CASE("partial correlation with empty conditioning equals pearson") {
    Rng rng = make_rng(8);
    const ValidationData v = generate_validation(ValidationKind::Chain, 500, 0.10, rng);
    const auto pc = partial_correlation_test(v.data, "X", "Y", {});
    const double rho = pearson(v.data.column(v.data.column_index("X")),
                               v.data.column(v.data.column_index("Y")));
    CHECK(std::abs(pc.rho_p - rho) < 1e-12);
}

TEST_CASE("fisher-z p-values are uniform under the null") {
    Rng rng = make_rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int replicates = 1000;
    const std::size_t n = 100;
    std::vector<double> pvals;
    pvals.reserve(replicates);
    for (int rep = 0; rep < replicates; ++rep) {
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = gauss(rng);
            y[i] = gauss(rng);
        }
        pvals.push_back(fisher_z_p_value(pearson(x, y), n, 0));
    }
    std::sort(pvals.begin(), pvals.end());
    double ks = 0.0;
    for (int i = 0; i < replicates; ++i) {
        const double f = static_cast<double>(i + 1) / replicates;
        ks = std::max(ks, std::abs(f - pvals[i]));
        ks = std::max(ks, std::abs(static_cast<double>(i) / replicates - pvals[i]));
    }
    CHECK(ks < 0.05);
}
