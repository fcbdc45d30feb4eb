#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "helpers.hpp"
#include "pnml/pnml.hpp"

using namespace pnml;

namespace {

ProbVector prob2(double a, double b) {
    Eigen::VectorXd p(2);
    p << a, b;
    return ProbVector(p);
}

PnmlStats stats_from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(rows.begin()->size());
    Eigen::MatrixXd x(n, m);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (const double v : row)
            x(i, j++) = v;
        ++i;
    }
    return build_stats(decompose(EmbeddingMatrix(std::move(x))), n);
}

} // namespace

TEST_CASE("ProbVector validates the simplex") {
    CHECK_THROWS_AS(ProbVector(Eigen::VectorXd::Ones(1)), InvalidInput);

    Eigen::VectorXd negative(2);
    negative << -0.1, 1.1;
    CHECK_THROWS_AS(ProbVector{negative}, InvalidInput);

    Eigen::VectorXd short_sum(2);
    short_sum << 0.4, 0.5;
    CHECK_THROWS_AS(ProbVector{short_sum}, InvalidInput);

    const ProbVector p = prob2(0.3, 0.7);
    CHECK(p.argmax() == 1);
    CHECK(p.max() == 0.7);
}

TEST_CASE("x_top_g is exactly 1 for out-of-row-space samples") {
    const PnmlStats stats = stats_from_rows({{1, 0}});
    Eigen::VectorXd x(2);
    x << 1, 1;
    CHECK(x_top_g(x, stats) == 1.0);
}

TEST_CASE("x_top_g on the identity training set") {
    const PnmlStats stats = stats_from_rows({{1, 0}, {0, 1}});
    Eigen::VectorXd x(2);
    x << 1, 0;
    CHECK(x_top_g(x, stats) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("x_top_g of the zero vector is 0") {
    const PnmlStats full = stats_from_rows({{1, 0}, {0, 1}});
    CHECK(x_top_g(Eigen::VectorXd::Zero(2), full) == 0.0);

    const PnmlStats degenerate = stats_from_rows({{0, 0}});
    CHECK(degenerate.degenerate());
    CHECK(x_top_g(Eigen::VectorXd::Zero(2), degenerate) == 0.0);
}

TEST_CASE("x_top_g shrinks with training mass along the direction") {
    // Single row of norm 10: eigenvalue 100 along e1.
    const PnmlStats stats = stats_from_rows({{10, 0}});
    Eigen::VectorXd x(2);
    x << 1, 0;
    CHECK(x_top_g(x, stats) == doctest::Approx(0.01 / 1.01).epsilon(1e-9));
}

TEST_CASE("x_top_g validates its inputs") {
    const PnmlStats stats = stats_from_rows({{1, 0}, {0, 1}});
    Eigen::VectorXd nan(2);
    nan << 0, std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(x_top_g(nan, stats), InvalidInput);
    CHECK_THROWS_AS(x_top_g(Eigen::VectorXd::Zero(2), stats, 0.0), InvalidInput);
}

TEST_CASE("genie_prob frozen values") {
    CHECK(genie_prob(0.7, 0.0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(genie_prob(1.0, 0.5) == 1.0);
    CHECK(genie_prob(0.5, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(genie_prob(0.0, 0.5) == 0.0);
}

TEST_CASE("genie_prob validates its domain") {
    CHECK_THROWS_AS(genie_prob(-0.1, 0.5), InvalidInput);
    CHECK_THROWS_AS(genie_prob(1.1, 0.5), InvalidInput);
    CHECK_THROWS_AS(genie_prob(0.5, -1.0), InvalidInput);
    CHECK_THROWS_AS(genie_prob(0.5, std::numeric_limits<double>::infinity()), InvalidInput);
}

TEST_CASE("genie_prob dominates p_c on the confident half") {
    for (double p = 0.5; p <= 1.0; p += 0.01)
        for (double t = 0.0; t <= 1.0; t += 0.05)
            CHECK(genie_prob(p, t) >= p - 1e-15);
}

TEST_CASE("regret frozen values") {
    CHECK(regret(prob2(0.5, 0.5), 0.0) <= 1e-12);
    CHECK(regret(prob2(0.5, 0.5), 1.0) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
    CHECK(regret(prob2(1.0, 0.0), 0.7) == 0.0);
}

TEST_CASE("regret limits on random simplices") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const Eigen::Index c = 2 + static_cast<Eigen::Index>(rng() % 9);
        const ProbVector p{testutil::random_simplex(rng, c)};

        CHECK(regret(p, 0.0) <= 1e-12);

        double expected = 0.0;
        for (Eigen::Index i = 0; i < c; ++i)
            expected += 1.0 / (2.0 - p[i]);
        CHECK(std::abs(regret(p, 1.0) - std::log(expected)) <= 1e-12);

        CHECK(regret(p, 0.37) <= std::log(static_cast<double>(c)) + 1e-12);
    }
}

TEST_CASE("regret is nondecreasing in the statistic") {
    std::mt19937_64 rng(22);
    const ProbVector p{testutil::random_simplex(rng, 5)};
    double prev = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double t = 6.0 * static_cast<double>(i) / 999.0;
        const double g = regret(p, t);
        CHECK(g >= prev);
        prev = g;
    }
}

TEST_CASE("pnml_posterior frozen values") {
    const ProbVector same = pnml_posterior(prob2(0.5, 0.5), 1.0);
    CHECK(same[0] == doctest::Approx(0.5).epsilon(1e-12));

    const ProbVector skew = pnml_posterior(prob2(0.9, 0.1), 1.0);
    CHECK(skew[0] == doctest::Approx(0.6333).epsilon(1e-4));
    CHECK(skew[1] == doctest::Approx(0.3667).epsilon(1e-4));

    // xtg = 0 collapses the genie to the ERM prediction.
    const ProbVector p = prob2(0.25, 0.75);
    const ProbVector q = pnml_posterior(p, 0.0);
    CHECK(std::abs(q[0] - p[0]) <= 1e-12);
    CHECK(std::abs(q[1] - p[1]) <= 1e-12);
}

TEST_CASE("pnml_posterior properties on random simplices") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> xtg_dist(0.0, 6.0);
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index c = 2 + static_cast<Eigen::Index>(rng() % 19);
        const ProbVector p{testutil::random_simplex(rng, c)};
        const double t = xtg_dist(rng);

        const ProbVector q = pnml_posterior(p, t);
        CHECK(std::abs(q.values().sum() - 1.0) <= 1e-12);
        CHECK(std::exp(regret(p, t)) >= 1.0);
        if (t <= 1.0)
            CHECK(q.argmax() == p.argmax());
    }
}

TEST_CASE("genie_terms backs both regret and the posterior") {
    const ProbVector p = prob2(0.9, 0.1);
    const Eigen::VectorXd terms = genie_terms(p, 1.0);
    CHECK(terms[0] == doctest::Approx(0.9 / 0.99).epsilon(1e-12));
    CHECK(terms[1] == doctest::Approx(0.1 / 0.19).epsilon(1e-12));
    CHECK(regret(p, 1.0) == doctest::Approx(std::log(terms.sum())).epsilon(1e-12));
}

TEST_CASE("response_curve reproduces the two-class simulation") {
    std::vector<double> grid(600);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = 6.0 * static_cast<double>(i) / 599.0;

    const auto curve99 = response_curve(0.99, grid);
    CHECK(curve99.front().second <= 1e-12);
    CHECK(curve99.back().first == doctest::Approx(6.0));
    CHECK(curve99.back().second >= 0.99);

    double prev = -1.0;
    for (const auto& [t, v] : curve99) {
        CHECK(v >= prev);
        CHECK(v <= 1.0);
        prev = v;
    }

    // Shape of the family: the confident curve starts below the uncertain
    // one, then overtakes it with a much sharper rise (its maximal slope on
    // the grid is larger), and both end near 1.
    const auto curve55 = response_curve(0.55, grid);
    CHECK(curve99[20].second < curve55[20].second);  // xtg ~ 0.2: still low
    const std::size_t mid = 200;                     // xtg ~ 2: already saturating
    CHECK(curve99[mid].second > curve55[mid].second);

    const auto max_slope = [](const std::vector<std::pair<double, double>>& c) {
        double best = 0.0;
        for (std::size_t i = 1; i < c.size(); ++i)
            best = std::max(best, (c[i].second - c[i - 1].second) / (c[i].first - c[i - 1].first));
        return best;
    };
    CHECK(max_slope(curve99) > max_slope(curve55));
}

TEST_CASE("response_curve validates p1 and the grid") {
    const std::vector<double> grid = {0.0, 1.0};
    CHECK_THROWS_AS(response_curve(0.0, grid), InvalidInput);
    CHECK_THROWS_AS(response_curve(1.0, grid), InvalidInput);
    const std::vector<double> negative = {-0.5};
    CHECK_THROWS_AS(response_curve(0.5, negative), InvalidInput);
}
