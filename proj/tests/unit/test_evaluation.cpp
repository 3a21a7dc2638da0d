#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qfnn/baselines.hpp"
#include "qfnn/evaluation.hpp"
#include "qfnn/quantile_loss.hpp"

using namespace qfnn;

namespace {

QuantileForecast make(std::vector<double> times, std::vector<double> taus,
                      std::vector<std::vector<double>> rows) {
    QuantileForecast f;
    f.times = std::move(times);
    f.grid = QuantileGrid(std::move(taus));
    f.values = Matrix(rows.size(), f.grid.size());
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (std::size_t m = 0; m < rows[t].size(); ++m) f.values(t, m) = rows[t][m];
    return f;
}

double brute_force_qs(const std::vector<double>& y, const QuantileForecast& f) {
    double s = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        for (std::size_t m = 0; m < f.grid.size(); ++m) {
            const double u = y[t] - f.values(t, m);
            const double tau = f.grid[m];
            s += u >= 0 ? tau * u : (tau - 1.0) * u;
        }
    }
    return s;
}

}  // namespace

TEST_CASE("quantile grid") {
    const auto g = QuantileGrid::uniform();
    CHECK(g.size() == 100);
    CHECK(g[0] == 0.01);
    CHECK(g[99] == 0.99);
    CHECK(g[1] - g[0] == doctest::Approx(0.98 / 99.0).epsilon(1e-12));
    CHECK(g.nearest(0.3) == 29);
    CHECK(g.nearest(0.0) == 0);
    CHECK_THROWS_AS(QuantileGrid({0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(QuantileGrid({0.6, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(QuantileGrid({0.0, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(QuantileGrid({0.4, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(QuantileGrid(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("quantile score") {
    const auto perfect = make({0, 1}, {0.1, 0.9}, {{1.0, 1.0}, {2.0, 2.0}});
    const std::vector<double> y{1.0, 2.0};
    CHECK(quantile_score(y, perfect) == 0.0);

    const auto single = make({0}, {0.5}, {{0.0}});
    const std::vector<double> one{1.0};
    CHECK(quantile_score(one, single, false) == 0.5);

    const auto mixed = make({0, 1}, {0.2, 0.7}, {{1.5, 0.5}, {-1.0, 3.0}});
    const std::vector<double> y2{1.0, 0.0};
    const double expected = brute_force_qs(y2, mixed);
    CHECK(quantile_score(y2, mixed, false) == doctest::Approx(expected).epsilon(1e-15));
    CHECK(quantile_score(y2, mixed, true) == quantile_score(y2, mixed, false) / 4.0);

    const std::vector<double> short_y{1.0};
    CHECK_THROWS_AS(quantile_score(short_y, mixed), std::invalid_argument);
}

TEST_CASE("quantile score is translation consistent") {
    const auto f = make({0, 1, 2}, {0.1, 0.5, 0.9}, {{0.1, 0.2, 0.4}, {1.0, 0.3, 2.0}, {-1.0, 0.0, 0.5}});
    const std::vector<double> y{0.25, 1.5, -2.0};
    const double base = quantile_score(y, f);
    auto shifted = f;
    for (double& v : shifted.values.flat()) v += 3.25;
    std::vector<double> ys = y;
    for (double& v : ys) v += 3.25;
    CHECK(quantile_score(ys, shifted) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("empirical coverage") {
    const auto hi = make({0, 1, 2}, {0.5}, {{1e300}, {1e300}, {1e300}});
    const auto lo = make({0, 1, 2}, {0.5}, {{-1e300}, {-1e300}, {-1e300}});
    const std::vector<double> y{1, -2, 3};
    CHECK(empirical_coverage(y, hi, 0) == 1.0);
    CHECK(empirical_coverage(y, lo, 0) == 0.0);
    const auto mid = make({0, 1, 2, 3}, {0.5}, {{0}, {0}, {0}, {0}});
    const std::vector<double> y4{-1, 0, 1, 2};
    CHECK(empirical_coverage(y4, mid, 0) == 0.5);  // ties count as covered
    CHECK_THROWS_AS(empirical_coverage(y, hi, 1), std::invalid_argument);
}

TEST_CASE("coverage of known gaussian quantiles") {
    // Deterministic stratified normal sample: Phi^-1((i + 0.5) / n).
    const std::size_t n = 200;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[(i * 77) % n] = inverse_normal_cdf((static_cast<double>(i) + 0.5) / n);
    const QuantileGrid grid({0.1, 0.25, 0.5, 0.75, 0.9});
    QuantileForecast f;
    f.grid = grid;
    f.times.resize(n);
    f.values = Matrix(n, grid.size());
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t m = 0; m < grid.size(); ++m) f.values(t, m) = inverse_normal_cdf(grid[m]);
    for (std::size_t m = 0; m < grid.size(); ++m) CHECK(std::fabs(empirical_coverage(y, f, m) - grid[m]) <= 0.05);
}

TEST_CASE("prediction intervals pair outer levels first") {
    const auto grid = QuantileGrid::uniform();
    const std::vector<double> v{1, 5, 2, 8, 3, 3, 9};
    const auto fc = climatology(v, grid).over(std::vector<double>{0, 1});
    const auto pis = build_intervals(fc);
    REQUIRE(pis.size() == 50);
    CHECK(pis.front().lower_level == 0.01);
    CHECK(pis.front().upper_level == 0.99);
    CHECK(pis.front().nominal_coverage == doctest::Approx(0.98));
    CHECK(pis.front().beta == doctest::Approx(0.02));
    for (const auto& pi : pis)
        for (std::size_t t = 0; t < 2; ++t) CHECK(pi.lower[t] <= pi.upper[t]);
    // Nested: wider nominal coverage contains narrower.
    for (std::size_t i = 1; i < pis.size(); ++i) {
        CHECK(pis[i].nominal_coverage < pis[i - 1].nominal_coverage);
        for (std::size_t t = 0; t < 2; ++t) {
            CHECK(pis[i - 1].lower[t] <= pis[i].lower[t]);
            CHECK(pis[i].upper[t] <= pis[i - 1].upper[t]);
        }
    }

    const auto two = make({0, 1}, {0.25, 0.75}, {{-1, 1}, {-2, 2}});
    const auto one = build_intervals(two);
    REQUIRE(one.size() == 1);
    CHECK(one[0].lower == std::vector<double>{-1, -2});
    CHECK(one[0].upper == std::vector<double>{1, 2});
    CHECK(one[0].beta == 0.5);

    CHECK_THROWS_AS(build_intervals(make({0}, {0.1, 0.5, 0.9}, {{0, 1, 2}})), std::invalid_argument);
}

TEST_CASE("crossing rate") {
    const auto ok = make({0}, {0.1, 0.4, 0.6, 0.9}, {{1, 2, 3, 4}});
    CHECK(crossing_rate(ok) == 0.0);
    // One inversion among the three adjacent pairs of a row, plus a clean row.
    const auto one = make({0, 1}, {0.1, 0.4, 0.6, 0.9}, {{1, 3, 2, 4}, {1, 2, 3, 4}});
    CHECK(crossing_rate(one) == doctest::Approx(1.0 / 6.0));
    const auto single_row = make({0}, {0.1, 0.4, 0.6, 0.9}, {{1, 3, 2, 4}});
    CHECK(crossing_rate(single_row) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(crossing_rate(make({0}, {0.5}, {{1}})), std::invalid_argument);
}

TEST_CASE("rearrange") {
    const auto ok = make({0, 1}, {0.2, 0.5, 0.8}, {{1, 2, 3}, {-1, 0, 0}});
    CHECK(rearrange(ok).values == ok.values);

    const auto crossed = make({0}, {0.2, 0.5, 0.8}, {{3, 1, 2}});
    CHECK(rearrange(crossed).values == make({0}, {0.2, 0.5, 0.8}, {{1, 2, 3}}).values);

    const auto fixture = make({0, 1, 2}, {0.1, 0.3, 0.5, 0.7, 0.9},
                              {{2.0, 1.0, 1.5, 0.5, 3.0}, {0.0, 0.4, 0.2, 0.9, 0.8}, {5, 4, 3, 2, 1}});
    const std::vector<double> y{1.2, 0.5, 2.5};
    const auto fixed = rearrange(fixture);
    CHECK(crossing_rate(fixed) == 0.0);
    CHECK(brute_force_qs(y, fixed) <= brute_force_qs(y, fixture));
    CHECK(rearrange(fixed).values == fixed.values);
}

TEST_CASE("quantile curve interpolation") {
    const auto f = make({0, 1}, {0.2, 0.4, 0.8}, {{1, 2, 4}, {0, 0, 8}});
    CHECK(quantile_curve(f, 0.4) == std::vector<double>{2, 0});
    const auto mid = quantile_curve(f, 0.6);
    CHECK(mid[0] == doctest::Approx(3.0));
    CHECK(mid[1] == doctest::Approx(4.0));
    CHECK_THROWS_AS(quantile_curve(f, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(quantile_curve(f, 0.9), std::invalid_argument);
}

TEST_CASE("metrics report") {
    const auto f = make({0, 1}, {0.25, 0.75}, {{0, 1}, {0, 1}});
    const std::vector<double> y{0.5, 2.0};
    const std::vector<ModelMetrics> ms{evaluate_model("qfnn", y, f)};
    std::ostringstream out;
    write_metrics_report(out, f.grid, ms);
    const std::string text = out.str();
    CHECK(text.find("models=qfnn\n") == 0);
    CHECK(text.find("qs.qfnn=") != std::string::npos);
    CHECK(text.find("crossing_rate.qfnn=0\n") != std::string::npos);
    CHECK(text.find("coverage.qfnn.tau_0.25=0\n") != std::string::npos);
    CHECK(text.find("coverage.qfnn.tau_0.75=0.5\n") != std::string::npos);
}
