#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "qfnn/errors.hpp"
#include "qfnn/time_series.hpp"
#include "qfnn/trainer.hpp"
#include "test_support.hpp"

using namespace qfnn;

namespace {

TimeSeries series_of(std::size_t n, double (*f)(double)) {
    TimeSeries s;
    for (std::size_t i = 0; i < n; ++i) {
        s.raw_times.push_back(static_cast<double>(i));
        s.values.push_back(f(static_cast<double>(i) / static_cast<double>(n - 1)));
    }
    s.norm_scale = static_cast<double>(n - 1);
    return s;
}

TrainConfig small_config() {
    TrainConfig c;
    c.epochs = 50;
    c.hidden = 6;
    c.grid = QuantileGrid::uniform(10, 0.05, 0.95);
    return c;
}

}  // namespace

TEST_CASE("training defaults") {
    const TrainConfig c;
    CHECK(c.epochs == 1000);
    CHECK(c.learning_rate == 0.1);
    CHECK(c.alpha == 0.01);
    CHECK(c.lambda == 0.1);
    CHECK(c.mix == 0.5);
    CHECK(c.hidden == 20);
    CHECK(c.grid.size() == 100);
    CHECK(c.grid[0] == 0.01);
    CHECK(c.grid[99] == 0.99);
    CHECK(c.phase_init == PhaseInit::Zero);
    CHECK(c.reg_scope == RegScope::Amplitudes);
    for (auto g : {ParamGroup::Frequency, ParamGroup::Phase, ParamGroup::TrendWeight,
                   ParamGroup::TrendBias, ParamGroup::Amplitude, ParamGroup::OutputBias}) {
        CHECK(c.rate_for(g) == 0.1);
    }
}

TEST_CASE("per-group rates override the global rate") {
    TrainConfig c;
    c.rates.amplitude = 5.0;
    c.rates.trend = 0.0;
    CHECK(c.rate_for(ParamGroup::Amplitude) == 5.0);
    CHECK(c.rate_for(ParamGroup::TrendWeight) == 0.0);
    CHECK(c.rate_for(ParamGroup::TrendBias) == 0.0);
    CHECK(c.rate_for(ParamGroup::Phase) == 0.1);
}

TEST_CASE("invalid configs are rejected") {
    const auto s = series_of(20, [](double x) { return x; });
    auto c = small_config();
    c.learning_rate = 0.0;
    CHECK_THROWS_AS(fit(s, c), std::invalid_argument);
    c = small_config();
    c.alpha = -1.0;
    CHECK_THROWS_AS(fit(s, c), std::invalid_argument);
    c = small_config();
    c.hidden = 0;
    CHECK_THROWS_AS(fit(s, c), std::invalid_argument);
    c = small_config();
    c.rates.phase = -0.5;
    CHECK_THROWS_AS(fit(s, c), std::invalid_argument);
}

TEST_CASE("zero epochs returns the initialization") {
    const auto s = series_of(30, [](double x) { return 2.0 * x + std::sin(6.0 * x); });
    auto c = small_config();
    c.epochs = 0;
    const auto r = fit(s, c);
    CHECK(r.epochs_run == 0);
    CHECK(r.cost_history.empty());
    CHECK(r.final_params == init_params(c.hidden, c.grid.size(), s));
}

TEST_CASE("constant series") {
    const auto s = series_of(40, [](double) { return 3.0; });
    auto c = small_config();
    c.epochs = 200;
    const auto r = fit(s, c);
    REQUIRE(r.cost_history.size() == 200);
    CHECK(r.final_cost < r.cost_history.front());
    const std::vector<double> t{0.3, 0.7};
    const auto fc = predict_quantiles(r.final_params, t, c.grid);
    const std::size_t mid = c.grid.nearest(0.5);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(fc.values(i, mid) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("pure line starts near its optimum and never gets worse") {
    const auto s = series_of(50, [](double x) { return 2.0 * x; });
    auto c = small_config();
    c.lambda = 0.0;
    c.epochs = 100;
    // The shared trend bias sees curvature up to 1/(4*alpha) = 25 near zero
    // residuals, so 0.1 overshoots; 0.01 stays inside 2/L.
    c.learning_rate = 0.01;
    const auto r = fit(s, c);
    // Every residual is zero at init, so the cost sits at alpha*ln2.
    CHECK(r.cost_history.front() == doctest::Approx(c.alpha * std::numbers::ln2).epsilon(1e-9));
    for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
        CHECK(r.cost_history[i] <= r.cost_history[i - 1] + 1e-15);
    }
    CHECK(r.final_cost <= r.cost_history.back() + 1e-15);
}

TEST_CASE("small learning rate gives a monotone cost history") {
    auto s = test::a3_series();
    auto [train, test] = split_and_normalize(s, test::kA3TrainFraction);
    normalize_values(train, test);
    auto c = test::a3_config();
    c.lambda = 0.0;
    c.learning_rate = 1e-3;
    c.rates = {};
    c.epochs = 60;
    const auto r = fit(train, c);
    for (std::size_t i = 1; i < r.cost_history.size(); ++i) {
        CHECK(r.cost_history[i] <= r.cost_history[i - 1]);
    }
}

TEST_CASE("default rate ends no worse than it starts") {
    const auto s = series_of(200, [](double x) { return 5.0 + x + std::sin(2.0 * std::numbers::pi * 3.0 * x); });
    auto c = small_config();
    c.epochs = 300;
    const auto r = fit(s, c);
    CHECK(r.final_cost <= r.cost_history.front());
}

TEST_CASE("fit is deterministic") {
    const auto s = series_of(120, [](double x) { return std::cos(9.0 * x) + 0.5 * x; });
    auto c = small_config();
    c.phase_init = PhaseInit::Quadrature;
    const auto a = fit(s, c);
    const auto b = fit(s, c);
    CHECK(a.cost_history == b.cost_history);
    CHECK(a.final_params == b.final_params);
    CHECK(a.final_cost == b.final_cost);
}

TEST_CASE("epoch logger sees every cost") {
    const auto s = series_of(25, [](double x) { return x * x; });
    auto c = small_config();
    c.epochs = 7;
    std::vector<std::size_t> epochs;
    std::vector<double> costs;
    const auto r = fit(s, c, [&](std::size_t e, double v) {
        epochs.push_back(e);
        costs.push_back(v);
    });
    CHECK(epochs == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6});
    CHECK(costs == r.cost_history);
}

TEST_CASE("divergence is reported with its epoch") {
    const auto s = series_of(60, [](double x) { return 100.0 * std::sin(40.0 * x); });
    auto c = small_config();
    c.learning_rate = 1e6;
    c.epochs = 500;
    try {
        fit(s, c);
        FAIL("expected divergence");
    } catch (const DivergedError& e) {
        CHECK(e.epoch() < 500);
        CHECK(std::string(e.what()).find("epoch") != std::string::npos);
    }
}

TEST_CASE("gradient check") {
    const auto s = series_of(80, [](double x) { return 1.0 + x + 0.5 * std::sin(12.0 * x); });
    auto c = small_config();
    c.phase_init = PhaseInit::Quadrature;
    const auto init = init_params(c.hidden, c.grid.size(), s, c.phase_init);
    CHECK(gradient_check(init, s, c, 1e-6) < 1e-5);

    c.epochs = 100;
    const auto trained = fit(s, c).final_params;
    CHECK(gradient_check(trained, s, c, 1e-6) < 1e-5);

    CHECK_THROWS_AS(gradient_check(init, s, c, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(gradient_check(init, s, c, -1e-6), std::invalid_argument);
}

TEST_CASE("gradient check notices a kink finer than its step") {
    // An amplitude inside the smooth-L1 width: the analytic slope is about
    // lambda, a 1e-6 central difference sees almost none of it.
    const auto s = series_of(40, [](double x) { return 2.0 * x; });
    auto c = small_config();
    c.lambda = 1.0;
    c.mix = 1.0;
    auto p = init_params(c.hidden, c.grid.size(), s);
    p.amplitudes(3, 2) = 3e-9;
    const auto t = s.normalized_times();
    const auto r = gradient_check_detailed(p, t, s.values, c, 1e-6);
    CHECK(r.max_relative_error > 0.5);
    CHECK(r.worst_group == ParamGroup::Amplitude);
    CHECK(r.worst_index == 2 * c.hidden + 2 + 3 * (c.hidden + 1) + 2);
}

TEST_CASE("gradient check rejects a grid that does not match the heads") {
    const auto s = series_of(20, [](double x) { return x; });
    auto c = small_config();
    const auto init = init_params(c.hidden, 3, s);
    CHECK_THROWS_AS(gradient_check(init, s, c, 1e-6), std::invalid_argument);
}
