#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qfnn/network.hpp"

using namespace qfnn;

namespace {

struct Problem {
    NetworkParams params;
    std::vector<double> times;
    std::vector<double> values;
    QuantileGrid grid;
};

Problem make_problem(std::size_t n, std::size_t h, std::size_t m) {
    Problem p;
    p.grid = QuantileGrid::uniform(m, 0.05, 0.95);
    p.params = NetworkParams(h, m);
    for (std::size_t k = 0; k < h; ++k) {
        p.params.freqs[k] = 2.0 * std::numbers::pi * static_cast<double>((k + 1) / 2) + 0.01 * k;
        p.params.phases[k] = 0.1 * std::sin(static_cast<double>(k));
    }
    p.params.trend_in_weight = 1.3;
    p.params.trend_in_bias = 0.2;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = 0; k <= h; ++k) p.params.amplitudes(i, k) = 0.2 * std::cos(0.3 * i + 1.1 * k);
        p.params.out_bias[i] = -0.5 + static_cast<double>(i) / static_cast<double>(m);
    }
    for (std::size_t t = 0; t < n; ++t) {
        const double x = static_cast<double>(t) / static_cast<double>(n - 1);
        p.times.push_back(x);
        p.values.push_back(std::sin(2.0 * std::numbers::pi * 3.0 * x) + x + 0.3 * std::cos(97.0 * x));
    }
    return p;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300}); }

}  // namespace

TEST_CASE("OpenMP forward agrees bit for bit with the serial reference") {
    const auto p = make_problem(257, 9, 13);
    const auto fast = kernels::forward(p.params, p.times);
    const auto ref = kernels::serial::forward(p.params, p.times);
    CHECK(fast.qhat == ref.qhat);
    CHECK(fast.hidden == ref.hidden);
}

TEST_CASE("OpenMP backward agrees with the serial reference") {
    const auto p = make_problem(301, 7, 11);
    for (RegScope scope : {RegScope::Amplitudes, RegScope::Sinusoids, RegScope::All}) {
        const LossConfig cfg{0.05, 0.02, 0.5, 1e-6};
        const auto fast = kernels::backward(p.params, p.times, p.values, p.grid, cfg, scope);
        const auto ref = kernels::serial::backward(p.params, p.times, p.values, p.grid, cfg, scope);
        CHECK(rel(fast.cost, ref.cost) < 1e-14);
        // Output-layer sums run over time in the same order in both paths.
        CHECK(fast.grads.amplitudes == ref.grads.amplitudes);
        CHECK(fast.grads.out_bias == ref.grads.out_bias);
        // Hidden-layer sums are reassociated (over heads first, then time).
        Gradients f = fast.grads;
        Gradients r = ref.grads;
        std::vector<double> fv;
        std::vector<double> rv;
        f.for_each([&](ParamGroup, double& v) { fv.push_back(v); });
        r.for_each([&](ParamGroup, double& v) { rv.push_back(v); });
        REQUIRE(fv.size() == rv.size());
        for (std::size_t i = 0; i < fv.size(); ++i) {
            CHECK(std::fabs(fv[i] - rv[i]) <= 1e-12 * std::max(1.0, std::fabs(rv[i])));
        }
    }
}

TEST_CASE("kernels are bit-identical across thread counts") {
    const auto p = make_problem(513, 12, 17);
    const LossConfig cfg{0.01, 0.1, 0.5, 1e-8};
    const int saved = omp_get_max_threads();

    omp_set_num_threads(1);
    const auto one = kernels::backward(p.params, p.times, p.values, p.grid, cfg, RegScope::Amplitudes);
    const auto one_fwd = kernels::forward(p.params, p.times);
    const double one_cost = total_cost(p.values, one_fwd.qhat, p.grid, {}, cfg);
    for (int threads : {2, 3, 8}) {
        omp_set_num_threads(threads);
        const auto many = kernels::backward(p.params, p.times, p.values, p.grid, cfg, RegScope::Amplitudes);
        CHECK(many.cost == one.cost);
        CHECK(many.grads == one.grads);
        const auto fwd = kernels::forward(p.params, p.times);
        CHECK(fwd.qhat == one_fwd.qhat);
        CHECK(total_cost(p.values, fwd.qhat, p.grid, {}, cfg) == one_cost);
    }
    omp_set_num_threads(saved);
}

TEST_CASE("empty batch") {
    const auto p = make_problem(4, 3, 2);
    const std::vector<double> none;
    const LossConfig cfg{0.1, 0.0, 0.5, 1e-8};
    const auto fast = kernels::backward(p.params, none, none, p.grid, cfg, RegScope::Amplitudes);
    const auto ref = kernels::serial::backward(p.params, none, none, p.grid, cfg, RegScope::Amplitudes);
    CHECK(fast.cost == 0.0);
    CHECK(ref.cost == 0.0);
    CHECK(fast.grads == ref.grads);
}
