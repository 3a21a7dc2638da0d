// Serial reference vs OpenMP kernels on a seasonal problem of size N x M.
#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qfnn/network.hpp"

using namespace qfnn;

namespace {

struct Problem {
    std::vector<double> t;
    std::vector<double> y;
    QuantileGrid grid;
    NetworkParams params;
    LossConfig loss;

    Problem(std::size_t n, std::size_t m, std::size_t h) : grid(QuantileGrid::uniform(m)) {
        for (std::size_t i = 0; i < n; ++i) {
            const double r = static_cast<double>(i) / static_cast<double>(n - 1);
            t.push_back(r);
            y.push_back(1.0 + r + std::sin(8.0 * std::numbers::pi * r) + 0.1 * std::cos(97.0 * i));
        }
        params = init_params(h, m, t, y, PhaseInit::Quadrature);
        for (std::size_t k = 0; k < params.amplitudes.size(); ++k)
            params.amplitudes.flat()[k] += 0.01 * std::sin(static_cast<double>(k));
    }
};

void BM_ForwardSerial(benchmark::State& state) {
    Problem p(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 20);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::forward(p.params, p.t));
}

void BM_ForwardOmp(benchmark::State& state) {
    Problem p(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 20);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::forward(p.params, p.t));
}

void BM_BackwardSerial(benchmark::State& state) {
    Problem p(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 20);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            kernels::serial::backward(p.params, p.t, p.y, p.grid, p.loss, RegScope::Amplitudes));
}

void BM_BackwardOmp(benchmark::State& state) {
    Problem p(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)), 20);
    for (auto _ : state)
        benchmark::DoNotOptimize(kernels::backward(p.params, p.t, p.y, p.grid, p.loss, RegScope::Amplitudes));
}

void sizes(benchmark::internal::Benchmark* b) {
    b->Args({1000, 9})->Args({1000, 100})->Args({10000, 100})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ForwardSerial)->Apply(sizes);
BENCHMARK(BM_ForwardOmp)->Apply(sizes);
BENCHMARK(BM_BackwardSerial)->Apply(sizes);
BENCHMARK(BM_BackwardOmp)->Apply(sizes);

BENCHMARK_MAIN();
