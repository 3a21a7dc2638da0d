#include "qfnn/network.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfnn/summation.hpp"
#include "qfnn/time_series.hpp"

namespace qfnn {

ParameterBlock::ParameterBlock(std::size_t hidden, std::size_t quantiles)
    : freqs(hidden, 0.0),
      phases(hidden, 0.0),
      amplitudes(quantiles, hidden + 1, 0.0),
      out_bias(quantiles, 0.0) {}

std::size_t ParameterBlock::parameter_count() const noexcept {
    return freqs.size() + phases.size() + 2 + amplitudes.size() + out_bias.size();
}

void ParameterBlock::validate() const {
    const std::size_t h = hidden();
    const std::size_t m = quantiles();
    if (h == 0) throw std::invalid_argument("network needs at least one sinusoid unit");
    if (m == 0) throw std::invalid_argument("network needs at least one quantile head");
    if (phases.size() != h) throw std::invalid_argument("phases/freqs length mismatch");
    if (amplitudes.rows() != m || amplitudes.cols() != h + 1) {
        throw std::invalid_argument("amplitude matrix is " + std::to_string(amplitudes.rows()) +
                                    "x" + std::to_string(amplitudes.cols()) + ", expected " +
                                    std::to_string(m) + "x" + std::to_string(h + 1));
    }
    bool finite = std::isfinite(trend_in_weight) && std::isfinite(trend_in_bias);
    for (double v : freqs) finite = finite && std::isfinite(v);
    for (double v : phases) finite = finite && std::isfinite(v);
    for (double v : amplitudes.flat()) finite = finite && std::isfinite(v);
    for (double v : out_bias) finite = finite && std::isfinite(v);
    if (!finite) throw std::invalid_argument("network parameters contain non-finite values");
}

NetworkParams init_params(std::size_t hidden, std::size_t quantiles, std::span<const double> times,
                          std::span<const double> values, PhaseInit phase_init) {
    if (hidden == 0 || quantiles == 0) {
        throw std::invalid_argument("init_params: H and M must be positive");
    }
    if (times.size() != values.size()) {
        throw std::invalid_argument("init_params: times/values length mismatch");
    }
    const std::size_t n = times.size();
    if (n < 2) throw std::invalid_argument("init_params: need at least 2 observations");

    const double dn = static_cast<double>(n);
    const double t_mean = compensated_sum(times) / dn;
    const double y_mean = compensated_sum(values) / dn;
    CompensatedSum sxy;
    CompensatedSum sxx;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = times[i] - t_mean;
        sxy.add(dt * (values[i] - y_mean));
        sxx.add(dt * dt);
    }
    if (!(sxx.value() > 0.0)) throw std::invalid_argument("init_params: zero time variance");
    const double slope = sxy.value() / sxx.value();
    const double intercept = y_mean - slope * t_mean;

    NetworkParams p(hidden, quantiles);
    for (std::size_t i = 0; i < hidden; ++i) {
        const std::size_t k = i + 1;
        p.freqs[i] = 2.0 * std::numbers::pi * static_cast<double>(k / 2);
        if (phase_init == PhaseInit::Quadrature && k >= 3 && k % 2 == 1) {
            p.phases[i] = std::numbers::pi / 2.0;
        }
    }
    p.trend_in_weight = slope;
    p.trend_in_bias = 0.0;
    for (std::size_t m = 0; m < quantiles; ++m) {
        p.amplitudes(m, p.trend_column()) = 1.0;
        p.out_bias[m] = intercept;
    }
    return p;
}

NetworkParams init_params(std::size_t hidden, std::size_t quantiles, const TimeSeries& train,
                          PhaseInit phase_init) {
    const auto t = train.normalized_times();
    const auto y = train.model_values();
    return init_params(hidden, quantiles, t, y, phase_init);
}

ForwardResult forward(const NetworkParams& params, std::span<const double> times) {
    return kernels::forward(params, times);
}

std::vector<double> regularized_weights(const ParameterBlock& params, RegScope scope) {
    std::vector<double> out;
    ParameterBlock copy = params;
    for_each_regularized(copy, scope, [&](double& v) { out.push_back(v); });
    return out;
}

BackwardResult backward(const NetworkParams& params, std::span<const double> times,
                        std::span<const double> values, const QuantileGrid& grid,
                        const LossConfig& cfg, RegScope scope) {
    return kernels::backward(params, times, values, grid, cfg, scope);
}

BackwardResult backward(const NetworkParams& params, const TimeSeries& train,
                        const QuantileGrid& grid, const LossConfig& cfg, RegScope scope) {
    const auto t = train.normalized_times();
    const auto y = train.model_values();
    return kernels::backward(params, t, y, grid, cfg, scope);
}

double cost(const NetworkParams& params, std::span<const double> times,
            std::span<const double> values, const QuantileGrid& grid, const LossConfig& cfg,
            RegScope scope) {
    if (params.quantiles() != grid.size()) {
        throw std::invalid_argument("cost: network has " + std::to_string(params.quantiles()) +
                                    " heads but grid has " + std::to_string(grid.size()));
    }
    if (times.size() != values.size()) throw std::invalid_argument("cost: length mismatch");
    const auto fwd = kernels::forward(params, times);
    return total_cost(values, fwd.qhat, grid, regularized_weights(params, scope), cfg);
}

QuantileForecast predict_quantiles(const NetworkParams& params, std::span<const double> times,
                                   const QuantileGrid& grid) {
    if (params.quantiles() != grid.size()) {
        throw std::invalid_argument("predict_quantiles: grid size does not match network heads");
    }
    QuantileForecast out;
    out.times.assign(times.begin(), times.end());
    out.grid = grid;
    out.values = kernels::forward(params, times).qhat;
    if (times.empty()) out.values = Matrix(0, grid.size());
    return out;
}

}  // namespace qfnn
