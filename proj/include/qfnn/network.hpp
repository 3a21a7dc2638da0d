#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qfnn/forecast.hpp"
#include "qfnn/matrix.hpp"
#include "qfnn/quantile_loss.hpp"

namespace qfnn {

struct TimeSeries;

// Which parameter a scalar belongs to; used for per-group learning rates and
// for reporting gradient-check failures.
enum class ParamGroup { Frequency, Phase, TrendWeight, TrendBias, Amplitude, OutputBias };

// Shared layout of the network parameters and of their gradients.
//
// Hidden layer: H cosine units cos(freqs[k] * t + phases[k]) followed by one
// affine trend unit trend_in_weight * t + trend_in_bias. Output layer: M linear
// heads, one per quantile level, q = amplitudes * hidden + out_bias. The
// amplitude matrix is M x (H + 1); its last column weights the trend unit.
struct ParameterBlock {
    std::vector<double> freqs;
    std::vector<double> phases;
    double trend_in_weight = 0.0;
    double trend_in_bias = 0.0;
    Matrix amplitudes;
    std::vector<double> out_bias;

    ParameterBlock() = default;
    ParameterBlock(std::size_t hidden, std::size_t quantiles);

    std::size_t hidden() const noexcept { return freqs.size(); }
    std::size_t quantiles() const noexcept { return out_bias.size(); }
    std::size_t trend_column() const noexcept { return freqs.size(); }
    std::size_t parameter_count() const noexcept;

    // Throws std::invalid_argument on inconsistent shapes or non-finite entries.
    void validate() const;

    bool operator==(const ParameterBlock&) const = default;

    // Visits every scalar in a fixed canonical order.
    template <typename Fn>
    void for_each(Fn&& fn) {
        for (double& v : freqs) fn(ParamGroup::Frequency, v);
        for (double& v : phases) fn(ParamGroup::Phase, v);
        fn(ParamGroup::TrendWeight, trend_in_weight);
        fn(ParamGroup::TrendBias, trend_in_bias);
        for (double& v : amplitudes.flat()) fn(ParamGroup::Amplitude, v);
        for (double& v : out_bias) fn(ParamGroup::OutputBias, v);
    }
};

struct NetworkParams : ParameterBlock {
    using ParameterBlock::ParameterBlock;
};

struct Gradients : ParameterBlock {
    using ParameterBlock::ParameterBlock;
};

enum class PhaseInit { Zero, Quadrature };

// Parameters covered by the elastic-net penalty: the whole amplitude matrix
// (sinusoid and trend columns), only its sinusoid columns, or every parameter.
enum class RegScope { Amplitudes, Sinusoids, All };

// Visits the penalized scalars of `block` in canonical order.
template <typename Block, typename Fn>
void for_each_regularized(Block& block, RegScope scope, Fn&& fn) {
    switch (scope) {
        case RegScope::All:
            block.for_each([&](ParamGroup, double& v) { fn(v); });
            break;
        case RegScope::Amplitudes:
            for (double& v : block.amplitudes.flat()) fn(v);
            break;
        case RegScope::Sinusoids:
            for (std::size_t m = 0; m < block.amplitudes.rows(); ++m) {
                for (std::size_t k = 0; k < block.hidden(); ++k) fn(block.amplitudes(m, k));
            }
            break;
    }
}

struct ForwardResult {
    Matrix qhat;    // N x M
    Matrix hidden;  // N x (H + 1)
};

struct BackwardResult {
    double cost = 0.0;
    Gradients grads;
};

// Frequencies 2*pi*floor(k/2) for k = 1..H, zero phases (or pi/2 on odd k >= 3
// under PhaseInit::Quadrature), zero sinusoid amplitudes, and a trend path that
// reproduces the least-squares line of values on times for every quantile.
NetworkParams init_params(std::size_t hidden, std::size_t quantiles, std::span<const double> times,
                          std::span<const double> values, PhaseInit phase_init = PhaseInit::Zero);
NetworkParams init_params(std::size_t hidden, std::size_t quantiles, const TimeSeries& train,
                          PhaseInit phase_init = PhaseInit::Zero);

ForwardResult forward(const NetworkParams& params, std::span<const double> times);

// Weights fed to the elastic-net penalty, in canonical order.
std::vector<double> regularized_weights(const ParameterBlock& params, RegScope scope);

BackwardResult backward(const NetworkParams& params, std::span<const double> times,
                        std::span<const double> values, const QuantileGrid& grid,
                        const LossConfig& cfg, RegScope scope = RegScope::Amplitudes);
BackwardResult backward(const NetworkParams& params, const TimeSeries& train,
                        const QuantileGrid& grid, const LossConfig& cfg,
                        RegScope scope = RegScope::Amplitudes);

// Cost only; same value as backward().cost.
double cost(const NetworkParams& params, std::span<const double> times,
            std::span<const double> values, const QuantileGrid& grid, const LossConfig& cfg,
            RegScope scope = RegScope::Amplitudes);

// Raw network output for the given (normalized) times. No clamping or
// monotone correction.
QuantileForecast predict_quantiles(const NetworkParams& params, std::span<const double> times,
                                   const QuantileGrid& grid);

namespace kernels {

// OpenMP kernels. Every reduction runs in a fixed order, so results are
// bit-identical for any thread count.
ForwardResult forward(const NetworkParams& params, std::span<const double> times);
BackwardResult backward(const NetworkParams& params, std::span<const double> times,
                        std::span<const double> values, const QuantileGrid& grid,
                        const LossConfig& cfg, RegScope scope);

// Straightforward single-threaded reference used to validate the kernels above.
namespace serial {
ForwardResult forward(const NetworkParams& params, std::span<const double> times);
BackwardResult backward(const NetworkParams& params, std::span<const double> times,
                        std::span<const double> values, const QuantileGrid& grid,
                        const LossConfig& cfg, RegScope scope);
}  // namespace serial

}  // namespace kernels

}  // namespace qfnn
