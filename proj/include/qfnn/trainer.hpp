#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qfnn/forecast.hpp"
#include "qfnn/network.hpp"
#include "qfnn/quantile_loss.hpp"

namespace qfnn {

struct TimeSeries;

// Optional per-group learning rates; unset groups use TrainConfig::learning_rate.
struct GroupRates {
    std::optional<double> frequency;
    std::optional<double> phase;
    std::optional<double> trend;  // trend_in_weight and trend_in_bias
    std::optional<double> amplitude;
    std::optional<double> output_bias;
};

struct TrainConfig {
    std::size_t epochs = 1000;
    double learning_rate = 0.1;
    double alpha = 0.01;
    double lambda = 0.1;
    double mix = 0.5;
    double l1_epsilon = 1e-8;
    std::size_t hidden = 20;
    QuantileGrid grid = QuantileGrid::uniform();
    PhaseInit phase_init = PhaseInit::Zero;
    RegScope reg_scope = RegScope::Amplitudes;
    GroupRates rates;

    LossConfig loss() const { return {alpha, lambda, mix, l1_epsilon}; }
    double rate_for(ParamGroup group) const;
    void validate() const;
};

struct TrainReport {
    std::vector<double> cost_history;  // cost before each update
    NetworkParams final_params;
    std::size_t epochs_run = 0;
    double final_cost = 0.0;  // cost of final_params
};

using EpochLogger = std::function<void(std::size_t epoch, double cost)>;

// Full-batch gradient descent for exactly cfg.epochs steps from init_params().
// Throws DivergedError if the cost or the parameters become non-finite.
TrainReport fit(const TimeSeries& train, const TrainConfig& cfg, const EpochLogger& log = {});

// Same loop from explicit starting parameters and model-space data.
TrainReport fit_from(NetworkParams params, std::span<const double> times,
                     std::span<const double> values, const TrainConfig& cfg,
                     const EpochLogger& log = {});

struct GradientCheckResult {
    double max_relative_error = 0.0;
    ParamGroup worst_group = ParamGroup::Frequency;
    std::size_t worst_index = 0;  // position in canonical parameter order
};

// Compares backward() with central differences of the cost over every
// parameter. Gradients below 1e-3 in magnitude are compared against a 1e-3
// denominator, so a 1e-8 absolute deviation there counts as 1e-5.
GradientCheckResult gradient_check_detailed(const NetworkParams& params,
                                            std::span<const double> times,
                                            std::span<const double> values,
                                            const TrainConfig& cfg, double step);
double gradient_check(const NetworkParams& params, const TimeSeries& train, const TrainConfig& cfg,
                      double step);

}  // namespace qfnn
