#include "qfnn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qfnn/errors.hpp"
#include "qfnn/quantile_loss.hpp"
#include "qfnn/summation.hpp"
#include "qfnn/time_series.hpp"

namespace qfnn {
namespace {

constexpr double kSmallGradient = 1e-3;

bool all_finite(ParameterBlock& p) {
    bool ok = true;
    p.for_each([&](ParamGroup, double& v) { ok = ok && std::isfinite(v); });
    return ok;
}

// Data term of head m alone plus the whole penalty. The other heads add the
// same amount to both sides of a central difference, so they are left out.
double head_cost(const NetworkParams& p, const Matrix& hidden, std::size_t m,
                 std::span<const double> values, const QuantileGrid& grid, const LossConfig& loss,
                 RegScope scope) {
    const std::size_t n = values.size();
    const double nm = static_cast<double>(n) * static_cast<double>(grid.size());
    const auto amp = p.amplitudes.row(m);
    CompensatedSum sum;
    for (std::size_t t = 0; t < n; ++t) {
        const auto h = hidden.row(t);
        double q = p.out_bias[m];
        for (std::size_t k = 0; k < amp.size(); ++k) q += amp[k] * h[k];
        sum.add(smooth_pinball(values[t] - q, grid[m], loss.alpha));
    }
    return sum.value() / nm + elastic_net_penalty(regularized_weights(p, scope), loss);
}

}  // namespace

double TrainConfig::rate_for(ParamGroup group) const {
    switch (group) {
        case ParamGroup::Frequency: return rates.frequency.value_or(learning_rate);
        case ParamGroup::Phase: return rates.phase.value_or(learning_rate);
        case ParamGroup::TrendWeight:
        case ParamGroup::TrendBias: return rates.trend.value_or(learning_rate);
        case ParamGroup::Amplitude: return rates.amplitude.value_or(learning_rate);
        case ParamGroup::OutputBias: return rates.output_bias.value_or(learning_rate);
    }
    return learning_rate;
}

void TrainConfig::validate() const {
    if (hidden == 0) throw std::invalid_argument("hidden sinusoid count must be positive");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    for (const auto& r : {rates.frequency, rates.phase, rates.trend, rates.amplitude,
                          rates.output_bias}) {
        if (r && !(*r >= 0.0)) throw std::invalid_argument("group learning rates must be >= 0");
    }
    if (grid.size() == 0) throw std::invalid_argument("quantile grid is empty");
    loss().validate();
}

TrainReport fit_from(NetworkParams params, std::span<const double> times,
                     std::span<const double> values, const TrainConfig& cfg,
                     const EpochLogger& log) {
    cfg.validate();
    const LossConfig loss = cfg.loss();

    TrainReport report;
    report.cost_history.reserve(cfg.epochs);
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        auto step = backward(params, times, values, cfg.grid, loss, cfg.reg_scope);
        if (!std::isfinite(step.cost)) throw DivergedError(epoch, step.cost);
        report.cost_history.push_back(step.cost);
        if (log) log(epoch, step.cost);

        std::vector<double> grads;
        grads.reserve(params.parameter_count());
        step.grads.for_each([&](ParamGroup, double& g) { grads.push_back(g); });
        std::size_t i = 0;
        params.for_each([&](ParamGroup group, double& v) { v -= cfg.rate_for(group) * grads[i++]; });
        if (!all_finite(params)) {
            throw DivergedError(epoch + 1, std::numeric_limits<double>::quiet_NaN());
        }
    }
    report.final_cost = cost(params, times, values, cfg.grid, loss, cfg.reg_scope);
    if (!std::isfinite(report.final_cost)) throw DivergedError(cfg.epochs, report.final_cost);
    report.epochs_run = cfg.epochs;
    report.final_params = std::move(params);
    return report;
}

TrainReport fit(const TimeSeries& train, const TrainConfig& cfg, const EpochLogger& log) {
    cfg.validate();
    train.validate();
    const auto t = train.normalized_times();
    const auto y = train.model_values();
    auto init = init_params(cfg.hidden, cfg.grid.size(), t, y, cfg.phase_init);
    return fit_from(std::move(init), t, y, cfg, log);
}

GradientCheckResult gradient_check_detailed(const NetworkParams& params,
                                            std::span<const double> times,
                                            std::span<const double> values,
                                            const TrainConfig& cfg, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("gradient_check step must be positive");
    const LossConfig loss = cfg.loss();
    auto analytic = backward(params, times, values, cfg.grid, loss, cfg.reg_scope).grads;
    std::vector<double> g;
    g.reserve(params.parameter_count());
    analytic.for_each([&](ParamGroup, double& v) { g.push_back(v); });

    GradientCheckResult result;
    NetworkParams probe = params;
    std::vector<double*> slots;
    std::vector<ParamGroup> groups;
    std::vector<std::size_t> heads;  // owning head for per-head parameters
    std::size_t amp_seen = 0;
    std::size_t bias_seen = 0;
    probe.for_each([&](ParamGroup group, double& v) {
        slots.push_back(&v);
        groups.push_back(group);
        if (group == ParamGroup::Amplitude) {
            heads.push_back(amp_seen++ / probe.amplitudes.cols());
        } else if (group == ParamGroup::OutputBias) {
            heads.push_back(bias_seen++);
        } else {
            heads.push_back(probe.quantiles());
        }
    });
    // Hidden activations do not depend on per-head parameters.
    const Matrix hidden = forward(params, times).hidden;
    const auto objective = [&](std::size_t i) {
        if (heads[i] < probe.quantiles()) {
            return head_cost(probe, hidden, heads[i], values, cfg.grid, loss, cfg.reg_scope);
        }
        return cost(probe, times, values, cfg.grid, loss, cfg.reg_scope);
    };
    for (std::size_t i = 0; i < slots.size(); ++i) {
        double& v = *slots[i];
        const double saved = v;
        v = saved + step;
        const double up = objective(i);
        v = saved - step;
        const double down = objective(i);
        v = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double denom = std::max({std::fabs(g[i]), std::fabs(numeric), kSmallGradient});
        const double err = std::fabs(g[i] - numeric) / denom;
        if (err > result.max_relative_error || !std::isfinite(err)) {
            result.max_relative_error = std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
            result.worst_group = groups[i];
            result.worst_index = i;
        }
    }
    return result;
}

double gradient_check(const NetworkParams& params, const TimeSeries& train, const TrainConfig& cfg,
                      double step) {
    const auto t = train.normalized_times();
    const auto y = train.model_values();
    return gradient_check_detailed(params, t, y, cfg, step).max_relative_error;
}

}  // namespace qfnn
