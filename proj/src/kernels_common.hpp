#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

#include "qfnn/network.hpp"

namespace qfnn::kernels::detail {

inline void check_shapes(const NetworkParams& params, std::span<const double> times,
                         std::span<const double> values, const QuantileGrid& grid) {
    params.validate();
    if (times.size() != values.size()) {
        throw std::invalid_argument("backward: " + std::to_string(times.size()) + " times but " +
                                    std::to_string(values.size()) + " values");
    }
    if (params.quantiles() != grid.size()) {
        throw std::invalid_argument("backward: network has " +
                                    std::to_string(params.quantiles()) +
                                    " heads but grid has " + std::to_string(grid.size()));
    }
}

// log(1 + exp(x)) for any finite x.
inline double softplus(double x) noexcept {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// 1 / (1 + exp(z)) without overflow.
inline double logistic_complement(double z) noexcept {
    if (z >= 0.0) {
        const double e = std::exp(-z);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(z));
}

// Adds d(penalty)/dw to the regularized entries of `grads`; `weights` holds the
// matching parameter values in for_each_regularized order.
inline void add_penalty_gradient(Gradients& grads, RegScope scope,
                                 std::span<const double> weights, const LossConfig& cfg) {
    if (cfg.lambda == 0.0) return;
    std::size_t i = 0;
    for_each_regularized(grads, scope, [&](double& g) { g += elastic_net_grad(weights[i++], cfg); });
}

}  // namespace qfnn::kernels::detail
