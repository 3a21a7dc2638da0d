#pragma once

#include <span>

#include "qfnn/forecast.hpp"
#include "qfnn/matrix.hpp"

namespace qfnn {

struct LossConfig {
    double alpha = 0.01;       // smoothing of the pinball kink
    double lambda = 0.1;       // elastic-net strength
    double mix = 0.5;          // L1 fraction of the elastic net
    double l1_epsilon = 1e-8;  // pseudo-Huber width for the smooth |w|

    void validate() const;
};

// Tilted absolute loss; residual convention u = y - q.
double pinball(double u, double tau);

// tau*u + alpha*log(1 + exp(-u/alpha)), evaluated without overflow for any u/alpha.
double smooth_pinball(double u, double tau, double alpha);

// smooth_pinball - pinball = alpha*log1p(exp(-|u|/alpha)), in extended precision
// so the gap stays representable where the double result has underflowed.
long double smooth_pinball_gap(double u, double alpha);

// d smooth_pinball / du = tau - 1/(1 + exp(u/alpha)).
double smooth_pinball_grad(double u, double tau, double alpha);

// sqrt(w^2 + eps^2) - eps and its derivative.
double smooth_abs(double w, double eps) noexcept;
double smooth_abs_grad(double w, double eps) noexcept;

double elastic_net_penalty(std::span<const double> weights, const LossConfig& cfg);

// d penalty / d w for a single weight.
double elastic_net_grad(double w, const LossConfig& cfg) noexcept;

// Mean smooth pinball over the N x M residual grid plus the elastic-net
// penalty of `reg_weights`. Summed in a fixed order with compensation.
double total_cost(std::span<const double> y, const Matrix& qhat, const QuantileGrid& grid,
                  std::span<const double> reg_weights, const LossConfig& cfg);

}  // namespace qfnn
