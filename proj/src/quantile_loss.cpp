#include "qfnn/quantile_loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "qfnn/summation.hpp"

namespace qfnn {
namespace {

void require_tau(double tau) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw std::invalid_argument("tau must lie in (0,1), got " + std::to_string(tau));
    }
}

void require_alpha(double alpha) {
    if (!(alpha > 0.0)) {
        throw std::invalid_argument("alpha must be positive, got " + std::to_string(alpha));
    }
}

// log(1 + exp(x)) for any finite x.
double softplus(double x) noexcept {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

void LossConfig::validate() const {
    require_alpha(alpha);
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    if (!(mix >= 0.0 && mix <= 1.0)) throw std::invalid_argument("mix must lie in [0,1]");
    if (!(l1_epsilon > 0.0)) throw std::invalid_argument("l1_epsilon must be positive");
}

double pinball(double u, double tau) {
    require_tau(tau);
    return u >= 0.0 ? tau * u : (tau - 1.0) * u;
}

double smooth_pinball(double u, double tau, double alpha) {
    require_alpha(alpha);
    return tau * u + alpha * softplus(-u / alpha);
}

long double smooth_pinball_gap(double u, double alpha) {
    require_alpha(alpha);
    const long double x = std::fabs(static_cast<long double>(u)) / alpha;
    return static_cast<long double>(alpha) * std::log1p(std::exp(-x));
}

double smooth_pinball_grad(double u, double tau, double alpha) {
    require_alpha(alpha);
    const double z = u / alpha;
    // 1/(1+e^z), split on sign so exp never overflows.
    double logistic;
    if (z >= 0.0) {
        const double e = std::exp(-z);
        logistic = e / (1.0 + e);
    } else {
        logistic = 1.0 / (1.0 + std::exp(z));
    }
    return tau - logistic;
}

double smooth_abs(double w, double eps) noexcept {
    return std::hypot(w, eps) - eps;
}

double smooth_abs_grad(double w, double eps) noexcept {
    return w / std::hypot(w, eps);
}

double elastic_net_penalty(std::span<const double> weights, const LossConfig& cfg) {
    if (cfg.lambda == 0.0) return 0.0;
    CompensatedSum l1;
    CompensatedSum l2;
    for (double w : weights) {
        l1.add(smooth_abs(w, cfg.l1_epsilon));
        l2.add(w * w);
    }
    return cfg.lambda * (cfg.mix * l1.value() + (1.0 - cfg.mix) * l2.value());
}

double elastic_net_grad(double w, const LossConfig& cfg) noexcept {
    return cfg.lambda * (cfg.mix * smooth_abs_grad(w, cfg.l1_epsilon) + (1.0 - cfg.mix) * 2.0 * w);
}

double total_cost(std::span<const double> y, const Matrix& qhat, const QuantileGrid& grid,
                  std::span<const double> reg_weights, const LossConfig& cfg) {
    cfg.validate();
    const std::size_t n = y.size();
    const std::size_t m_count = grid.size();
    if (qhat.rows() != n || qhat.cols() != m_count) {
        throw std::invalid_argument("total_cost: qhat is " + std::to_string(qhat.rows()) + "x" +
                                    std::to_string(qhat.cols()) + ", expected " +
                                    std::to_string(n) + "x" + std::to_string(m_count));
    }
    if (n == 0) return elastic_net_penalty(reg_weights, cfg);

    std::vector<double> row_sums(n);
    const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < rows; ++t) {
        const auto q = qhat.row(static_cast<std::size_t>(t));
        const double yt = y[static_cast<std::size_t>(t)];
        CompensatedSum acc;
        for (std::size_t m = 0; m < m_count; ++m) {
            const double u = yt - q[m];
            acc.add(grid[m] * u + cfg.alpha * softplus(-u / cfg.alpha));
        }
        row_sums[static_cast<std::size_t>(t)] = acc.value();
    }
    const double loss = compensated_sum(row_sums) / static_cast<double>(n * m_count);
    return loss + elastic_net_penalty(reg_weights, cfg);
}

}  // namespace qfnn
