#include <cmath>
#include <vector>

#include "kernels_common.hpp"
#include "qfnn/network.hpp"
#include "qfnn/summation.hpp"

namespace qfnn::kernels {

namespace {

using Index = std::ptrdiff_t;

// Fills hidden (N x (H+1)) and qhat (N x M), one time row per iteration.
void forward_into(const NetworkParams& p, std::span<const double> times, Matrix& hidden,
                  Matrix& qhat) {
    const std::size_t h = p.hidden();
    const std::size_t k_count = h + 1;
    const std::size_t m_count = p.quantiles();
    const auto n = static_cast<Index>(times.size());
#pragma omp parallel for schedule(static)
    for (Index ti = 0; ti < n; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        const double x = times[t];
        auto hrow = hidden.row(t);
        for (std::size_t k = 0; k < h; ++k) hrow[k] = std::cos(p.freqs[k] * x + p.phases[k]);
        hrow[h] = p.trend_in_weight * x + p.trend_in_bias;
        auto qrow = qhat.row(t);
        for (std::size_t m = 0; m < m_count; ++m) {
            const auto a = p.amplitudes.row(m);
            double acc = 0.0;
            for (std::size_t k = 0; k < k_count; ++k) acc += a[k] * hrow[k];
            qrow[m] = acc + p.out_bias[m];
        }
    }
}

}  // namespace

ForwardResult forward(const NetworkParams& params, std::span<const double> times) {
    params.validate();
    ForwardResult out{Matrix(times.size(), params.quantiles()),
                      Matrix(times.size(), params.hidden() + 1)};
    forward_into(params, times, out.hidden, out.qhat);
    return out;
}

BackwardResult backward(const NetworkParams& params, std::span<const double> times,
                        std::span<const double> values, const QuantileGrid& grid,
                        const LossConfig& cfg, RegScope scope) {
    detail::check_shapes(params, times, values, grid);
    cfg.validate();

    const std::size_t n = times.size();
    const std::size_t h = params.hidden();
    const std::size_t k_count = h + 1;
    const std::size_t m_count = params.quantiles();
    const auto rows = static_cast<Index>(n);

    Matrix hidden(n, k_count);
    Matrix qhat(n, m_count);
    forward_into(params, times, hidden, qhat);

    // dE/dq for every cell, stored row-major (for dE/dhidden) and transposed
    // (for the per-head reductions over time).
    Matrix dq(n, m_count);
    Matrix dq_t(m_count, n);
    Matrix hidden_t(k_count, n);
    std::vector<double> row_loss(n);
    const double nm = static_cast<double>(n * m_count);

#pragma omp parallel for schedule(static)
    for (Index ti = 0; ti < rows; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        const double y = values[t];
        const auto q = qhat.row(t);
        CompensatedSum acc;
        for (std::size_t m = 0; m < m_count; ++m) {
            const double u = y - q[m];
            const double z = u / cfg.alpha;
            acc.add(grid[m] * u + cfg.alpha * detail::softplus(-z));
            const double g = -(grid[m] - detail::logistic_complement(z)) / nm;
            dq(t, m) = g;
            dq_t(m, t) = g;
        }
        row_loss[t] = acc.value();
        for (std::size_t k = 0; k < k_count; ++k) hidden_t(k, t) = hidden(t, k);
    }

    BackwardResult out;
    out.grads = Gradients(h, m_count);
    Gradients& g = out.grads;

    // Output layer: one head per iteration, time summed in order.
    const auto heads = static_cast<Index>(m_count);
#pragma omp parallel for schedule(static)
    for (Index mi = 0; mi < heads; ++mi) {
        const auto m = static_cast<std::size_t>(mi);
        const auto d = dq_t.row(m);
        double bias = 0.0;
        for (std::size_t t = 0; t < n; ++t) bias += d[t];
        g.out_bias[m] = bias;
        auto ga = g.amplitudes.row(m);
        for (std::size_t k = 0; k < k_count; ++k) {
            const auto hk = hidden_t.row(k);
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) acc += d[t] * hk[t];
            ga[k] = acc;
        }
    }

    // Back through the amplitudes: dE/dhidden, stored transposed.
    Matrix dh_t(k_count, n);
#pragma omp parallel for schedule(static)
    for (Index ti = 0; ti < rows; ++ti) {
        const auto t = static_cast<std::size_t>(ti);
        const auto d = dq.row(t);
        for (std::size_t k = 0; k < k_count; ++k) {
            double acc = 0.0;
            for (std::size_t m = 0; m < m_count; ++m) acc += d[m] * params.amplitudes(m, k);
            dh_t(k, t) = acc;
        }
    }

    // Hidden layer: one unit per iteration.
    const auto units = static_cast<Index>(k_count);
#pragma omp parallel for schedule(static)
    for (Index ki = 0; ki < units; ++ki) {
        const auto k = static_cast<std::size_t>(ki);
        const auto dh = dh_t.row(k);
        double d_in_weight = 0.0;
        double d_in_bias = 0.0;
        if (k < h) {
            for (std::size_t t = 0; t < n; ++t) {
                const double s = -std::sin(params.freqs[k] * times[t] + params.phases[k]) * dh[t];
                d_in_weight += s * times[t];
                d_in_bias += s;
            }
            g.freqs[k] = d_in_weight;
            g.phases[k] = d_in_bias;
        } else {
            for (std::size_t t = 0; t < n; ++t) {
                d_in_weight += dh[t] * times[t];
                d_in_bias += dh[t];
            }
            g.trend_in_weight = d_in_weight;
            g.trend_in_bias = d_in_bias;
        }
    }

    const auto reg = regularized_weights(params, scope);
    detail::add_penalty_gradient(g, scope, reg, cfg);

    const double loss = n > 0 ? compensated_sum(row_loss) / nm : 0.0;
    out.cost = loss + elastic_net_penalty(reg, cfg);
    return out;
}

}  // namespace qfnn::kernels
