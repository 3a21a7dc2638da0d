#include <cmath>
#include <vector>

#include "kernels_common.hpp"
#include "qfnn/network.hpp"
#include "qfnn/summation.hpp"

namespace qfnn::kernels::serial {

ForwardResult forward(const NetworkParams& params, std::span<const double> times) {
    params.validate();
    const std::size_t n = times.size();
    const std::size_t h = params.hidden();
    const std::size_t m_count = params.quantiles();
    ForwardResult out{Matrix(n, m_count), Matrix(n, h + 1)};
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t k = 0; k < h; ++k) {
            out.hidden(t, k) = std::cos(params.freqs[k] * times[t] + params.phases[k]);
        }
        out.hidden(t, h) = params.trend_in_weight * times[t] + params.trend_in_bias;
        for (std::size_t m = 0; m < m_count; ++m) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= h; ++k) acc += params.amplitudes(m, k) * out.hidden(t, k);
            out.qhat(t, m) = acc + params.out_bias[m];
        }
    }
    return out;
}

BackwardResult backward(const NetworkParams& params, std::span<const double> times,
                        std::span<const double> values, const QuantileGrid& grid,
                        const LossConfig& cfg, RegScope scope) {
    detail::check_shapes(params, times, values, grid);
    cfg.validate();

    const std::size_t n = times.size();
    const std::size_t h = params.hidden();
    const std::size_t m_count = params.quantiles();
    const auto fwd = serial::forward(params, times);

    BackwardResult out;
    out.grads = Gradients(h, m_count);
    Gradients& g = out.grads;
    CompensatedSum loss;
    const double nm = static_cast<double>(n * m_count);

    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t m = 0; m < m_count; ++m) {
            const double u = values[t] - fwd.qhat(t, m);
            loss.add(smooth_pinball(u, grid[m], cfg.alpha));
            // q = y - u, so dE/dq = -dS/du.
            const double dq = -smooth_pinball_grad(u, grid[m], cfg.alpha) / nm;
            g.out_bias[m] += dq;
            for (std::size_t k = 0; k <= h; ++k) {
                g.amplitudes(m, k) += dq * fwd.hidden(t, k);
                const double dh = dq * params.amplitudes(m, k);
                if (k < h) {
                    const double s = -std::sin(params.freqs[k] * times[t] + params.phases[k]);
                    g.freqs[k] += dh * s * times[t];
                    g.phases[k] += dh * s;
                } else {
                    g.trend_in_weight += dh * times[t];
                    g.trend_in_bias += dh;
                }
            }
        }
    }

    const auto reg = regularized_weights(params, scope);
    detail::add_penalty_gradient(g, scope, reg, cfg);
    out.cost = (n > 0 ? loss.value() / nm : 0.0) + elastic_net_penalty(reg, cfg);
    return out;
}

}  // namespace qfnn::kernels::serial
