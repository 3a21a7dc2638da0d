#include "qfnn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qfnn/summation.hpp"

namespace qfnn {

QuantileForecast BaselineForecast::over(std::span<const double> times) const {
    QuantileForecast out;
    out.times.assign(times.begin(), times.end());
    out.grid = grid;
    out.values = Matrix(times.size(), grid.size());
    for (std::size_t t = 0; t < times.size(); ++t) {
        std::copy(quantiles.begin(), quantiles.end(), out.values.row(t).begin());
    }
    return out;
}

BaselineForecast climatology(std::span<const double> train_values, const QuantileGrid& grid) {
    if (train_values.empty()) throw std::invalid_argument("climatology needs at least one value");
    std::vector<double> sorted(train_values.begin(), train_values.end());
    std::sort(sorted.begin(), sorted.end());
    const double last = static_cast<double>(sorted.size() - 1);

    BaselineForecast out{grid, std::vector<double>(grid.size())};
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double pos = last * grid[m];
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const double frac = pos - static_cast<double>(lo);
        const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
        out.quantiles[m] = frac == 0.0 ? sorted[lo] : sorted[lo] + frac * (sorted[hi] - sorted[lo]);
    }
    return out;
}

BaselineForecast persistence(std::span<const double> recent_values, const QuantileGrid& grid) {
    const std::size_t n = recent_values.size();
    if (n < 2) throw std::invalid_argument("persistence needs at least two recent values");
    const double mean = compensated_sum(recent_values) / static_cast<double>(n);
    CompensatedSum ss;
    for (double v : recent_values) ss.add((v - mean) * (v - mean));
    const double sd = std::sqrt(ss.value() / static_cast<double>(n - 1));

    BaselineForecast out{grid, std::vector<double>(grid.size(), mean)};
    if (sd > 0.0) {
        for (std::size_t m = 0; m < grid.size(); ++m) {
            out.quantiles[m] = mean + sd * inverse_normal_cdf(grid[m]);
        }
    }
    return out;
}

BaselineForecast uniform(std::span<const double> train_values, const QuantileGrid& grid) {
    if (train_values.empty()) throw std::invalid_argument("uniform baseline needs at least one value");
    const auto [lo, hi] = std::minmax_element(train_values.begin(), train_values.end());
    BaselineForecast out{grid, std::vector<double>(grid.size())};
    for (std::size_t m = 0; m < grid.size(); ++m) out.quantiles[m] = *lo + grid[m] * (*hi - *lo);
    return out;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1), got " +
                                    std::to_string(p));
    }
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    // Work in the lower half and reflect; keeps x(1-p) = -x(p) exact.
    const bool upper = p > 0.5;
    const double pl = upper ? 1.0 - p : p;

    double x;
    if (pl < p_low) {
        const double q = std::sqrt(-2.0 * std::log(pl));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = pl - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    // Halley refinement.
    const double e = normal_cdf(x) - pl;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);

    return upper ? -x : x;
}

}  // namespace qfnn
