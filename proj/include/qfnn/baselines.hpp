#pragma once

#include <span>
#include <vector>

#include "qfnn/forecast.hpp"

namespace qfnn {

// One predictive distribution, described by its quantiles on `grid`, applied
// unchanged to every lead time.
struct BaselineForecast {
    QuantileGrid grid;
    std::vector<double> quantiles;

    QuantileForecast over(std::span<const double> times) const;
};

// Empirical quantiles of all training values (linear interpolation between
// order statistics at position (n-1)*tau).
BaselineForecast climatology(std::span<const double> train_values, const QuantileGrid& grid);

// Normal(mean, sd) fitted to the supplied recent window, sd with n-1 denominator.
BaselineForecast persistence(std::span<const double> recent_values, const QuantileGrid& grid);

// Uniform over [min, max] of the training values.
BaselineForecast uniform(std::span<const double> train_values, const QuantileGrid& grid);

double normal_cdf(double x);

// Acklam's rational approximation followed by one Halley step against normal_cdf.
double inverse_normal_cdf(double p);

}  // namespace qfnn
