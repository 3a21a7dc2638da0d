#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qfnn/forecast.hpp"

namespace qfnn {

// Central interval between grid levels lower_level < upper_level.
//
// `beta` follows the labelling tau_u - tau_l = 1 - beta, so the outermost
// (0.01, 0.99) pair carries beta = 0.02. `nominal_coverage` is tau_u - tau_l,
// the probability mass the interval is meant to contain.
struct PredictionInterval {
    double beta = 0.0;
    double nominal_coverage = 0.0;
    double lower_level = 0.0;
    double upper_level = 0.0;
    std::vector<double> lower;
    std::vector<double> upper;
};

// Sum (or mean over N*M when `averaged`) of pinball losses.
double quantile_score(std::span<const double> actuals, const QuantileForecast& forecast,
                      bool averaged = true);

// Fraction of horizon steps with actual <= forecast level m.
double empirical_coverage(std::span<const double> actuals, const QuantileForecast& forecast,
                          std::size_t m);

// Pairs level i with level M-1-i (0-based), outermost first. Needs even M.
std::vector<PredictionInterval> build_intervals(const QuantileForecast& forecast);

// Fraction of (t, adjacent level) pairs whose values decrease.
double crossing_rate(const QuantileForecast& forecast);

// Sorts every time row ascending.
QuantileForecast rearrange(const QuantileForecast& forecast);

// Quantile curve at an arbitrary level inside [tau_1, tau_M], linear in tau
// between neighbouring grid levels.
std::vector<double> quantile_curve(const QuantileForecast& forecast, double tau);

struct ModelMetrics {
    std::string name;
    double averaged_qs = 0.0;
    double crossing_rate = 0.0;
    std::vector<double> coverage;  // one entry per grid level
};

ModelMetrics evaluate_model(std::string name, std::span<const double> actuals,
                            const QuantileForecast& forecast);

// Flat key=value report: `models=`, then qs.<name>, crossing_rate.<name> and
// coverage.<name>.tau_<level> for every model.
void write_metrics_report(std::ostream& out, const QuantileGrid& grid,
                          std::span<const ModelMetrics> models);

}  // namespace qfnn
