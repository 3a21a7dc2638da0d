#include "qfnn/evaluation.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

#include "qfnn/quantile_loss.hpp"
#include "qfnn/summation.hpp"
#include "qfnn/time_series.hpp"

namespace qfnn {
namespace {

void require_aligned(std::span<const double> actuals, const QuantileForecast& forecast) {
    forecast.validate();
    if (actuals.size() != forecast.horizon()) {
        throw std::invalid_argument("forecast covers " + std::to_string(forecast.horizon()) +
                                    " steps but " + std::to_string(actuals.size()) +
                                    " actuals were given");
    }
}

}  // namespace

double quantile_score(std::span<const double> actuals, const QuantileForecast& forecast,
                      bool averaged) {
    require_aligned(actuals, forecast);
    const std::size_t m_count = forecast.grid.size();
    CompensatedSum total;
    for (std::size_t t = 0; t < actuals.size(); ++t) {
        const auto row = forecast.values.row(t);
        for (std::size_t m = 0; m < m_count; ++m) {
            total.add(pinball(actuals[t] - row[m], forecast.grid[m]));
        }
    }
    const double qs = total.value();
    if (!averaged || actuals.empty()) return qs;
    return qs / static_cast<double>(actuals.size() * m_count);
}

double empirical_coverage(std::span<const double> actuals, const QuantileForecast& forecast,
                          std::size_t m) {
    require_aligned(actuals, forecast);
    if (m >= forecast.grid.size()) {
        throw std::invalid_argument("quantile index " + std::to_string(m) + " out of range");
    }
    if (actuals.empty()) return 0.0;
    std::size_t below = 0;
    for (std::size_t t = 0; t < actuals.size(); ++t) {
        if (actuals[t] <= forecast.values(t, m)) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(actuals.size());
}

std::vector<PredictionInterval> build_intervals(const QuantileForecast& forecast) {
    forecast.validate();
    const std::size_t m_count = forecast.grid.size();
    if (m_count % 2 != 0) {
        throw std::invalid_argument("build_intervals needs an even number of levels, got " +
                                    std::to_string(m_count));
    }
    std::vector<PredictionInterval> out;
    out.reserve(m_count / 2);
    for (std::size_t i = 0; i < m_count / 2; ++i) {
        const std::size_t j = m_count - 1 - i;
        PredictionInterval pi;
        pi.lower_level = forecast.grid[i];
        pi.upper_level = forecast.grid[j];
        pi.nominal_coverage = pi.upper_level - pi.lower_level;
        pi.beta = 1.0 - pi.nominal_coverage;
        pi.lower.resize(forecast.horizon());
        pi.upper.resize(forecast.horizon());
        for (std::size_t t = 0; t < forecast.horizon(); ++t) {
            pi.lower[t] = forecast.values(t, i);
            pi.upper[t] = forecast.values(t, j);
        }
        out.push_back(std::move(pi));
    }
    return out;
}

double crossing_rate(const QuantileForecast& forecast) {
    forecast.validate();
    const std::size_t m_count = forecast.grid.size();
    if (m_count < 2) throw std::invalid_argument("crossing_rate needs at least two levels");
    if (forecast.horizon() == 0) return 0.0;
    std::size_t crossed = 0;
    for (std::size_t t = 0; t < forecast.horizon(); ++t) {
        const auto row = forecast.values.row(t);
        for (std::size_t m = 0; m + 1 < m_count; ++m) {
            if (row[m + 1] < row[m]) ++crossed;
        }
    }
    return static_cast<double>(crossed) /
           static_cast<double>(forecast.horizon() * (m_count - 1));
}

QuantileForecast rearrange(const QuantileForecast& forecast) {
    forecast.validate();
    QuantileForecast out = forecast;
    for (std::size_t t = 0; t < out.horizon(); ++t) {
        auto row = out.values.row(t);
        std::sort(row.begin(), row.end());
    }
    return out;
}

std::vector<double> quantile_curve(const QuantileForecast& forecast, double tau) {
    forecast.validate();
    const auto taus = forecast.grid.taus();
    if (taus.empty() || tau < taus.front() || tau > taus.back()) {
        throw std::invalid_argument("level " + format_shortest(tau) + " outside the forecast grid");
    }
    const auto it = std::lower_bound(taus.begin(), taus.end(), tau);
    const auto hi = static_cast<std::size_t>(it - taus.begin());
    std::vector<double> out(forecast.horizon());
    if (taus[hi] == tau) {
        for (std::size_t t = 0; t < out.size(); ++t) out[t] = forecast.values(t, hi);
        return out;
    }
    const std::size_t lo = hi - 1;
    const double w = (tau - taus[lo]) / (taus[hi] - taus[lo]);
    for (std::size_t t = 0; t < out.size(); ++t) {
        out[t] = (1.0 - w) * forecast.values(t, lo) + w * forecast.values(t, hi);
    }
    return out;
}

ModelMetrics evaluate_model(std::string name, std::span<const double> actuals,
                            const QuantileForecast& forecast) {
    ModelMetrics out;
    out.name = std::move(name);
    out.averaged_qs = quantile_score(actuals, forecast, true);
    out.crossing_rate = forecast.grid.size() >= 2 ? crossing_rate(forecast) : 0.0;
    out.coverage.resize(forecast.grid.size());
    for (std::size_t m = 0; m < forecast.grid.size(); ++m) {
        out.coverage[m] = empirical_coverage(actuals, forecast, m);
    }
    return out;
}

void write_metrics_report(std::ostream& out, const QuantileGrid& grid,
                          std::span<const ModelMetrics> models) {
    out << "models=";
    for (std::size_t i = 0; i < models.size(); ++i) out << (i ? "," : "") << models[i].name;
    out << '\n';
    for (const auto& m : models) out << "qs." << m.name << '=' << format_17g(m.averaged_qs) << '\n';
    for (const auto& m : models) {
        out << "crossing_rate." << m.name << '=' << format_17g(m.crossing_rate) << '\n';
    }
    for (const auto& m : models) {
        for (std::size_t k = 0; k < m.coverage.size() && k < grid.size(); ++k) {
            out << "coverage." << m.name << ".tau_" << format_shortest(grid[k]) << '='
                << format_17g(m.coverage[k]) << '\n';
        }
    }
}

}  // namespace qfnn
