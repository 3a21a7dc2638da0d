#include "qfnn/forecast.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qfnn {

QuantileGrid::QuantileGrid(std::vector<double> taus) : taus_(std::move(taus)) {
    if (taus_.empty()) throw std::invalid_argument("quantile grid is empty");
    for (std::size_t m = 0; m < taus_.size(); ++m) {
        const double tau = taus_[m];
        if (!(tau > 0.0 && tau < 1.0)) {
            throw std::invalid_argument("quantile level " + std::to_string(tau) +
                                        " outside (0,1)");
        }
        if (m > 0 && !(tau > taus_[m - 1])) {
            throw std::invalid_argument("quantile levels must be strictly increasing");
        }
    }
}

QuantileGrid QuantileGrid::uniform(std::size_t count, double lo, double hi) {
    if (count == 0) throw std::invalid_argument("quantile grid needs at least one level");
    if (count == 1) return QuantileGrid({lo});
    std::vector<double> taus(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t m = 0; m < count; ++m) taus[m] = lo + step * static_cast<double>(m);
    taus.back() = hi;
    return QuantileGrid(std::move(taus));
}

std::size_t QuantileGrid::nearest(double tau) const {
    std::size_t best = 0;
    for (std::size_t m = 1; m < taus_.size(); ++m) {
        if (std::fabs(taus_[m] - tau) < std::fabs(taus_[best] - tau)) best = m;
    }
    return best;
}

void QuantileForecast::validate() const {
    if (values.rows() != times.size() || (values.cols() != grid.size() && !times.empty())) {
        throw std::invalid_argument("forecast matrix is " + std::to_string(values.rows()) + "x" +
                                    std::to_string(values.cols()) + ", expected " +
                                    std::to_string(times.size()) + "x" +
                                    std::to_string(grid.size()));
    }
}

}  // namespace qfnn
