#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qfnn/matrix.hpp"

namespace qfnn {

// Strictly increasing quantile levels in the open unit interval.
class QuantileGrid {
public:
    QuantileGrid() = default;
    explicit QuantileGrid(std::vector<double> taus);

    // `count` equally spaced levels from `lo` to `hi` inclusive.
    static QuantileGrid uniform(std::size_t count = 100, double lo = 0.01, double hi = 0.99);

    std::size_t size() const noexcept { return taus_.size(); }
    double operator[](std::size_t m) const { return taus_[m]; }
    std::span<const double> taus() const noexcept { return taus_; }

    // Index of the level closest to `tau`.
    std::size_t nearest(double tau) const;

    bool operator==(const QuantileGrid&) const = default;

private:
    std::vector<double> taus_;
};

// N x M quantile estimates; row t holds every level at horizon time t.
struct QuantileForecast {
    std::vector<double> times;
    QuantileGrid grid;
    Matrix values;

    std::size_t horizon() const noexcept { return times.size(); }

    // Throws std::invalid_argument when the matrix shape disagrees with times/grid.
    void validate() const;
};

}  // namespace qfnn
