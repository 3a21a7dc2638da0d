#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qfnn/forecast.hpp"

namespace qfnn {

// Ordered observations plus the affine maps used to feed them to the network:
// t_norm = (t_raw - norm_offset) / norm_scale and, when value normalization is
// enabled, v_model = (v - value_offset) / value_scale.
struct TimeSeries {
    std::vector<double> raw_times;
    std::vector<double> values;
    double norm_offset = 0.0;
    double norm_scale = 1.0;
    double value_offset = 0.0;
    double value_scale = 1.0;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }

    double normalize_time(double raw) const noexcept { return (raw - norm_offset) / norm_scale; }
    double denormalize_time(double t) const noexcept { return t * norm_scale + norm_offset; }
    double normalize_value(double v) const noexcept { return (v - value_offset) / value_scale; }
    double denormalize_value(double v) const noexcept { return v * value_scale + value_offset; }

    std::vector<double> normalized_times() const;
    std::vector<double> model_values() const;

    // Strictly increasing times, finite values, positive scales.
    void validate() const;
};

// Column picked by zero-based index or by header name; Auto picks the natural
// default for the file's column count, None means "use the row index".
struct ColumnSelector {
    struct Auto {};
    struct None {};
    std::variant<Auto, None, std::size_t, std::string> which = Auto{};

    // "none" -> None, all digits -> index, "" -> Auto, anything else -> name.
    static ColumnSelector parse(const std::string& text);
};

TimeSeries load_csv(const std::filesystem::path& path, const ColumnSelector& time_column = {},
                    const ColumnSelector& value_column = {}, bool has_header = true);

// Writes `time,value` rows at 17 significant digits.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);

// Splits at floor(N * train_fraction) and normalizes both parts against the
// training time span, so training times cover [0, 1] and test times lie above 1.
std::pair<TimeSeries, TimeSeries> split_and_normalize(const TimeSeries& series,
                                                      double train_fraction);

// Min-max value scaling fitted on `train` and copied to `test`.
void normalize_values(TimeSeries& train, TimeSeries& test);

// Forecast tables: header `time,tau_<level>,...`, one row per horizon step.
void write_forecast_csv(std::ostream& out, const QuantileForecast& forecast);
void write_forecast_csv(const std::filesystem::path& path, const QuantileForecast& forecast);
QuantileForecast read_forecast_csv(const std::filesystem::path& path);

// Decimal encodings shared by every text artifact.
std::string format_shortest(double v);  // shortest round-trip form
std::string format_17g(double v);
double parse_double(const std::string& text);  // locale-independent, throws ParseError

}  // namespace qfnn
