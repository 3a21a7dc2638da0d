#include "qfnn/time_series.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qfnn/errors.hpp"

namespace qfnn {
namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

bool all_digits(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Resolves a selector to a column index; nullopt-like -1 means "row index".
long resolve(const ColumnSelector& sel, const std::vector<std::string>& header,
             std::size_t n_cols, long auto_choice, const char* role) {
    return std::visit(
        [&](const auto& w) -> long {
            using T = std::decay_t<decltype(w)>;
            if constexpr (std::is_same_v<T, ColumnSelector::Auto>) {
                return auto_choice;
            } else if constexpr (std::is_same_v<T, ColumnSelector::None>) {
                return -1;
            } else if constexpr (std::is_same_v<T, std::size_t>) {
                if (w >= n_cols) {
                    throw ParseError(std::string(role) + " column index " + std::to_string(w) +
                                     " out of range (" + std::to_string(n_cols) + " columns)");
                }
                return static_cast<long>(w);
            } else {
                const auto it = std::find(header.begin(), header.end(), w);
                if (it == header.end()) {
                    throw ParseError(std::string(role) + " column '" + w + "' not found in header");
                }
                return static_cast<long>(it - header.begin());
            }
        },
        sel.which);
}

}  // namespace

std::vector<double> TimeSeries::normalized_times() const {
    std::vector<double> out(raw_times.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = normalize_time(raw_times[i]);
    return out;
}

std::vector<double> TimeSeries::model_values() const {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = normalize_value(values[i]);
    return out;
}

void TimeSeries::validate() const {
    if (raw_times.size() != values.size()) {
        throw std::invalid_argument("time series has mismatched time/value lengths");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || !std::isfinite(raw_times[i])) {
            throw std::invalid_argument("time series has a non-finite entry at index " +
                                        std::to_string(i));
        }
        if (i > 0 && !(raw_times[i] > raw_times[i - 1])) {
            throw std::invalid_argument("time series times are not strictly increasing at index " +
                                        std::to_string(i));
        }
    }
    if (!(norm_scale > 0.0) || !(value_scale > 0.0)) {
        throw std::invalid_argument("time series normalization scale must be positive");
    }
}

ColumnSelector ColumnSelector::parse(const std::string& text) {
    if (text.empty()) return {};
    if (text == "none") return {None{}};
    if (all_digits(text)) return {static_cast<std::size_t>(std::stoul(text))};
    return {text};
}

std::string format_shortest(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string format_17g(double v) {
    std::array<char, 64> buf{};
    const auto res =
        std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text) {
    const std::string s = trim(text);
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (s.empty() || res.ec != std::errc() || res.ptr != last) {
        throw ParseError("cannot parse '" + s + "' as a number");
    }
    return v;
}

TimeSeries load_csv(const std::filesystem::path& path, const ColumnSelector& time_column,
                    const ColumnSelector& value_column, bool has_header) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path.string());

    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_fields(line);
        if (has_header && header.empty() && rows.empty()) {
            header = std::move(fields);
            continue;
        }
        rows.push_back(std::move(fields));
        line_numbers.push_back(line_no);
    }
    if (rows.empty()) throw ParseError(path.string() + ": no data rows");

    const std::size_t n_cols = header.empty() ? rows.front().size() : header.size();
    const long time_idx = resolve(time_column, header, n_cols, n_cols >= 2 ? 0 : -1, "time");
    const long value_idx = resolve(value_column, header, n_cols, n_cols >= 2 ? 1 : 0, "value");

    TimeSeries ts;
    ts.raw_times.reserve(rows.size());
    ts.values.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& f = rows[r];
        const auto cell = [&](long idx, const char* role) {
            if (static_cast<std::size_t>(idx) >= f.size()) {
                throw ParseError(path.string() + ": row " + std::to_string(line_numbers[r]) +
                                 " has no " + role + " column");
            }
            try {
                return parse_double(f[static_cast<std::size_t>(idx)]);
            } catch (const ParseError& e) {
                throw ParseError(path.string() + ": row " + std::to_string(line_numbers[r]) +
                                 ", " + role + " column: " + e.what());
            }
        };
        ts.values.push_back(cell(value_idx, "value"));
        ts.raw_times.push_back(time_idx < 0 ? static_cast<double>(r) : cell(time_idx, "time"));
        if (!std::isfinite(ts.values.back()) || !std::isfinite(ts.raw_times.back())) {
            throw ParseError(path.string() + ": row " + std::to_string(line_numbers[r]) +
                             " holds a non-finite number");
        }
        if (r > 0 && !(ts.raw_times[r] > ts.raw_times[r - 1])) {
            throw ParseError(path.string() + ": row " + std::to_string(line_numbers[r]) +
                             ": times must be strictly increasing");
        }
    }
    return ts;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    out << "time,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_17g(series.raw_times[i]) << ',' << format_17g(series.values[i]) << '\n';
    }
    if (!out) throw FileError("error writing " + path.string());
}

std::pair<TimeSeries, TimeSeries> split_and_normalize(const TimeSeries& series,
                                                      double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie in (0,1)");
    }
    const std::size_t n = series.size();
    const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    if (n_train == 0 || n_train >= n) {
        throw std::invalid_argument("split of " + std::to_string(n) + " points at fraction " +
                                    format_shortest(train_fraction) + " leaves an empty partition");
    }
    const double offset = series.raw_times.front();
    const double scale = series.raw_times[n_train - 1] - offset;
    if (!(scale > 0.0)) throw std::invalid_argument("training time span is zero");

    TimeSeries train;
    TimeSeries test;
    train.raw_times.assign(series.raw_times.begin(), series.raw_times.begin() + static_cast<std::ptrdiff_t>(n_train));
    train.values.assign(series.values.begin(), series.values.begin() + static_cast<std::ptrdiff_t>(n_train));
    test.raw_times.assign(series.raw_times.begin() + static_cast<std::ptrdiff_t>(n_train), series.raw_times.end());
    test.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(n_train), series.values.end());
    for (TimeSeries* part : {&train, &test}) {
        part->norm_offset = offset;
        part->norm_scale = scale;
        part->value_offset = series.value_offset;
        part->value_scale = series.value_scale;
    }
    return {std::move(train), std::move(test)};
}

void normalize_values(TimeSeries& train, TimeSeries& test) {
    if (train.empty()) throw std::invalid_argument("cannot normalize values of an empty series");
    const auto [lo, hi] = std::minmax_element(train.values.begin(), train.values.end());
    const double span = *hi - *lo;
    train.value_offset = *lo;
    train.value_scale = span > 0.0 ? span : 1.0;
    test.value_offset = train.value_offset;
    test.value_scale = train.value_scale;
}

void write_forecast_csv(std::ostream& out, const QuantileForecast& forecast) {
    forecast.validate();
    out << "time";
    for (double tau : forecast.grid.taus()) out << ",tau_" << format_shortest(tau);
    out << '\n';
    for (std::size_t t = 0; t < forecast.horizon(); ++t) {
        out << format_17g(forecast.times[t]);
        for (double v : forecast.values.row(t)) out << ',' << format_17g(v);
        out << '\n';
    }
}

void write_forecast_csv(const std::filesystem::path& path, const QuantileForecast& forecast) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    write_forecast_csv(out, forecast);
    if (!out) throw FileError("error writing " + path.string());
}

QuantileForecast read_forecast_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path.string() + ": empty forecast file");
    const auto header = split_fields(line);
    if (header.size() < 2 || header.front() != "time") {
        throw ParseError(path.string() + ": forecast header must be time,tau_<level>,...");
    }
    std::vector<double> taus;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (header[c].rfind("tau_", 0) != 0) {
            throw ParseError(path.string() + ": bad forecast column '" + header[c] + "'");
        }
        taus.push_back(parse_double(header[c].substr(4)));
    }
    QuantileForecast fc;
    fc.grid = QuantileGrid(std::move(taus));
    std::vector<double> flat;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError(path.string() + ": row " + std::to_string(line_no) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        }
        try {
            fc.times.push_back(parse_double(fields[0]));
            for (std::size_t c = 1; c < fields.size(); ++c) flat.push_back(parse_double(fields[c]));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ": row " + std::to_string(line_no) + ": " + e.what());
        }
    }
    fc.values = Matrix(fc.times.size(), fc.grid.size());
    std::copy(flat.begin(), flat.end(), fc.values.flat().begin());
    return fc;
}

}  // namespace qfnn
