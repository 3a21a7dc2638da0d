#include "qfnn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qfnn/baselines.hpp"
#include "qfnn/errors.hpp"
#include "qfnn/evaluation.hpp"
#include "qfnn/model_io.hpp"
#include "qfnn/network.hpp"
#include "qfnn/time_series.hpp"
#include "qfnn/trainer.hpp"

namespace qfnn {
namespace {

namespace fs = std::filesystem;

// Options shared by every command that reads a series CSV.
struct InputSpec {
    std::string time_column;
    std::string value_column;
    bool no_header = false;

    TimeSeries load(const fs::path& path) const {
        return load_csv(path, ColumnSelector::parse(time_column),
                        ColumnSelector::parse(value_column), !no_header);
    }
};

struct GridSpec {
    std::size_t count = 100;
    double tau_min = 0.01;
    double tau_max = 0.99;

    QuantileGrid grid() const { return QuantileGrid::uniform(count, tau_min, tau_max); }
};

struct RunConfig {
    std::string input;
    InputSpec columns;
    double train_fraction = 0.8;
    std::string out_dir = ".";
    bool normalize_values = false;
    TrainConfig train;
    GridSpec grid;
    std::string phase_init = "zero";
    std::string reg_scope = "amplitudes";
    std::optional<double> rate_frequency, rate_phase, rate_trend, rate_amplitude, rate_output_bias;
};

struct ForecastArgs {
    std::string model;
    std::optional<std::size_t> horizon;
    std::vector<double> times;
    std::string times_from;
    InputSpec columns;
    std::string out = "forecast.csv";
    std::string intervals;
    bool rearrange = false;
};

struct EvaluateArgs {
    std::string forecast;
    std::string actuals;
    std::string history;
    InputSpec columns;
    bool baselines = false;
    std::size_t window = 24;
    std::string name = "qfnn";
    std::string out;
    bool rearrange = false;
};

struct BaselineArgs {
    std::string kind;
    std::string history;
    InputSpec columns;
    std::size_t window = 24;
    std::optional<std::size_t> horizon;
    std::string times_from;
    GridSpec grid;
    std::string out = "baseline.csv";
};

void add_columns(CLI::App* cmd, InputSpec& spec) {
    cmd->add_option("--time-column", spec.time_column,
                    "Time column: index, header name, or 'none' for the row index");
    cmd->add_option("--value-column", spec.value_column, "Value column: index or header name");
    cmd->add_flag("--no-header", spec.no_header, "Input CSV files have no header row");
}

void add_grid(CLI::App* cmd, GridSpec& g) {
    cmd->add_option("--quantiles", g.count, "Number of equally spaced quantile levels")
        ->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--tau-min", g.tau_min, "Lowest quantile level")->capture_default_str();
    cmd->add_option("--tau-max", g.tau_max, "Highest quantile level")->capture_default_str();
}

// Horizon times for `count` steps after `last` at spacing `cadence`.
std::vector<double> step_times(double last, double cadence, std::size_t count) {
    std::vector<double> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = last + cadence * static_cast<double>(i + 1);
    return out;
}

double mean_cadence(const TimeSeries& s) {
    if (s.size() < 2) return 1.0;
    return (s.raw_times.back() - s.raw_times.front()) / static_cast<double>(s.size() - 1);
}

void write_intervals_csv(const fs::path& path, const QuantileForecast& fc) {
    const auto intervals = build_intervals(fc);
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    out << "time";
    for (const auto& pi : intervals) {
        out << ",lower_" << format_shortest(pi.lower_level) << ",upper_"
            << format_shortest(pi.upper_level);
    }
    out << '\n';
    for (std::size_t t = 0; t < fc.horizon(); ++t) {
        out << format_17g(fc.times[t]);
        for (const auto& pi : intervals) {
            out << ',' << format_17g(pi.lower[t]) << ',' << format_17g(pi.upper[t]);
        }
        out << '\n';
    }
}

int cmd_train(const RunConfig& rc, std::ostream& out) {
    TrainConfig cfg = rc.train;
    cfg.grid = rc.grid.grid();
    cfg.phase_init = rc.phase_init == "quadrature" ? PhaseInit::Quadrature : PhaseInit::Zero;
    cfg.reg_scope = rc.reg_scope == "all"         ? RegScope::All
                    : rc.reg_scope == "sinusoids" ? RegScope::Sinusoids
                                                  : RegScope::Amplitudes;
    cfg.rates = {rc.rate_frequency, rc.rate_phase, rc.rate_trend, rc.rate_amplitude,
                 rc.rate_output_bias};
    cfg.validate();

    const TimeSeries series = rc.columns.load(rc.input);
    auto [train, test] = split_and_normalize(series, rc.train_fraction);
    if (rc.normalize_values) normalize_values(train, test);

    const fs::path dir(rc.out_dir);
    fs::create_directories(dir);
    std::ofstream log(dir / "train_log.csv");
    if (!log) throw FileError("cannot write " + (dir / "train_log.csv").string());
    log << "epoch,cost\n";
    const auto report =
        fit(train, cfg, [&](std::size_t epoch, double c) { log << epoch << ',' << format_17g(c) << '\n'; });

    ModelFile model;
    model.params = report.final_params;
    model.config = cfg;
    model.time_offset = train.norm_offset;
    model.time_scale = train.norm_scale;
    model.value_normalized = rc.normalize_values;
    model.value_offset = train.value_offset;
    model.value_scale = train.value_scale;
    model.last_train_time = train.raw_times.back();
    model.train_cadence = mean_cadence(train);
    write_model(dir / "model.txt", model);
    write_series_csv(dir / "train.csv", train);
    write_series_csv(dir / "test.csv", test);

    out << "trained " << report.epochs_run << " epochs on " << train.size() << " points ("
        << test.size() << " held out)\n";
    out << "final training cost: " << format_17g(report.final_cost) << '\n';
    return 0;
}

std::vector<double> times_from_file(const std::string& path, const InputSpec& columns) {
    return columns.load(path).raw_times;
}

int cmd_forecast(const ForecastArgs& args, std::ostream& out) {
    const ModelFile model = read_model(fs::path(args.model));
    std::vector<double> raw;
    if (args.horizon) {
        raw = step_times(model.last_train_time, model.train_cadence, *args.horizon);
    } else if (!args.times.empty()) {
        raw = args.times;
    } else if (!args.times_from.empty()) {
        raw = times_from_file(args.times_from, args.columns);
    } else {
        throw std::invalid_argument("forecast needs --horizon, --times or --times-from");
    }

    std::vector<double> norm(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        norm[i] = (raw[i] - model.time_offset) / model.time_scale;
    }
    QuantileForecast fc = predict_quantiles(model.params, norm, model.config.grid);
    fc.times = raw;
    for (double& v : fc.values.flat()) v = v * model.value_scale + model.value_offset;
    if (args.rearrange) fc = rearrange(fc);

    write_forecast_csv(fs::path(args.out), fc);
    if (!args.intervals.empty()) write_intervals_csv(args.intervals, fc);
    out << "wrote " << fc.horizon() << " x " << fc.grid.size() << " forecast to " << args.out
        << '\n';
    return 0;
}

void require_same_times(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("forecast has " + std::to_string(a.size()) +
                                    " horizon steps but actuals have " + std::to_string(b.size()));
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double tol = 1e-9 * std::max({1.0, std::fabs(a[i]), std::fabs(b[i])});
        if (std::fabs(a[i] - b[i]) > tol) {
            throw std::invalid_argument("forecast and actuals disagree on horizon time at row " +
                                        std::to_string(i + 1));
        }
    }
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
    QuantileForecast fc = read_forecast_csv(args.forecast);
    if (args.rearrange) fc = rearrange(fc);
    const TimeSeries actuals = args.columns.load(args.actuals);
    require_same_times(fc.times, actuals.raw_times);

    std::vector<ModelMetrics> metrics;
    if (args.baselines) {
        if (args.history.empty()) throw std::invalid_argument("--baselines needs --history");
        const TimeSeries history = args.columns.load(args.history);
        if (history.size() < args.window) {
            throw std::invalid_argument("history is shorter than the persistence window");
        }
        const std::span<const double> recent(history.values.data() + history.size() - args.window,
                                             args.window);
        metrics.push_back(evaluate_model("uniform", actuals.values,
                                         uniform(history.values, fc.grid).over(fc.times)));
        metrics.push_back(evaluate_model("persistence", actuals.values,
                                         persistence(recent, fc.grid).over(fc.times)));
        metrics.push_back(evaluate_model("climatology", actuals.values,
                                         climatology(history.values, fc.grid).over(fc.times)));
    }
    metrics.push_back(evaluate_model(args.name, actuals.values, fc));

    std::ostringstream report;
    write_metrics_report(report, fc.grid, metrics);
    if (!args.out.empty()) {
        std::ofstream f(args.out);
        if (!f) throw FileError("cannot write " + args.out);
        f << report.str();
    }

    out << "averaged quantile score (" << actuals.size() << " steps, " << fc.grid.size()
        << " levels)\n";
    for (const auto& m : metrics) {
        out << "  " << m.name << std::string(m.name.size() < 12 ? 12 - m.name.size() : 1, ' ')
            << format_17g(m.averaged_qs) << '\n';
    }
    if (args.out.empty()) out << report.str();
    return 0;
}

int cmd_baseline(const BaselineArgs& args, std::ostream& out) {
    const TimeSeries history = args.columns.load(args.history);
    const QuantileGrid grid = args.grid.grid();
    BaselineForecast dist;
    if (args.kind == "uniform") {
        dist = uniform(history.values, grid);
    } else if (args.kind == "climatology") {
        dist = climatology(history.values, grid);
    } else {
        if (history.size() < args.window) {
            throw std::invalid_argument("history is shorter than the persistence window");
        }
        dist = persistence(std::span<const double>(history.values).last(args.window), grid);
    }
    std::vector<double> times;
    if (args.horizon) {
        times = step_times(history.raw_times.back(), mean_cadence(history), *args.horizon);
    } else if (!args.times_from.empty()) {
        times = times_from_file(args.times_from, args.columns);
    } else {
        throw std::invalid_argument("baseline needs --horizon or --times-from");
    }
    const auto fc = dist.over(times);
    write_forecast_csv(fs::path(args.out), fc);
    out << "wrote " << args.kind << " baseline (" << fc.horizon() << " x " << grid.size()
        << ") to " << args.out << '\n';
    return 0;
}

std::string trim_copy(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

bool truthy(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ParseError("flag value must be true or false, got '" + v + "'");
}

// Splices `--config FILE` into the argument list: each key=value line becomes
// `--key value` unless the same option already appears on the command line.
// Flags take true/false. Unknown keys are left for the parser to reject.
std::vector<std::string> expand_config(const CLI::App& app, std::vector<std::string> args) {
    if (args.size() < 2) return args;
    const CLI::App* sub = nullptr;
    try {
        sub = app.get_subcommand(args[1]);
    } catch (const CLI::OptionNotFound&) {
        return args;
    }
    std::string path;
    bool found = false;
    for (std::size_t i = 2; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            found = true;
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            found = true;
            break;
        }
    }
    if (!found) return args;

    const auto given = [&](const std::string& flag) {
        return std::any_of(args.begin() + 2, args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    std::ifstream in(path);
    if (!in) throw FileError("cannot open config file " + path);
    std::vector<std::string> extra;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim_copy(line);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path + ": line " + std::to_string(line_no) + " is not key=value");
        }
        std::string key = trim_copy(line.substr(0, eq));
        std::string value = trim_copy(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.rfind("--", 0) != 0) key = "--" + key;
        if (given(key)) continue;
        const CLI::Option* opt = sub->get_option_no_throw(key);
        if (opt != nullptr && opt->get_expected_min() == 0) {
            if (truthy(value)) extra.push_back(key);
            continue;
        }
        extra.push_back(key);
        extra.push_back(value);
    }
    args.insert(args.begin() + 2, extra.begin(), extra.end());
    return args;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantile Fourier neural network forecaster"};
    app.require_subcommand(1);

    RunConfig rc;
    auto* train = app.add_subcommand("train", "Fit a model and write model.txt, train_log.csv, train.csv, test.csv");
    train->add_option("--input", rc.input, "Input CSV (time,value or a single value column)")
        ->required();
    add_columns(train, rc.columns);
    train->add_option("--train-fraction", rc.train_fraction, "Leading fraction used for training")
        ->capture_default_str();
    train->add_option("--out-dir", rc.out_dir, "Output directory")->capture_default_str();
    train->add_flag("--normalize-values", rc.normalize_values,
                    "Min-max scale values on the training span (forecasts are mapped back)");
    train->add_option("--epochs", rc.train.epochs, "Full-batch gradient steps")->capture_default_str();
    train->add_option("--learning-rate", rc.train.learning_rate, "Step size for every parameter group")
        ->capture_default_str();
    train->add_option("--alpha", rc.train.alpha, "Pinball smoothing")->capture_default_str();
    train->add_option("--lambda", rc.train.lambda, "Elastic-net strength")->capture_default_str();
    train->add_option("--mix", rc.train.mix, "Elastic-net L1 fraction")->capture_default_str();
    train->add_option("--l1-epsilon", rc.train.l1_epsilon, "Smooth-L1 width")->capture_default_str();
    train->add_option("--hidden", rc.train.hidden, "Sinusoid units")->capture_default_str();
    add_grid(train, rc.grid);
    train->add_option("--phase-init", rc.phase_init, "Initial phases")
        ->check(CLI::IsMember({"zero", "quadrature"}))->capture_default_str();
    train->add_option("--reg-scope", rc.reg_scope, "Penalized parameters")
        ->check(CLI::IsMember({"amplitudes", "sinusoids", "all"}))->capture_default_str();
    train->add_option("--rate-frequency", rc.rate_frequency, "Learning rate override: frequencies");
    train->add_option("--rate-phase", rc.rate_phase, "Learning rate override: phases");
    train->add_option("--rate-trend", rc.rate_trend, "Learning rate override: trend unit");
    train->add_option("--rate-amplitude", rc.rate_amplitude, "Learning rate override: amplitudes");
    train->add_option("--rate-output-bias", rc.rate_output_bias,
                      "Learning rate override: output biases");

    ForecastArgs fa;
    auto* forecast = app.add_subcommand("forecast", "Write quantile forecasts from a trained model");
    forecast->add_option("--model", fa.model, "Model file written by train")->required();
    auto* horizon = forecast->add_option("--horizon", fa.horizon,
                                         "Steps past the training end at the training cadence");
    auto* times = forecast->add_option("--times", fa.times, "Explicit raw times")->delimiter(',');
    auto* times_from = forecast->add_option("--times-from", fa.times_from,
                                            "Take horizon times from a series CSV");
    horizon->excludes(times)->excludes(times_from);
    times->excludes(times_from);
    add_columns(forecast, fa.columns);
    forecast->add_option("--out", fa.out, "Forecast CSV")->capture_default_str();
    forecast->add_option("--intervals", fa.intervals, "Also write paired prediction intervals");
    forecast->add_flag("--rearrange", fa.rearrange, "Sort each row so quantiles never cross");

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Score a forecast against actuals");
    evaluate->add_option("--forecast", ea.forecast, "Forecast CSV")->required();
    evaluate->add_option("--actuals", ea.actuals, "Observed series CSV on the same horizon")
        ->required();
    evaluate->add_option("--history", ea.history, "Training series for the baselines");
    add_columns(evaluate, ea.columns);
    evaluate->add_flag("--baselines", ea.baselines, "Also score uniform, persistence, climatology");
    evaluate->add_option("--window", ea.window, "Persistence window (observations)")
        ->capture_default_str()->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    evaluate->add_option("--name", ea.name, "Label for the evaluated forecast")->capture_default_str();
    evaluate->add_option("--out", ea.out, "Write the key=value report here");
    evaluate->add_flag("--rearrange", ea.rearrange, "Sort forecast rows before scoring");

    BaselineArgs ba;
    auto* baseline = app.add_subcommand("baseline", "Write a benchmark density forecast");
    baseline->add_option("--kind", ba.kind, "uniform, persistence or climatology")
        ->required()->check(CLI::IsMember({"uniform", "persistence", "climatology"}));
    baseline->add_option("--history", ba.history, "Training series CSV")->required();
    add_columns(baseline, ba.columns);
    baseline->add_option("--window", ba.window, "Persistence window (observations)")
        ->capture_default_str()->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    auto* b_horizon = baseline->add_option("--horizon", ba.horizon,
                                           "Steps past the history end at its mean cadence");
    auto* b_times = baseline->add_option("--times-from", ba.times_from,
                                         "Take horizon times from a series CSV");
    b_horizon->excludes(b_times);
    add_grid(baseline, ba.grid);
    baseline->add_option("--out", ba.out, "Forecast CSV")->capture_default_str();

    std::string config_path;
    for (auto* sub : {train, forecast, evaluate, baseline}) {
        sub->add_option("--config", config_path,
                        "Flat key=value file of option defaults; command-line flags win");
    }

    std::vector<std::string> args(argv, argv + argc);
    try {
        args = expand_config(app, std::move(args));
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    std::vector<const char*> expanded;
    for (const auto& a : args) expanded.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(expanded.size()), expanded.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*train) return cmd_train(rc, out);
        if (*forecast) return cmd_forecast(fa, out);
        if (*evaluate) return cmd_evaluate(ea, out);
        return cmd_baseline(ba, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const SchemaError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const FileError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const DivergedError& e) {
        err << "error: " << e.what() << "; try a smaller learning rate\n";
        return 1;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace qfnn
