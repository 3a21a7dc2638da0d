#include "qfnn/model_io.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qfnn/errors.hpp"
#include "qfnn/time_series.hpp"

namespace qfnn {
namespace {

constexpr const char* kVersionKey = "qfnn-model-version";

std::string join(std::span<const double> xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ' ';
        out += format_shortest(xs[i]);
    }
    return out;
}

const char* phase_name(PhaseInit p) { return p == PhaseInit::Quadrature ? "quadrature" : "zero"; }
const char* scope_name(RegScope s) {
    switch (s) {
        case RegScope::All: return "all";
        case RegScope::Sinusoids: return "sinusoids";
        case RegScope::Amplitudes: break;
    }
    return "amplitudes";
}

class Fields {
public:
    explicit Fields(std::map<std::string, std::string> kv) : kv_(std::move(kv)) {}

    const std::string& text(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw ParseError("model file is missing '" + key + "'");
        return it->second;
    }
    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    double real(const std::string& key) const {
        try {
            return parse_double(text(key));
        } catch (const ParseError& e) {
            throw ParseError("model field '" + key + "': " + e.what());
        }
    }

    std::size_t count(const std::string& key) const {
        const double v = real(key);
        if (!(v >= 0.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ParseError("model field '" + key + "' must be a nonnegative integer");
        }
        return static_cast<std::size_t>(v);
    }

    std::vector<double> reals(const std::string& key, std::size_t expected) const {
        std::istringstream in(text(key));
        std::vector<double> out;
        std::string tok;
        while (in >> tok) {
            try {
                out.push_back(parse_double(tok));
            } catch (const ParseError& e) {
                throw ParseError("model field '" + key + "': " + e.what());
            }
        }
        if (out.size() != expected) {
            throw ParseError("model field '" + key + "' has " + std::to_string(out.size()) +
                             " entries, expected " + std::to_string(expected));
        }
        return out;
    }

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace

bool ModelFile::operator==(const ModelFile& o) const {
    const auto& a = config;
    const auto& b = o.config;
    return params == o.params && a.epochs == b.epochs && a.learning_rate == b.learning_rate &&
           a.alpha == b.alpha && a.lambda == b.lambda && a.mix == b.mix &&
           a.l1_epsilon == b.l1_epsilon && a.hidden == b.hidden && a.grid == b.grid &&
           a.phase_init == b.phase_init && a.reg_scope == b.reg_scope &&
           a.rates.frequency == b.rates.frequency && a.rates.phase == b.rates.phase &&
           a.rates.trend == b.rates.trend && a.rates.amplitude == b.rates.amplitude &&
           a.rates.output_bias == b.rates.output_bias && time_offset == o.time_offset &&
           time_scale == o.time_scale && value_normalized == o.value_normalized &&
           value_offset == o.value_offset && value_scale == o.value_scale &&
           last_train_time == o.last_train_time && train_cadence == o.train_cadence;
}

void write_model(std::ostream& out, const ModelFile& model) {
    const auto& p = model.params;
    const auto& c = model.config;
    p.validate();
    if (c.grid.size() != p.quantiles()) {
        throw std::invalid_argument("write_model: grid size does not match network heads");
    }
    out << kVersionKey << '=' << kModelFormatVersion << '\n';
    out << "hidden=" << p.hidden() << '\n';
    out << "quantiles=" << p.quantiles() << '\n';
    out << "taus=" << join(c.grid.taus()) << '\n';
    out << "freqs=" << join(p.freqs) << '\n';
    out << "phases=" << join(p.phases) << '\n';
    out << "trend_in_weight=" << format_shortest(p.trend_in_weight) << '\n';
    out << "trend_in_bias=" << format_shortest(p.trend_in_bias) << '\n';
    for (std::size_t m = 0; m < p.quantiles(); ++m) {
        out << "amplitudes." << m << '=' << join(p.amplitudes.row(m)) << '\n';
    }
    out << "out_bias=" << join(p.out_bias) << '\n';
    out << "time_offset=" << format_shortest(model.time_offset) << '\n';
    out << "time_scale=" << format_shortest(model.time_scale) << '\n';
    out << "value_normalized=" << (model.value_normalized ? 1 : 0) << '\n';
    out << "value_offset=" << format_shortest(model.value_offset) << '\n';
    out << "value_scale=" << format_shortest(model.value_scale) << '\n';
    out << "last_train_time=" << format_shortest(model.last_train_time) << '\n';
    out << "train_cadence=" << format_shortest(model.train_cadence) << '\n';
    out << "config.epochs=" << c.epochs << '\n';
    out << "config.learning_rate=" << format_shortest(c.learning_rate) << '\n';
    out << "config.alpha=" << format_shortest(c.alpha) << '\n';
    out << "config.lambda=" << format_shortest(c.lambda) << '\n';
    out << "config.mix=" << format_shortest(c.mix) << '\n';
    out << "config.l1_epsilon=" << format_shortest(c.l1_epsilon) << '\n';
    out << "config.phase_init=" << phase_name(c.phase_init) << '\n';
    out << "config.reg_scope=" << scope_name(c.reg_scope) << '\n';
    const std::pair<const char*, const std::optional<double>*> rates[] = {
        {"frequency", &c.rates.frequency}, {"phase", &c.rates.phase},
        {"trend", &c.rates.trend},         {"amplitude", &c.rates.amplitude},
        {"output_bias", &c.rates.output_bias}};
    for (const auto& [name, rate] : rates) {
        if (*rate) out << "config.rate." << name << '=' << format_shortest(**rate) << '\n';
    }
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
    std::ofstream out(path);
    if (!out) throw FileError("cannot write " + path.string());
    write_model(out, model);
    if (!out) throw FileError("error writing " + path.string());
}

ModelFile read_model(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("model file is empty");
    const std::string prefix = std::string(kVersionKey) + "=";
    if (line.rfind(prefix, 0) != 0) throw SchemaError("not a model file (missing version line)");
    if (line.substr(prefix.size()) != std::to_string(kModelFormatVersion)) {
        throw SchemaError("unsupported model format version '" + line.substr(prefix.size()) + "'");
    }

    std::map<std::string, std::string> kv;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("model file line " + std::to_string(line_no) + " is not key=value");
        }
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const Fields f(std::move(kv));

    const std::size_t h = f.count("hidden");
    const std::size_t m_count = f.count("quantiles");
    ModelFile model;
    auto& c = model.config;
    c.grid = QuantileGrid(f.reals("taus", m_count));
    c.hidden = h;

    auto& p = model.params;
    p = NetworkParams(h, m_count);
    p.freqs = f.reals("freqs", h);
    p.phases = f.reals("phases", h);
    p.trend_in_weight = f.real("trend_in_weight");
    p.trend_in_bias = f.real("trend_in_bias");
    for (std::size_t m = 0; m < m_count; ++m) {
        const auto row = f.reals("amplitudes." + std::to_string(m), h + 1);
        std::copy(row.begin(), row.end(), p.amplitudes.row(m).begin());
    }
    p.out_bias = f.reals("out_bias", m_count);
    p.validate();

    model.time_offset = f.real("time_offset");
    model.time_scale = f.real("time_scale");
    model.value_normalized = f.count("value_normalized") != 0;
    model.value_offset = f.real("value_offset");
    model.value_scale = f.real("value_scale");
    model.last_train_time = f.real("last_train_time");
    model.train_cadence = f.real("train_cadence");

    c.epochs = f.count("config.epochs");
    c.learning_rate = f.real("config.learning_rate");
    c.alpha = f.real("config.alpha");
    c.lambda = f.real("config.lambda");
    c.mix = f.real("config.mix");
    c.l1_epsilon = f.real("config.l1_epsilon");
    const auto& phase = f.text("config.phase_init");
    if (phase != "zero" && phase != "quadrature") throw ParseError("bad config.phase_init");
    c.phase_init = phase == "quadrature" ? PhaseInit::Quadrature : PhaseInit::Zero;
    const auto& scope = f.text("config.reg_scope");
    if (scope == "all") {
        c.reg_scope = RegScope::All;
    } else if (scope == "sinusoids") {
        c.reg_scope = RegScope::Sinusoids;
    } else if (scope == "amplitudes") {
        c.reg_scope = RegScope::Amplitudes;
    } else {
        throw ParseError("bad config.reg_scope '" + scope + "'");
    }
    const std::pair<const char*, std::optional<double>*> rates[] = {
        {"frequency", &c.rates.frequency}, {"phase", &c.rates.phase},
        {"trend", &c.rates.trend},         {"amplitude", &c.rates.amplitude},
        {"output_bias", &c.rates.output_bias}};
    for (const auto& [name, rate] : rates) {
        const std::string key = std::string("config.rate.") + name;
        if (f.has(key)) *rate = f.real(key);
    }
    if (!(model.time_scale > 0.0) || !(model.value_scale > 0.0)) {
        throw ParseError("model normalization scales must be positive");
    }
    return model;
}

ModelFile read_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open " + path.string());
    return read_model(in);
}

}  // namespace qfnn
