#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "qfnn/errors.hpp"
#include "qfnn/model_io.hpp"

using namespace qfnn;

namespace {

ModelFile sample_model() {
    ModelFile mf;
    mf.config.hidden = 5;
    mf.config.grid = QuantileGrid::uniform(7, 0.05, 0.95);
    mf.config.phase_init = PhaseInit::Quadrature;
    mf.config.reg_scope = RegScope::Sinusoids;
    mf.config.lambda = 1e-4;
    mf.config.rates.amplitude = 0.7;
    std::vector<double> t{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<double> y{1.0, 2.0, 2.5, 4.0, 5.5};
    mf.params = init_params(5, 7, t, y, PhaseInit::Quadrature);
    // Awkward decimals exercise the shortest round-trip encoding.
    double v = 1.0 / 3.0;
    mf.params.for_each([&](ParamGroup, double& x) {
        x += v;
        v = std::nextafter(v * -1.37, 1.0) + 1e-310;
    });
    mf.time_offset = 1.7e9 + 0.1;
    mf.time_scale = 3600.0 * 999;
    mf.value_normalized = true;
    mf.value_offset = -0.1;
    mf.value_scale = 7.3e-5;
    mf.last_train_time = 12345.678;
    mf.train_cadence = 0.1 + 0.2;
    return mf;
}

std::string serialize(const ModelFile& m) {
    std::ostringstream out;
    write_model(out, m);
    return out.str();
}

}  // namespace

TEST_CASE("model files round trip exactly") {
    const auto mf = sample_model();
    const std::string text = serialize(mf);
    CHECK(text.rfind("qfnn-model-version=1\n", 0) == 0);
    std::istringstream in(text);
    const auto back = read_model(in);
    CHECK(back == mf);
    CHECK(back.config.rates.amplitude == 0.7);
    CHECK_FALSE(back.config.rates.frequency.has_value());
    CHECK(serialize(back) == text);
}

TEST_CASE("bad version line is a schema error") {
    std::string text = serialize(sample_model());
    std::istringstream wrong_version("qfnn-model-version=99\n" + text.substr(text.find('\n') + 1));
    CHECK_THROWS_AS(read_model(wrong_version), SchemaError);
    std::istringstream no_version(text.substr(text.find('\n') + 1));
    CHECK_THROWS_AS(read_model(no_version), SchemaError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_model(empty), SchemaError);
}

TEST_CASE("missing or malformed fields are parse errors") {
    const std::string text = serialize(sample_model());
    const auto drop = [&](const std::string& key) {
        const auto at = text.find("\n" + key + "=");
        REQUIRE(at != std::string::npos);
        const auto end = text.find('\n', at + 1);
        return text.substr(0, at) + text.substr(end);
    };
    for (const char* key : {"freqs", "out_bias", "amplitudes.3", "time_scale", "config.alpha"}) {
        std::istringstream in(drop(key));
        CHECK_THROWS_AS(read_model(in), ParseError);
    }
    std::string garbled = text;
    garbled.replace(garbled.find("config.mix=") + 11, 3, "x.y");
    std::istringstream in(garbled);
    CHECK_THROWS_AS(read_model(in), ParseError);
    std::istringstream short_row(text + "\n");
    CHECK_NOTHROW(read_model(short_row));
}

TEST_CASE("grid mismatch refuses to serialize") {
    auto mf = sample_model();
    mf.config.grid = QuantileGrid::uniform(3);
    std::ostringstream out;
    CHECK_THROWS_AS(write_model(out, mf), std::invalid_argument);
}
