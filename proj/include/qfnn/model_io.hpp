#pragma once

#include <filesystem>
#include <iosfwd>

#include "qfnn/network.hpp"
#include "qfnn/trainer.hpp"

namespace qfnn {

inline constexpr int kModelFormatVersion = 1;

// Everything needed to turn raw horizon times into raw-unit quantiles.
struct ModelFile {
    NetworkParams params;
    TrainConfig config;  // config.grid is the model's quantile grid
    double time_offset = 0.0;
    double time_scale = 1.0;
    bool value_normalized = false;
    double value_offset = 0.0;
    double value_scale = 1.0;
    double last_train_time = 0.0;
    double train_cadence = 1.0;  // mean spacing of training times, raw units

    bool operator==(const ModelFile& other) const;
};

// Plain-text key=value document, first line `qfnn-model-version=<n>`. Reals
// use the shortest decimal that round-trips, so write/read is exact.
void write_model(std::ostream& out, const ModelFile& model);
void write_model(const std::filesystem::path& path, const ModelFile& model);

// Throws SchemaError on a missing/unknown version line, ParseError on
// malformed or missing fields.
ModelFile read_model(std::istream& in);
ModelFile read_model(const std::filesystem::path& path);

}  // namespace qfnn
