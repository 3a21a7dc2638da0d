#pragma once

#include <stdexcept>
#include <string>

namespace qfnn {

// Malformed input files: CSV cells, model documents, forecast tables.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Model document with an unknown or missing format version.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Training produced a non-finite cost.
class DivergedError : public std::runtime_error {
public:
    DivergedError(std::size_t epoch, double cost)
        : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                             " (cost " + std::to_string(cost) + ")"),
          epoch_(epoch) {}

    std::size_t epoch() const noexcept { return epoch_; }

private:
    std::size_t epoch_;
};

}  // namespace qfnn
