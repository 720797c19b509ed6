// Error types shared across the mono2d library.
#pragma once

#include <stdexcept>
#include <string>

namespace mono2d {

// Field/grid dimensions that do not match or are out of range.
struct InvalidShapeError : std::invalid_argument {
    explicit InvalidShapeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite or otherwise unusable numeric input.
struct InvalidInputError : std::invalid_argument {
    explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Bad configuration value (file or flag).
struct ConfigError : std::invalid_argument {
    explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Brute-force oracle invoked on a problem too large for it.
struct OracleSizeError : std::invalid_argument {
    explicit OracleSizeError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Unparseable or inconsistent checkpoint file.
struct CheckpointError : std::runtime_error {
    explicit CheckpointError(const std::string& msg) : std::runtime_error(msg) {}
};

// File I/O failure (missing file, write error).
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// File exists but its content is not in a supported format.
struct FormatError : IoError {
    explicit FormatError(const std::string& msg) : IoError(msg) {}
};

// Training loss became non-finite.
struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace mono2d
