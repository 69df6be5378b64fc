#pragma once

#include <stdexcept>
#include <string>

namespace weasl {

// Base type for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid configuration or argument values.
struct ConfigError : Error {
    using Error::Error;
};

// Malformed input (CSV rows, model files, config files).
struct ParseError : Error {
    using Error::Error;
};

// Structurally inconsistent data (e.g. conflicting labels within a group).
struct ConsistencyError : Error {
    using Error::Error;
};

// Non-finite objective or gradient during training.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace weasl
