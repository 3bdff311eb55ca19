#pragma once

#include <stdexcept>
#include <string>

namespace bayescomp {

// Invalid arguments or model settings. The CLI maps these to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed or infeasible input data (exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Underflow, divergence, truncation failures (exit code 4).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Requested model or family outside what the library supports.
class UnsupportedError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace bayescomp
