#pragma once

#include <stdexcept>
#include <string>

namespace qzeno {

// Exit code 2 at the CLI boundary.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad command line or unknown recipe; reported like a configuration error.
class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Exit code 3 at the CLI boundary, together with its subclasses.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DepletedStateError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace qzeno
