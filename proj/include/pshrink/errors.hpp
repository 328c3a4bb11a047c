#pragma once

#include <stdexcept>
#include <string>

namespace pshrink {

/// Invalid estimator settings (beta out of range, non-positive a, bad grid...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed data handed to an operation (wrong length, empty vector...).
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input for which the requested quantity is undefined, e.g. D = 0.
class DegenerateInputError : public std::domain_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::domain_error(what) {}
};

class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pshrink
