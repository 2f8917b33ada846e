// errors.hpp - exception types that callers map to exit codes

#pragma once

#include <stdexcept>
#include <string>

namespace qdent {

/// Invalid user input: parameters, configuration files, dimensions.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure could not complete (step underflow, rank loss, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace qdent
