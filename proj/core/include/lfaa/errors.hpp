#pragma once

#include <stdexcept>
#include <string>

namespace lfaa {

// Bad arguments, malformed files, dimension mismatches. CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values, divergence, unfilterable configurations. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lfaa
