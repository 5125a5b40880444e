#pragma once

#include <stdexcept>
#include <string>

namespace magvir {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SpectralError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by runtime monitors (resolution, leakage, solver).
struct MonitorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
    double previous;
    double last;
    ConvergenceError(const std::string& what, double prev, double cur)
        : std::runtime_error(what + " (last two values " + std::to_string(prev) + ", " +
                             std::to_string(cur) + ")"),
          previous(prev), last(cur) {}
};

}  // namespace magvir
