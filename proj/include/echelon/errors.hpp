#pragma once

#include <stdexcept>
#include <string>

namespace echelon {

// Invalid configuration values (bad periods, horizons, file schema).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error("config error: " + msg) {}
};

// Precondition violations on otherwise valid configs (empty series, bad shapes).
struct DomainError : std::invalid_argument {
    explicit DomainError(const std::string& msg) : std::invalid_argument("domain error: " + msg) {}
};

// Non-finite values produced by numeric code.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error("numeric error: " + msg) {}
};

// Training diverged or produced a non-finite loss.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& msg) : std::runtime_error("training error: " + msg) {}
};

}  // namespace echelon
