#pragma once

#include <stdexcept>
#include <string>

namespace n2n {

// Shape or index disagreement between operands.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Bad or inconsistent configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Requested density cannot be realized (CLI exit code 3).
struct InfeasibleDensityError : std::runtime_error {
    explicit InfeasibleDensityError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative scheme failed to reach its tolerance (CLI exit code 4).
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Two signatures or reports cannot be compared (different n, t or base config).
struct IncomparableError : std::runtime_error {
    explicit IncomparableError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace n2n
