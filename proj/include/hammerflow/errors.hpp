#pragma once

#include <stdexcept>
#include <string>

namespace hammerflow {

/// Configuration file or parameter validation failure.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure during integration (blow-up, step-size limit).
class NumericsError : public std::runtime_error {
public:
    explicit NumericsError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mismatched grids between state, costate and quadrature.
class GridMismatchError : public std::runtime_error {
public:
    explicit GridMismatchError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Optimizer-level failure (infeasible start, line search breakdown).
class OptimError : public std::runtime_error {
public:
    explicit OptimError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hammerflow
