// errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace vekua {

class VekuaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fields or operands live on different grids.
class GridMismatch : public VekuaError {
public:
    GridMismatch() : VekuaError("fields are defined on different grids") {}
};

/// A point or parameter lies outside the domain of an operation (kernel singularity,
/// point inside G where an exterior point is required, wrong domain kind, ...).
class DomainError : public VekuaError {
public:
    using VekuaError::VekuaError;
};

class ContractionViolated : public VekuaError {
public:
    explicit ContractionViolated(double kappa)
        : VekuaError("Neumann series not certified: kappa = " + std::to_string(kappa) + " >= 1"),
          kappa_(kappa) {}
    double kappa() const noexcept { return kappa_; }

private:
    double kappa_;
};

class NoConvergence : public VekuaError {
public:
    NoConvergence(int iterations, double residual)
        : VekuaError("no convergence after " + std::to_string(iterations) +
                     " iterations (relative residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class ModuleStructureAbsent : public VekuaError {
public:
    using VekuaError::VekuaError;
};

class ConfigError : public VekuaError {
public:
    using VekuaError::VekuaError;
};

}  // namespace vekua
