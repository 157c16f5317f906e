#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bcinv {

/// Base of every error the library raises. `module()` names the component
/// that failed so the CLI can serialize it.
class Error : public std::runtime_error {
public:
    Error(std::string module, const std::string& what)
        : std::runtime_error(what), module_(std::move(module)) {}

    const std::string& module() const noexcept { return module_; }
    virtual const char* kind() const noexcept { return "error"; }

private:
    std::string module_;
};

/// A caller broke a documented precondition (array too short, grid mismatch, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "contract_violation"; }
};

/// Malformed input file. `row` is 1-based and counts every physical line.
class FormatError : public Error {
public:
    FormatError(const std::string& what, std::size_t row)
        : Error("grids_io", what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }
    const char* kind() const noexcept override { return "format_error"; }

private:
    std::size_t row_;
};

class ConvergenceError : public Error {
public:
    ConvergenceError(std::string module, const std::string& what, double achieved)
        : Error(std::move(module), what), achieved_(achieved) {}
    double achieved_bound() const noexcept { return achieved_; }
    const char* kind() const noexcept override { return "convergence_failure"; }

private:
    double achieved_;
};

/// A discretized integral equation could not be solved (singular system).
class SolvabilityError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "solvability_failure"; }
};

class NumericError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "numeric_error"; }
};

class EigenSolverError : public Error {
public:
    EigenSolverError(const std::string& what, int index)
        : Error("spectral", what), index_(index) {}
    int index() const noexcept { return index_; }
    const char* kind() const noexcept override { return "eigensolver_failure"; }

private:
    int index_;
};

class PoleProximityError : public Error {
public:
    PoleProximityError(const std::string& what, double k)
        : Error("spectral", what), k_(k) {}
    double k() const noexcept { return k_; }
    const char* kind() const noexcept override { return "pole_proximity"; }

private:
    double k_;
};

class FlowError : public Error {
public:
    FlowError(const std::string& what, double x_reached)
        : Error("inverse_gl", what), x_reached_(x_reached) {}
    double x_reached() const noexcept { return x_reached_; }
    const char* kind() const noexcept override { return "flow_failure"; }

private:
    double x_reached_;
};

}  // namespace bcinv
