#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace isoplan {

/// Base of every error raised by the library. `kind()` is a stable,
/// machine-readable tag that the CLI echoes in its error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Violated precondition (bad argument, empty input, dimension mismatch).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& message) : Error("contract", message) {}
};

/// Non-finite quadrature input or integrand value.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& message) : Error("domain", message) {}
};

/// Requested a closed form (or an approximation) the activation does not have.
class CapabilityError : public Error {
public:
    explicit CapabilityError(const std::string& message) : Error("capability", message) {}
};

/// Signal blew up (non-finite, negative or above the divergence cap) at `layer()`.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t layer, const std::string& message)
        : Error("divergence", message), layer_(layer) {}

    std::size_t layer() const noexcept { return layer_; }

private:
    std::size_t layer_;
};

/// Iterative solver failed; carries the last residual it reached.
class NumericalError : public Error {
public:
    NumericalError(double residual, const std::string& message)
        : Error("numerical", message), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Target cumulant outside what the weight-scale search can reach.
class InfeasibleError : public Error {
public:
    InfeasibleError(double min_c, double max_c, const std::string& message)
        : Error("infeasible", message), min_c_(min_c), max_c_(max_c) {}

    double min_c() const noexcept { return min_c_; }
    double max_c() const noexcept { return max_c_; }

private:
    double min_c_;
    double max_c_;
};

/// Malformed input file; `row()` is zero-based.
class FormatError : public Error {
public:
    FormatError(std::size_t row, const std::string& message)
        : Error("format", message), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

}  // namespace isoplan
