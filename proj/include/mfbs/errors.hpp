#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mfbs {

// Input and contract violations: bad parameters, mismatched shapes,
// malformed grids. The CLI maps this family to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string kind, const std::string& what)
        : std::invalid_argument(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

// Failures of the numeric machinery itself (factorizations, iterative
// solvers). The CLI maps this family to exit code 1.
class NumericError : public std::runtime_error {
public:
    NumericError(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DomainError : public ValidationError {
public:
    explicit DomainError(const std::string& what) : ValidationError("DomainError", what) {}
};

class DimensionMismatch : public ValidationError {
public:
    explicit DimensionMismatch(const std::string& what) : ValidationError("DimensionMismatch", what) {}
};

class InvalidPartition : public ValidationError {
public:
    explicit InvalidPartition(const std::string& what) : ValidationError("InvalidPartition", what) {}
};

class InsufficientData : public ValidationError {
public:
    explicit InsufficientData(const std::string& what) : ValidationError("InsufficientData", what) {}
};

class InvalidGrid : public ValidationError {
public:
    explicit InvalidGrid(const std::string& what) : ValidationError("InvalidGrid", what) {}
};

class NotPositiveDefinite : public NumericError {
public:
    explicit NotPositiveDefinite(const std::string& what) : NumericError("NotPositiveDefinite", what) {}
};

class ConvergenceFailure : public NumericError {
public:
    explicit ConvergenceFailure(const std::string& what) : NumericError("ConvergenceFailure", what) {}
};

}  // namespace mfbs
