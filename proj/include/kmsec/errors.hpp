#pragma once

#include <stdexcept>
#include <string>

namespace kmsec {

// Invalid argument or parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// A truncated series hit its term cap before reaching the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Adaptive quadrature could not meet its tolerance within the interval budget.
class QuadratureError : public ConvergenceError {
public:
    explicit QuadratureError(const std::string& what) : ConvergenceError(what) {}
};

// Malformed input file or stream.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kmsec
