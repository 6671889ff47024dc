// errors.hpp -- exception hierarchy shared by all solver components.
#pragma once

#include <stdexcept>
#include <string>

namespace lcdual {

// Invalid model constants or configuration; message names the offending field.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure inside a solver stage (root bracketing, pasting residuals, ...).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature could not certify the requested tolerance (divergent tail, NaN integrand).
class QuadratureError : public SolverError {
public:
    explicit QuadratureError(const std::string& msg) : SolverError(msg) {}
};

// A certification check failed (sign pattern, statistical bound, ...).
class VerificationError : public std::runtime_error {
public:
    explicit VerificationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace lcdual
