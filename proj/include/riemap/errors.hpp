#pragma once

#include <stdexcept>
#include <string>

namespace riemap {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed expression or scenario text. Carries the byte offset (or line
/// number for scenario files) of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t offset)
        : Error(msg + " (offset " + std::to_string(offset) + ")"), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_ = 0;
};

/// Arithmetic outside a primitive's domain: division by zero, sqrt/log of a
/// negative value, zero raised to a negative power.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Evaluation of a well-formed expression failed; names the primitive and the
/// sub-expression location.
class EvalError : public Error {
public:
    using Error::Error;
};

/// Geometric precondition violated (point outside chart, metric not SPD,
/// frame not orthonormal, rank-degenerate jet, grid mismatch, ...).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// ODE integration produced a non-finite state; reports the last valid
/// parameter value.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& msg, double last_valid_s)
        : Error(msg + " (last valid s = " + std::to_string(last_valid_s) + ")"),
          last_valid_s_(last_valid_s) {}
    double last_valid_s() const { return last_valid_s_; }

private:
    double last_valid_s_ = 0.0;
};

}  // namespace riemap
