#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symbolkit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error or unknown identifier in a coefficient expression.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Expression evaluated outside its domain (division by zero, log of a nonpositive value, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid Levy-Khintchine data or state model.
class ModelError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& message, double achieved)
        : Error(message + " (achieved relative error " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved_tolerance() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// Arithmetic on the killing points that the calculation rules leave undefined.
class UndefinedOperation : public Error {
public:
    using Error::Error;
};

/// A path that violates the absorbing structure of the killing points.
class PathStructureError : public Error {
public:
    using Error::Error;
};

/// Model configuration that does not match the schema.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& reason)
        : Error(field.empty() ? reason : field + ": " + reason), field_(field) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Quantity that requires the sector condition was requested for a model violating it.
class SectorError : public Error {
public:
    using Error::Error;
};

/// Monte-Carlo estimation could not produce a usable estimate.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Simulation setup or random-stream failure.
class SimulationError : public Error {
public:
    using Error::Error;
};

}  // namespace symbolkit
