#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stratcheck {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Argument outside the documented domain of an operation (non-unit vector,
/// alpha outside (0,1], negative Lipschitz constant, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Expression source could not be parsed. `offset` is a byte offset into the source.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Domain error while evaluating an expression (sqrt of a negative, log of a
/// non-positive, division by zero, overflow).
class EvalError : public Error {
public:
    EvalError(const std::string& message, std::string subexpression, std::size_t offset)
        : Error(message + " in '" + subexpression + "'"),
          subexpression_(std::move(subexpression)),
          offset_(offset) {}

    const std::string& subexpression() const noexcept { return subexpression_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::string subexpression_;
    std::size_t offset_;
};

/// A chart Jacobian lost rank at an evaluated parameter.
class RankDeficiency : public Error {
public:
    using Error::Error;
};

/// The base point of a sampling schedule is farther from a stratum than r0.
class UnreachableBasePoint : public Error {
public:
    using Error::Error;
};

/// Scenario document is malformed. `path` is a JSON pointer to the offending field.
class ScenarioError : public Error {
public:
    ScenarioError(const std::string& path, const std::string& message)
        : Error((path.empty() ? std::string("/") : path) + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace stratcheck
