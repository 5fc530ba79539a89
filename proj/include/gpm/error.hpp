#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid arguments: out-of-range modes, shape mismatches, duplicate nodes.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input data violates a value invariant (NaN/Inf entries, malformed files).
class DataError : public Error {
public:
    using Error::Error;
};

/// The snapshot matrix has numerical rank below the requested mode.
class DegenerateRankError : public Error {
public:
    DegenerateRankError(const std::string& what, std::size_t rank)
        : Error(what), rank_(rank) {}
    std::size_t rank() const noexcept { return rank_; }

private:
    std::size_t rank_;
};

/// A tangent-vector argument is not horizontal at its base point.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The overlap matrix Y0^T Y is singular, so the target lies on the cut locus
/// of the base point and has no logarithm.
class LogDomainError : public Error {
public:
    LogDomainError(const std::string& what, double condition_number)
        : Error(what), condition_number_(condition_number) {}
    double condition_number() const noexcept { return condition_number_; }

private:
    double condition_number_;
};

/// Cut time of the zero vector (constant geodesic).
class UndefinedCutTimeError : public Error {
public:
    using Error::Error;
};

/// Relative error against a reference column (or matrix) of zero norm.
class DivisionDomainError : public Error {
public:
    DivisionDomainError(const std::string& what, std::ptrdiff_t column)
        : Error(what), column_(column) {}
    /// Offending column, or -1 when the whole matrix is zero.
    std::ptrdiff_t column() const noexcept { return column_; }

private:
    std::ptrdiff_t column_;
};

}  // namespace gpm
