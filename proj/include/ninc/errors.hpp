#pragma once

#include <stdexcept>
#include <string>

namespace ninc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input violates a documented bound (e.g. "p must exceed 1").
class DomainError : public Error {
public:
    using Error::Error;
};

/// Geometry factors requested for theta1 = 0, where A is undefined.
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// The bracketed root solve ran out of iterations.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double lo, double hi)
        : Error(what), bracket_lo(lo), bracket_hi(hi) {}

    double bracket_lo;
    double bracket_hi;
};

/// A constructed field failed its own transmission-condition check.
class InternalInconsistency : public Error {
public:
    using Error::Error;
};

/// Computed and golden tables have different shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A finite-difference step leaves the admissible parameter domain.
class StepError : public Error {
public:
    using Error::Error;
};

}  // namespace ninc
