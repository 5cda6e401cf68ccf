#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kaczmarz {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a precondition (dimension mismatch, bad index, rho <= 0, ...).
class InvalidInput : public Error
{
public:
    using Error::Error;
};

/// An iterative routine hit its iteration/sweep cap.
class ConvergenceFailure : public Error
{
public:
    using Error::Error;
};

/// Ax = b has no solution to the checked tolerance.
class InconsistentSystem : public Error
{
public:
    using Error::Error;
};

/// Malformed problem or trace file. Carries the 1-based line number.
class ParseError : public Error
{
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A solver iterate became non-finite.
class NumericFailure : public Error
{
public:
    NumericFailure(std::size_t iteration, const std::string& what)
        : Error("iteration " + std::to_string(iteration) + ": " + what), iteration_(iteration)
    {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// Hoffman estimation found no infeasible sample point.
class NoEstimate : public Error
{
public:
    using Error::Error;
};

}  // namespace kaczmarz
