#pragma once

#include <stdexcept>
#include <string>

namespace kcurves {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Inconsistent or unsupported sizes (too few points, overflow of m^d, length mismatch).
class SizeError : public Error {
public:
    using Error::Error;
};

/// A factorization or eigensolver failed even after regularization.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, double attempted_jitter)
        : Error(what), jitter_(attempted_jitter) {}
    explicit NumericalError(const std::string& what) : NumericalError(what, 0.0) {}

    [[nodiscard]] double attempted_jitter() const noexcept { return jitter_; }

private:
    double jitter_;
};

/// A truncated series did not reach the requested relative tolerance.
class PrecisionError : public Error {
public:
    using Error::Error;
};

/// A power-law fit could not be performed on the requested window.
class FitError : public Error {
public:
    using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual) : Error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// The self-consistent spectral learning-curve formula left its range of validity.
class FormulaBreakdown : public Error {
public:
    using Error::Error;
};

enum class ParseErrorKind { BadMagic, Truncated, DimensionOverflow, BadRecordSize, Io };

/// Malformed IDX / CIFAR input.
class ParseError : public Error {
public:
    ParseError(ParseErrorKind kind, const std::string& what) : Error(what), kind_(kind) {}

    [[nodiscard]] ParseErrorKind kind() const noexcept { return kind_; }

private:
    ParseErrorKind kind_;
};

/// Invalid experiment configuration. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace kcurves
