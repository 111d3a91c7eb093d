#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmc {

/// Base of every exception the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Contract violations in the arguments (exit status 2 in the CLI).
class ShapeError : public Error { using Error::Error; };
class BlockIndexError : public Error { using Error::Error; };
class ExponentError : public Error { using Error::Error; };
class EmptyInputError : public Error { using Error::Error; };
class ArgumentError : public Error { using Error::Error; };

// Numerical contract failures (exit status 3 in the CLI).
class NumericalError : public Error { using Error::Error; };
class SymmetryError : public NumericalError { using NumericalError::NumericalError; };
class ConvergenceError : public NumericalError { using NumericalError::NumericalError; };
class UnitarityError : public NumericalError { using NumericalError::NumericalError; };
class EvaluationError : public NumericalError { using NumericalError::NumericalError; };
class InsufficientDataError : public NumericalError { using NumericalError::NumericalError; };
class PartitionError : public NumericalError { using NumericalError::NumericalError; };

/// I/O failure opening or writing a file (exit status 4 in the CLI).
class IoError : public Error { using Error::Error; };

/// Malformed text input; carries the 1-based position of the offending token.
class ParseError : public IoError {
public:
    ParseError(std::string source, std::size_t line, std::size_t column, const std::string& what)
        : IoError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          source_(std::move(source)),
          line_(line),
          column_(column) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::string source_;
    std::size_t line_;
    std::size_t column_;
};

}  // namespace fmc
