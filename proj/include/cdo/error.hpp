#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cdo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed signature, function table, assignment or intervention.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// The structural functions contain a dependency cycle.
class CycleError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// The priority edges do not close to a strict partial order.
class PriorityCycleError : public ModelError {
 public:
  using ModelError::ModelError;
};

/// Formula text rejected by the lexer, parser or type checker.
class ParseError : public Error {
 public:
  ParseError(std::size_t column, const std::string& message)
      : Error("column " + std::to_string(column) + ": " + message),
        column_(column),
        detail_(message) {}

  /// 1-based column of the offending token.
  std::size_t column() const { return column_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t column_;
  std::string detail_;
};

/// A configured size cap (macro expansion, search budget) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace cdo
