#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hogsos {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax or well-formedness error in user-supplied text, with a 1-based
// line/column position.
class ParseError : public Error {
 public:
  ParseError(std::string message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        message_(std::move(message)),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

// A term or substitution that does not fit its signature or binding.
class TermError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration passed to a checker (empty pool, zero depth, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// One problem found while desugaring or validating a rule specification.
struct Diagnostic {
  std::string op;      // operation symbol, empty when not applicable
  std::string subset;  // rendered operand set W, e.g. "{1,2}"
  std::string reason;

  std::string to_string() const {
    std::string out;
    if (!op.empty()) {
      out += "(" + op;
      if (!subset.empty()) out += "," + subset;
      out += "): ";
    }
    return out + reason;
  }
};

// Raised when a specification fails validation; carries every diagnostic.
class SpecError : public Error {
 public:
  explicit SpecError(std::vector<Diagnostic> diagnostics)
      : Error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  static std::string summarize(const std::vector<Diagnostic>& ds) {
    std::string out = std::to_string(ds.size()) + " specification error(s)";
    for (const auto& d : ds) out += "\n  " + d.to_string();
    return out;
  }

  std::vector<Diagnostic> diagnostics_;
};

}  // namespace hogsos
