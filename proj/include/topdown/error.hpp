#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace topdown {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column, const std::string& source = "")
      : Error(format(message, line, column, source)), message_(message), line_(line), column_(column) {}

  /// Same error attributed to `source` (typically a file name).
  ParseError from(const std::string& source) const { return ParseError(message_, line_, column_, source); }

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column,
                            const std::string& source) {
    std::string out = source.empty() ? "" : source + ":";
    if (line != 0) out += std::to_string(line) + ":" + std::to_string(column) + ":";
    return out.empty() ? message : out + " " + message;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

/// A configured cap (enumeration size, triple count, subset states) was exceeded.
class ResourceLimitError : public Error {
 public:
  using Error::Error;
};

/// Evaluation needed a transition that is absent and no trap state is enabled.
class IncompleteAutomatonError : public Error {
 public:
  using Error::Error;
};

/// An automaton or alphabet violates its structural invariants.
class ModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace topdown
