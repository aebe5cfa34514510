#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace satdebias {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input record. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// A domain invariant or operation precondition was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Transport or protocol failure talking to a remote service.
class ProviderError : public Error {
 public:
  using Error::Error;
};

}  // namespace satdebias
