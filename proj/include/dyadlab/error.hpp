#pragma once

#include <stdexcept>
#include <string>

namespace dyadlab {

enum class ErrorKind {
  resource,     // cell budget or scan size exceeded
  alignment,    // rectangle not on lattice cell boundaries
  shape,        // lattice / dimension mismatch
  domain,       // parameter outside its admissible range
  format,       // malformed input file
  invalid_value,  // well-formed file carrying an inadmissible value
  scope,        // request outside the available level range
  precondition, // caller-side contract not met
  contract,     // internal guarantee violated (a bug or a refuted claim)
  degenerate,   // Monte Carlo produced no usable samples
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Error raised while parsing text inputs; carries the 1-based line number.
class FormatError : public Error {
 public:
  FormatError(ErrorKind kind, std::size_t line, const std::string& what)
      : Error(kind, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace dyadlab
