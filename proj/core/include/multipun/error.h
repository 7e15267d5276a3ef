#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace multipun {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed resource text. `line()` is 1-based, 0 when not line-oriented.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Structurally valid input that violates a cross-reference or graph
// invariant (dangling synset offsets, hypernym cycles, tampered manifests).
class IntegrityError : public ParseError {
 public:
  using ParseError::ParseError;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Numeric input outside the domain of an operation (e.g. zero-norm vector).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

// Generator output missing one of its labelled fields. Carries the raw text.
class GenerationFormatError : public Error {
 public:
  GenerationFormatError(const std::string& what, std::string raw)
      : Error(what), raw_(std::move(raw)) {}
  const std::string& raw() const noexcept { return raw_; }

 private:
  std::string raw_;
};

// A generated sample failed its kind-specific invariants.
class ValidityError : public Error {
 public:
  using Error::Error;
};

class SubstitutionError : public Error {
 public:
  using Error::Error;
};

// Network failure that survived every retry.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int attempts)
      : Error(what + " (after " + std::to_string(attempts) + " attempts)"),
        attempts_(attempts) {}
  int attempts() const noexcept { return attempts_; }

 private:
  int attempts_;
};

class JudgeFormatError : public Error {
 public:
  using Error::Error;
};

class HarnessError : public Error {
 public:
  using Error::Error;
};

class ExportError : public Error {
 public:
  using Error::Error;
};

}  // namespace multipun
