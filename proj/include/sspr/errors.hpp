#pragma once

#include <stdexcept>
#include <string>

namespace sspr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (bad edge-list row, margin mismatch, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Text that could not be parsed; carries the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid parameters for a generator, optimizer or CLI command.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A quantity that is mathematically undefined (zero total weight, zero SD).
class UndefinedError : public Error {
 public:
  using Error::Error;
};

/// A weight transfer would drive an edge weight below zero.
class NegativeWeightError : public Error {
 public:
  using Error::Error;
};

/// A rewiring record cannot be replayed onto the graph it was given.
class CorruptRecordError : public Error {
 public:
  using Error::Error;
};

/// The sweep could not zero a cell, or the simplex hit its iteration cap.
class StallError : public Error {
 public:
  using Error::Error;
};

/// A candidate target matrix violates one of the target conditions.
class VerificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace sspr
