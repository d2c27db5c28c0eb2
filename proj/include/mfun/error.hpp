#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mfun {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A documented precondition of an operation was violated by the caller.
class ContractViolation : public Error {
public:
  using Error::Error;
};

/// An argument lies outside the range an operation accepts.
class RangeError : public Error {
public:
  using Error::Error;
};

/// A request would exceed a configured memory or size cap.
class ResourceError : public Error {
public:
  using Error::Error;
};

/// Coefficient data needed for a prime is not available.
class MissingDataError : public Error {
public:
  using Error::Error;
};

/// The small-value regime required by a fast path does not hold.
class RegimeError : public Error {
public:
  using Error::Error;
};

/// Input file could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string &what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        detail_(what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  /// Message without the line suffix.
  const std::string &detail() const noexcept { return detail_; }

private:
  std::string detail_;
  std::size_t line_;
};

/// The Euler-product truncation point is too small for the requested
/// tail tolerance.
class CutoffTooSmall : public Error {
public:
  CutoffTooSmall(const std::string &what, std::uint64_t required)
      : Error(what + "; required cutoff P >= " + std::to_string(required)),
        required_(required) {}
  std::uint64_t required_cutoff() const noexcept { return required_; }

private:
  std::uint64_t required_;
};

} // namespace mfun
