#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uavtrack {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Centroid of an empty point set; the tracker treats this as "no measurement".
class EmptySetError : public Error {
 public:
  EmptySetError() : Error("centroid of an empty point set") {}
};

/// A scan interval that falls outside the trajectory's time domain.
class TimeDomainError : public Error {
 public:
  using Error::Error;
};

/// Scans handed to the integrator are not consecutive.
class DiscontiguousError : public Error {
 public:
  using Error::Error;
};

/// Integration count below one.
class InvalidIntegrationError : public Error {
 public:
  using Error::Error;
};

/// Estimate and ground truth share no timestamps within tolerance.
class EmptyOverlapError : public Error {
 public:
  using Error::Error;
};

/// Bad command-line or configuration usage (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the offending path and 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), path_(path), line_(line) {}

  const std::string& path() const { return path_; }
  std::size_t line() const { return line_; }

 private:
  std::string path_;
  std::size_t line_;
};

}  // namespace uavtrack
