#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace litsearch {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something unusable: bad arguments, configuration, thresholds.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Input data violates its schema. `line` is 1-based, 0 when not applicable.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Connection-level failure (DNS, TLS, timeout). Retryable.
class NetworkError : public Error {
 public:
  using Error::Error;
};

// The remote service answered with an error status or an unusable payload.
class ServiceError : public Error {
 public:
  ServiceError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

// Reading or writing a local file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace litsearch
