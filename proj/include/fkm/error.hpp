#pragma once

#include <stdexcept>
#include <string>

namespace fkm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid system, measure, or run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Arguments outside an operation's domain (length mismatch, delta <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A symbolic orbit was requested past the stored coordinate horizon.
class HorizonError : public DomainError {
 public:
  using DomainError::DomainError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fkm
