#pragma once

#include <stdexcept>
#include <string>

namespace omni {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An input outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A value violating the invariants of a domain type.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File system or codec failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

/// The external tracker process crashed, timed out or spoke garbage.
class AdapterError : public Error {
 public:
  using Error::Error;
};

}  // namespace omni
