#pragma once

#include <stdexcept>
#include <string>

namespace lextopic {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input is well-formed at the I/O level but violates a contract
/// (schema, range, invariant). Maps to CLI exit code 1.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file could not be opened, read or written. Maps to CLI exit code 2.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lextopic
