#pragma once

#include <stdexcept>
#include <string>

namespace i3 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (rows, ids, events, schemes).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A computation was asked for outside its domain (empty sets, zero
/// denominators, degenerate proportions).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace i3
