#pragma once

#include <stdexcept>
#include <string>

namespace hyplap {

/// Bad or inconsistent input: malformed documents, unknown names, shape
/// mismatches, configuration errors. Maps to CLI exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured size limit (basis cap, poset cap) was exceeded.
class LimitError : public InputError {
 public:
  using InputError::InputError;
};

/// A mathematical validation failed (functoriality, SPD-ness, residual
/// checks). Maps to CLI exit code 1.
class CheckError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hyplap
